// #include <fake1.h>
/* #include <fake2.h> */
#include <thread> // real
/*
#include <fake3.h>
*/
#include "sys/socket.h"
