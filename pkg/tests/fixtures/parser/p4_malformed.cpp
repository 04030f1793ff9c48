#include <unclosed
#include
#include MACRO_PATH
#include <spdlog/spdlog.h>
#include ""
