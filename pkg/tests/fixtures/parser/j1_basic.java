package com.acme;

import java.util.List;
import java.util.ArrayList;
import static org.junit.Assert.assertEquals;
import java.sql.*;

public class J1 {}
