#include <doctest.h>
int dummy_cli;
