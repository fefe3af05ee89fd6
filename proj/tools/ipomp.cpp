#include <iostream>

#include "ipomp/cli.hpp"

int main(int argc, char **argv) { return ipomp::run_cli(argc, argv, std::cout, std::cerr); }
