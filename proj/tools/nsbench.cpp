#include "nsbench/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return nsbench::run_cli(argc, argv, std::cout, std::cerr); }
