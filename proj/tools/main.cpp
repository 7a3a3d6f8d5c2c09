#include "arbminer/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return arbminer::run_cli(argc, argv, std::cout, std::cerr); }
