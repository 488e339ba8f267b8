#include <iostream>

#include "dmkp/cli.hpp"

int main(int argc, char** argv) { return dmkp::run_cli(argc, argv, std::cout, std::cerr); }
