#include <iostream>

#include "mbgp/cli.hpp"

int main(int argc, char** argv) { return mbgp::run_cli(argc, argv, std::cout, std::cerr); }
