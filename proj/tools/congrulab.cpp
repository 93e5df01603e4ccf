#include "congrulab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return congrulab::run_cli(argc, argv, std::cout, std::cerr); }
