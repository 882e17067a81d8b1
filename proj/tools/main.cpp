#include <iostream>

#include "lmm_cli.hpp"

int main(int argc, char** argv) { return lmm::cli::run_cli(argc, argv, std::cout, std::cerr); }
