#include <iostream>

#include "smr/cli.hpp"

int main(int argc, char** argv) { return smr::run_cli(argc, argv, std::cout, std::cerr); }
