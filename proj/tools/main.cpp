#include "schanuel/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return schanuel::run_cli(argc, argv, std::cout, std::cerr); }
