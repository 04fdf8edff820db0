#include <iostream>

#include "iiot/cli.hpp"

int main(int argc, char** argv) { return iiot::run_cli(argc, argv, std::cout, std::cerr); }
