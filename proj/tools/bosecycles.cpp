#include <iostream>

#include "bosecycles/cli.hpp"

int main(int argc, char** argv) { return bosecycles::run_cli(argc, argv, std::cout, std::cerr); }
