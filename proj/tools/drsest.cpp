#include <iostream>

#include "drs/cli.hpp"

int main(int argc, char** argv) { return drs::run_cli(argc, argv, std::cout, std::cerr); }
