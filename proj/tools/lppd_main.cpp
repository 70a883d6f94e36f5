#include "lppd/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return lppd::cli::main(argc, argv, std::cout, std::cerr); }
