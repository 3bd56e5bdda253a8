#include <iostream>

#include "csufs/cli.hpp"

int main(int argc, char** argv) { return csufs::cli::run(argc, argv, std::cout, std::cerr); }
