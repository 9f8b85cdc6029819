#include <iostream>

#include "dcvar/cli.hpp"

int main(int argc, char** argv) { return dcvar::cli::run(argc, argv, std::cout, std::cerr); }
