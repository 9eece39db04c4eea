#include <iostream>

#include "svev/cli.hpp"

int main(int argc, char** argv) { return svev::cli::run(argc, argv, std::cout, std::cerr); }
