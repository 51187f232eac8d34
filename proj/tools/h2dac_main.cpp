#include <iostream>

#include "h2dac/cli.hpp"

int main(int argc, char** argv) { return h2dac::cli::run(argc, argv, std::cout, std::cerr); }
