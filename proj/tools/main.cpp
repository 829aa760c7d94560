#include <iostream>

#include "entrytime/cli.hpp"

int main(int argc, char** argv) { return entrytime::cli::run(argc, argv, std::cout, std::cerr); }
