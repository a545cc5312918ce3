#include "gnormal/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gnormal::cli::run(argc, argv, std::cout, std::cerr); }
