#include <iostream>

#include "gsup/cli.hpp"

int main(int argc, char** argv) { return gsup::cli::run(argc, argv, std::cout, std::cerr); }
