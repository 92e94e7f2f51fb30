#include <iostream>

#include "superres/cli.hpp"

int main(int argc, char** argv) { return superres::run_cli(argc, argv, std::cout, std::cerr); }
