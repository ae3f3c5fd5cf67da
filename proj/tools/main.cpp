#include <iostream>

#include "vqt/cli.hpp"

int main(int argc, char** argv) { return vqt::run_cli(argc, argv, std::cout, std::cerr); }
