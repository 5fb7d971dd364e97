#include <iostream>

#include "divmbest/cli.hpp"

int main(int argc, char** argv) { return divmbest::run_cli(argc, argv, std::cout, std::cerr); }
