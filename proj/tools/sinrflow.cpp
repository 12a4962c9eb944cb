#include <iostream>

#include "sinrflow/cli.hpp"

int main(int argc, char** argv) { return sinrflow::run_cli(argc, argv, std::cout, std::cerr); }
