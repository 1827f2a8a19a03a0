#include <iostream>

#include "amwu/harness/cli.hpp"

int main(int argc, char** argv) { return amwu::harness::run_cli(argc, argv, std::cout, std::cerr); }
