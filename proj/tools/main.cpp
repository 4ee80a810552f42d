#include <iostream>

#include "infolearn/cli.hpp"

int main(int argc, char** argv) { return infolearn::run_cli(argc, argv, std::cout, std::cerr); }
