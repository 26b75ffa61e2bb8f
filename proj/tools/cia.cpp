#include "cia/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return cia::runCli(argc, argv, std::cout, std::cerr); }
