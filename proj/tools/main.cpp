#include <iostream>

#include "dib/cli.hpp"

int main(int argc, char** argv) { return dib::run(argc, argv, std::cout, std::cerr); }
