#include <iostream>

#include "mfact/cli.hpp"

int main(int argc, char** argv) { return mfact::cli::run(argc, argv, std::cout, std::cerr); }
