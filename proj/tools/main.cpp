#include "sphclust/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sphclust::cli::run(argc, argv, std::cout, std::cerr); }
