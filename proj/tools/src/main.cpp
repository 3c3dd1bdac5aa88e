#include <iostream>

#include "mincap_cli/cli.hpp"

int main(int argc, char** argv) { return mincap::cli::run(argc, argv, std::cout, std::cerr); }
