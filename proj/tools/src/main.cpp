#include <nwidths/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return nwidths::cli::run(argc, argv, std::cout, std::cerr); }
