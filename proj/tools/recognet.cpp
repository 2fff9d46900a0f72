#include <iostream>

#include "recognet/cli.hpp"

int main(int argc, char** argv) { return recognet::cli::run(argc, argv, std::cout, std::cerr); }
