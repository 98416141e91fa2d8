#include "erslp/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return erslp::cli::run(argc, argv, std::cout, std::cerr); }
