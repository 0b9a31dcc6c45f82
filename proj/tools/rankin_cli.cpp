#include <iostream>

#include "rankin/commands.hpp"

int main(int argc, char** argv) { return rankin::cli::run(argc, argv, std::cout, std::cerr); }
