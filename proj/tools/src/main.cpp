#include <iostream>

#include "removal/cli/app.hpp"

int main(int argc, char** argv) { return removal::cli::main_entry(argc, argv, std::cout, std::cerr); }
