#include <iostream>

#include "jaqm/cli/app.hpp"

int main(int argc, char** argv) { return jaqm::cli::run_main(argc, argv, std::cout, std::cerr); }
