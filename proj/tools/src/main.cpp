#include <iostream>

#include "rfdfar_cli/cli.hpp"

int main(int argc, char** argv) { return rfdfar::cli::dispatch(argc, argv, std::cout, std::cerr); }
