#include <iostream>

#include "agentinterp/cli.hpp"

int main(int argc, char** argv) { return agentinterp::cli::run(argc, argv, std::cout, std::cerr); }
