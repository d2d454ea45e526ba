#include "gnsm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gnsm::cli::main(args, std::cout, std::cerr);
}
