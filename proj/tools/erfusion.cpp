#include <iostream>

#include "erfusion/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return erfusion::cli::run(args, std::cout, std::cerr);
}
