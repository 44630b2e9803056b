#include <iostream>
#include <string>
#include <vector>

#include "ellattr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ellattr::cli::execute(args, std::cout, std::cerr);
}
