#include <iostream>
#include <string>
#include <vector>

#include "framelayout/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return framelayout::cli(args, std::cout, std::cerr);
}
