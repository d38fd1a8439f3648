#include <iostream>
#include <string>
#include <vector>

#include "routechoice/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return routechoice::run_cli(args, std::cout, std::cerr);
}
