#include <iostream>
#include <string>
#include <vector>

#include "penduflow/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return penduflow::run_cli(args, std::cout, std::cerr);
}
