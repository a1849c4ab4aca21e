#include <iostream>

#include "buckpass/cli.hpp"

int main(int argc, char** argv) {
    return buckpass::run_cli(argc, argv, std::cout, std::cerr);
}
