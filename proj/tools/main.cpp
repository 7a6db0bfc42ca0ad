#include <iostream>

#include "pointprob/cli.hpp"

int main(int argc, char** argv) {
    return pointprob::run_cli(argc, argv, std::cout, std::cerr);
}
