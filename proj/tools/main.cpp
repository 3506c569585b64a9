#include <iostream>

#include "fracvisc/cli.hpp"

int main(int argc, char** argv) {
    return fracvisc::cli::run_cli(argc, argv, std::cout, std::cerr);
}
