#include <iostream>

#include "mti/cli.hpp"

int main(int argc, char** argv) {
    return mti::cli_main(argc, argv, std::cout, std::cerr);
}
