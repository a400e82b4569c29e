#include <iostream>

#include "mabsoc/cli.hpp"

int main(int argc, char** argv) {
    return mabsoc::parse_and_run(argc, argv, std::cout, std::cerr);
}
