#include <iostream>
#include <vector>

#include "chstab/cli.hpp"

int main(int argc, char** argv) {
    return chstab::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout,
                            std::cerr);
}
