#include <iostream>

#include "lipsqml_cli/commands.hpp"

int main(int argc, char **argv) {
    return lipsqml::cli::run_cli({argv, argv + argc}, std::cout, std::cerr);
}
