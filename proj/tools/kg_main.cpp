#include <string>
#include <vector>

#include "kg/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return kg::cli::run_main(args);
}
