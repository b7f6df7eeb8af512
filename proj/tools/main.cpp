#include <string>
#include <vector>

#include "vasc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return vasc::run_cli(args);
}
