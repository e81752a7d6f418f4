#include <vector>
#include <string>

#include "gibbslab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gibbslab::run_cli(args);
}
