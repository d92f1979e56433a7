#include <vector>
#include <string>

#include "uniformize/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return uniformize::run_cli(args);
}
