#include <vector>

#include "rencontre/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rencontre::cli::dispatch(args);
}
