#pragma once

#include <string>
#include <vector>

namespace rencontre::cli {

/// Runs one subcommand (dist | gf | tail-prob | cond-exp-bounds | table1 |
/// simulate). Exit status: 0 success, 2 validation error, 3 divergence-tagged
/// outcome requested in a plain numeric format.
int dispatch(const std::vector<std::string>& args);

} // namespace rencontre::cli
