#include "rencontre/bounds.hpp"

namespace rencontre {

namespace {

// Published reference rows. Rows 8 and 9 print five probabilities under a
// "d=4" label; they are stored with all five and run as d=5, flagged so the
// CLI and tests can surface the discrepancy.
const Table1Row kRows[] = {
    {1, {0.3, 0.4, 0.5}, 3, 1.0 / 80, 1.0 / 8, 3.86223, 3.88172, false},
    {2, {0.45, 0.5, 0.55}, 3, 1.0 / 300, 1.0 / 10, 9.31034, 9.84928, false},
    {3, {0.05, 0.5, 0.5}, 3, 1.0 / 15, 1.0 / 2, 1.22586, 1.22586, false},
    {4, {0.3, 0.4, 0.5, 0.6}, 4, 1.0 / 15, 1.0 / 2, 2.3814, 2.38296, false},
    {5, {0.4, 0.45, 0.5, 0.55}, 4, 1.0 / 250, 1.0 / 8, 4.35938, 4.361, false},
    {6, {0.47, 0.5, 0.52, 0.53}, 4, 1.0 / 500, 1.0 / 15, 9.9011, 10.3937, false},
    {7, {0.5, 0.5, 0.6, 0.6}, 4, 1.0 / 200, 1.0 / 8, 4.73906, 4.75067, false},
    {8, {0.48, 0.49, 0.5, 0.51, 0.52}, 4, 1.0 / 500, 1.0 / 15, 5.1569, 5.49917, true},
    {9, {0.4, 0.4, 0.5, 0.5, 0.5}, 4, 1.0 / 150, 1.0 / 8, 3.02342, 3.0273, true},
};

} // namespace

std::span<const Table1Row> table1_rows() {
    return kRows;
}

} // namespace rencontre
