#pragma once

#include <vector>

namespace aot::detail {

/// Small dense LP in computational form: minimize c.x subject to
/// row constraints (equality or <=) and x >= 0. Two-phase tableau simplex
/// with Bland's rule throughout, so pivoting is deterministic and cannot
/// cycle. Intended for desk-scale problems (hundreds of variables).
struct LinearProgram {
    int num_vars = 0;
    std::vector<std::vector<double>> rows; // each of size num_vars
    std::vector<double> rhs;
    std::vector<char> kind;     // 'E' equality, 'L' <=
    std::vector<double> objective; // size num_vars, minimized
};

struct LpSolution {
    bool feasible = false;
    double objective = 0.0;
    std::vector<double> x;
};

LpSolution solve_lp(const LinearProgram& lp);

} // namespace aot::detail
