#pragma once

#include <string>

#include "symreg/graph.hpp"

namespace symreg {

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_param;
    int worst_index = -1;
    double analytic_at_worst = 0.0;
    double numeric_at_worst = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Compares reverse-mode gradients against central finite differences for
/// every trainable parameter element. All evaluations run in eval mode so
/// dropout stays inert and the comparison is deterministic. 64-bit
/// throughout; the graph's inputs must already be set.
GradCheckReport grad_check(ComputeGraph& graph, double tolerance, double h = 1e-3);

}  // namespace symreg
