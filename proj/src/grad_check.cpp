#include "symreg/grad_check.hpp"

#include <cmath>

namespace symreg {

namespace {

double rel_err(double a, double n) {
    const double ma = std::fabs(a), mn = std::fabs(n);
    if (ma < 1e-10 && mn < 1e-10) return 0.0;
    return std::fabs(a - n) / std::max(std::max(ma, mn), 1e-8);
}

}  // namespace

GradCheckReport grad_check(ComputeGraph& graph, double tolerance, double h) {
    GradCheckReport report;
    report.tolerance = tolerance;

    graph.forward(Mode::eval);
    GradSink analytic(graph.params());
    graph.backward(1.0, &analytic);

    ParameterStore& store = graph.params();
    for (int id = 0; id < store.count(); ++id) {
        Parameter& p = store.at(id);
        if (!p.trainable) continue;
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double saved = p.value.v[i];
            p.value.v[i] = saved + h;
            graph.forward(Mode::eval);
            const double plus = graph.output_value();
            p.value.v[i] = saved - h;
            graph.forward(Mode::eval);
            const double minus = graph.output_value();
            p.value.v[i] = saved;

            const double numeric = (plus - minus) / (2.0 * h);
            const double err = rel_err(analytic.at(id)[i], numeric);
            if (err > report.max_rel_err) {
                report.max_rel_err = err;
                report.worst_param = p.name;
                report.worst_index = static_cast<int>(i);
                report.analytic_at_worst = analytic.at(id)[i];
                report.numeric_at_worst = numeric;
            }
        }
    }
    // restore the cached forward state at the original parameters
    graph.forward(Mode::eval);
    report.pass = report.max_rel_err < tolerance;
    return report;
}

}  // namespace symreg
