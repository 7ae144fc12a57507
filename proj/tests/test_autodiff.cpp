#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "symreg/adam.hpp"
#include "symreg/errors.hpp"
#include "symreg/grad_check.hpp"
#include "symreg/graph.hpp"
#include "symreg/rng.hpp"

using namespace symreg;

namespace {

Tensor filled(std::vector<int> shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Tensor t(std::move(shape));
    auto eng = make_engine(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    for (auto& x : t.v) x = u(eng);
    return t;
}

int add_frozen_sum_head(ComputeGraph& g, ParameterStore& store, int node, int width) {
    Tensor ones({width, 1}, 1.0);
    const int w = store.add("sum.w", std::move(ones), false);
    const int b = store.add("sum.b", Tensor({1}), false);
    return g.add_dense(g.add_flatten(node), w, b, "sum");
}

}  // namespace

TEST_CASE("backward of (w x - y)^2 gives dL/dw = -4 at w=0") {
    ParameterStore store;
    Tensor w({1, 1});  // w = 0
    const int w_id = store.add("w", std::move(w));
    const int b_id = store.add("b", Tensor({1}), false);

    ComputeGraph g(&store);
    const int x = g.add_input({1}, "x");
    const int y = g.add_input({1}, "y");
    const int pred = g.add_dense(x, w_id, b_id, "w*x");
    g.set_output(g.add_square(g.add_sub(pred, y)));

    g.set_scalar_input(x, 2.0);
    g.set_scalar_input(y, 1.0);
    g.forward(Mode::eval);
    CHECK(g.output_value() == 1.0);
    GradSink sink(store);
    g.backward(1.0, &sink);
    CHECK(sink.at(w_id)[0] == doctest::Approx(-4.0).epsilon(1e-12));
}

TEST_CASE("a parameter the loss does not depend on gets gradient exactly 0") {
    ParameterStore store;
    const int w_used = store.add("used", filled({1, 1}, 3));
    const int w_unused = store.add("unused", filled({1, 1}, 4));
    const int b = store.add("b", Tensor({1}), false);

    ComputeGraph g(&store);
    const int x = g.add_input({1});
    g.set_output(g.add_square(g.add_dense(x, w_used, b)));
    g.set_scalar_input(x, 1.3);
    g.forward(Mode::eval);
    GradSink sink(store);
    g.backward(1.0, &sink);
    CHECK(sink.at(w_unused)[0] == 0.0);
    CHECK(sink.at(w_used)[0] != 0.0);
}

TEST_CASE("backward requires a cached forward pass") {
    ParameterStore store;
    const int w = store.add("w", filled({1, 1}, 5));
    const int b = store.add("b", Tensor({1}), false);
    ComputeGraph g(&store);
    const int x = g.add_input({1});
    g.set_output(g.add_dense(x, w, b));
    g.set_scalar_input(x, 1.0);
    CHECK_THROWS_AS(g.backward(), StateError);
}

TEST_CASE("per-layer gradients match central finite differences") {
    const double tol = 1e-4;

    SUBCASE("conv3d") {
        ParameterStore store;
        const int k = store.add("k", filled({3, 3, 3, 2, 3}, 11, -0.5, 0.5));
        ComputeGraph g(&store);
        const int x = g.add_input({4, 3, 2, 2});
        const int conv = g.add_conv3d(x, k, 1, true);
        g.set_output(add_frozen_sum_head(g, store, g.add_square(conv), 4 * 3 * 2 * 3));
        g.set_input(x, filled({4, 3, 2, 2}, 12));
        const auto rep = grad_check(g, tol);
        INFO("worst: ", rep.worst_param, "[", rep.worst_index, "] rel err ", rep.max_rel_err);
        CHECK(rep.pass);
    }

    SUBCASE("dense") {
        ParameterStore store;
        const int w = store.add("w", filled({6, 4}, 13));
        const int b = store.add("b", filled({4}, 14));
        ComputeGraph g(&store);
        const int x = g.add_input({6});
        const int d = g.add_dense(x, w, b);
        g.set_output(add_frozen_sum_head(g, store, g.add_square(d), 4));
        g.set_input(x, filled({6}, 15));
        CHECK(grad_check(g, tol).pass);
    }

    SUBCASE("relu and maxpool") {
        ParameterStore store;
        const int k = store.add("k", filled({3, 3, 3, 1, 2}, 16, -0.5, 0.5));
        ComputeGraph g(&store);
        const int x = g.add_input({4, 4, 2, 1});
        const int conv = g.add_conv3d(x, k, 1, true);
        const int act = g.add_relu(conv);
        const int pool = g.add_maxpool3d(act, 2, 2);
        g.set_output(add_frozen_sum_head(g, store, g.add_square(pool), 2 * 2 * 1 * 2));
        g.set_input(x, filled({4, 4, 2, 1}, 17));
        const auto rep = grad_check(g, tol);
        INFO("worst: ", rep.worst_param, " rel err ", rep.max_rel_err);
        CHECK(rep.pass);
    }

    SUBCASE("clip gate, both sides of the margin") {
        for (double gap : {0.01, 0.9}) {  // below and above threshold 0.25
            ParameterStore store;
            Tensor wt({1, 1});
            wt.v[0] = gap;
            const int w = store.add("w", std::move(wt));
            const int b = store.add("b", Tensor({1}), false);
            ComputeGraph g(&store);
            const int x = g.add_input({1});
            const int pred = g.add_dense(x, w, b);
            g.set_output(g.add_clip(g.add_square(pred), 0.25));
            g.set_scalar_input(x, 1.0);
            CHECK(grad_check(g, 1e-4).pass);
        }
    }
}

TEST_CASE("maxpool gradient is 1 at each argmax and 0 elsewhere") {
    ParameterStore store;
    ComputeGraph g(&store);
    const int x = g.add_input({4, 1, 1, 1});
    const int pool = g.add_maxpool3d(x, 2, 2);
    g.set_output(add_frozen_sum_head(g, store, pool, 2));
    Tensor in({4, 1, 1, 1});
    in.v = {1, 2, 3, 4};
    g.set_input(x, in);
    g.forward(Mode::eval);
    GradSink sink(store);
    g.backward(1.0, &sink);
    CHECK(g.value(x).grad == std::vector<double>{0, 1, 0, 1});
}

TEST_CASE("relu input gradient matches finite differences away from 0") {
    ParameterStore store;
    ComputeGraph g(&store);
    const int x = g.add_input({3});
    g.set_output(add_frozen_sum_head(g, store, g.add_relu(x), 3));
    Tensor in({3});
    in.v = {-1.0, 0.5, 2.0};
    g.set_input(x, in);
    g.forward(Mode::eval);
    g.backward();
    const auto analytic = g.value(x).grad;

    const double h = 1e-6;
    for (int i = 0; i < 3; ++i) {
        Tensor plus = in, minus = in;
        plus.v[static_cast<std::size_t>(i)] += h;
        minus.v[static_cast<std::size_t>(i)] -= h;
        g.set_input(x, plus);
        g.forward(Mode::eval);
        const double fp = g.output_value();
        g.set_input(x, minus);
        g.forward(Mode::eval);
        const double fm = g.output_value();
        g.set_input(x, in);
        CHECK(analytic[static_cast<std::size_t>(i)] ==
              doctest::Approx((fp - fm) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("backward of a sum of losses equals the sum of backwards") {
    ParameterStore store;
    const int w = store.add("w", filled({2, 1}, 23));
    const int b = store.add("b", filled({1}, 24));
    ComputeGraph g(&store);
    const int x1 = g.add_input({2});
    const int x2 = g.add_input({2});
    const int l1 = g.add_square(g.add_dense(x1, w, b));
    const int l2 = g.add_square(g.add_dense(x2, w, b));
    const int both = g.add_add(l1, l2);
    g.set_input(x1, filled({2}, 25));
    g.set_input(x2, filled({2}, 26));

    g.set_output(both);
    g.forward(Mode::eval);
    GradSink combined(store);
    g.backward(1.0, &combined);

    GradSink separate(store);
    g.set_output(l1);
    g.forward(Mode::eval);
    g.backward(1.0, &separate);
    g.set_output(l2);
    g.forward(Mode::eval);
    g.backward(1.0, &separate);

    for (std::size_t i = 0; i < 2; ++i)
        CHECK(combined.at(w)[i] == doctest::Approx(separate.at(w)[i]).epsilon(1e-14));
    CHECK(combined.at(b)[0] == doctest::Approx(separate.at(b)[0]).epsilon(1e-14));
}

TEST_CASE("gradients accumulate additively across fan-out") {
    // loss = (w x)^2 + (w x)^2 reuses one dense node twice
    ParameterStore store;
    Tensor wt({1, 1});
    wt.v[0] = 0.7;
    const int w = store.add("w", std::move(wt));
    const int b = store.add("b", Tensor({1}), false);
    ComputeGraph g(&store);
    const int x = g.add_input({1});
    const int pred = g.add_dense(x, w, b);
    const int sq = g.add_square(pred);
    g.set_output(g.add_add(sq, sq));
    g.set_scalar_input(x, 1.5);
    g.forward(Mode::eval);
    GradSink sink(store);
    g.backward(1.0, &sink);
    // d/dw of 2 (w x)^2 = 4 w x^2
    CHECK(sink.at(w)[0] == doctest::Approx(4 * 0.7 * 1.5 * 1.5).epsilon(1e-12));
}

TEST_CASE("grad_check on the identity graph reports error 0") {
    ParameterStore store;
    const int w = store.add("w", Tensor({1, 1}));  // w = 0
    const int b = store.add("b", Tensor({1}), false);
    ComputeGraph g(&store);
    const int x = g.add_input({1});
    g.set_output(g.add_dense(x, w, b));
    g.set_scalar_input(x, 1.0);
    const auto rep = grad_check(g, 1e-4);
    CHECK(rep.pass);
    CHECK(rep.max_rel_err == 0.0);
}

TEST_CASE("grad_check forces dropout to eval so the comparison is deterministic") {
    ParameterStore store;
    const int w = store.add("w", filled({4, 1}, 27));
    const int b = store.add("b", Tensor({1}), false);
    ComputeGraph g(&store);
    const int x = g.add_input({4});
    const int drop = g.add_dropout(x, 0.5);
    g.set_output(g.add_square(g.add_dense(drop, w, b)));
    g.set_input(x, filled({4}, 28));
    const auto r1 = grad_check(g, 1e-4);
    const auto r2 = grad_check(g, 1e-4);
    CHECK(r1.pass);
    CHECK(r1.max_rel_err == r2.max_rel_err);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged and bumps the step") {
    ParameterStore store;
    const int w = store.add("w", filled({3, 1}, 31));
    const std::vector<double> before = store.at(w).value.v;
    OptimizerState opt(store, {});
    store.zero_grads();
    adam_step(store, opt);
    CHECK(store.at(w).value.v == before);
    CHECK(opt.step_count() == 1);
}

TEST_CASE("adam: first step with g=1, lr=0.1 moves the parameter down by about 0.1") {
    ParameterStore store;
    Tensor t({1, 1});
    t.v[0] = 2.0;
    const int w = store.add("w", std::move(t));
    AdamConfig cfg;
    cfg.lr = 0.1;
    OptimizerState opt(store, cfg);
    store.at(w).value.ensure_grad();
    store.at(w).value.grad[0] = 1.0;
    adam_step(store, opt);
    CHECK(store.at(w).value.v[0] == doctest::Approx(2.0 - 0.1).epsilon(1e-7));
}

TEST_CASE("adam: constant gradient walks the parameter against the gradient sign") {
    ParameterStore store;
    const int w = store.add("w", Tensor({1, 1}));
    AdamConfig cfg;
    cfg.lr = 0.01;
    OptimizerState opt(store, cfg);
    for (int i = 0; i < 50; ++i) {
        store.at(w).value.ensure_grad();
        store.at(w).value.grad[0] = 2.5;
        adam_step(store, opt);
    }
    CHECK(store.at(w).value.v[0] < 0.0);
    CHECK(opt.step_count() == 50);
}

TEST_CASE("adam is deterministic") {
    auto run = [] {
        ParameterStore store;
        const int w = store.add("w", filled({8, 1}, 33));
        OptimizerState opt(store, {});
        for (int i = 0; i < 20; ++i) {
            auto& p = store.at(w).value;
            p.ensure_grad();
            for (std::size_t j = 0; j < p.size(); ++j) p.grad[j] = 0.1 * static_cast<double>(j) - 0.3;
            adam_step(store, opt);
        }
        return store.at(w).value.v;
    };
    CHECK(run() == run());
}

TEST_CASE("adam rejects non-finite gradients naming the parameter") {
    ParameterStore store;
    const int w = store.add("offender", Tensor({1, 1}));
    OptimizerState opt(store, {});
    store.at(w).value.ensure_grad();
    store.at(w).value.grad[0] = std::numeric_limits<double>::quiet_NaN();
    try {
        adam_step(store, opt);
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        CHECK(std::string(e.what()).find("offender") != std::string::npos);
    }
}
