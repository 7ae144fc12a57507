#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "symreg/errors.hpp"
#include "symreg/ops.hpp"
#include "symreg/rng.hpp"

using namespace symreg;

namespace {

Tensor random_tensor(std::vector<int> shape, std::uint64_t seed) {
    Tensor t(std::move(shape));
    auto eng = make_engine(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& x : t.v) x = u(eng);
    return t;
}

}  // namespace

TEST_CASE("conv3d identity kernel reproduces the input") {
    Tensor in = random_tensor({4, 3, 2, 1}, 7);
    Tensor ker({1, 1, 1, 1, 1});
    ker.v[0] = 1.0;
    Tensor out = ops::conv3d(in, ker, 1, true);
    REQUIRE(out.shape == in.shape);
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(out.v[i] == in.v[i]);
}

TEST_CASE("conv3d all-zero kernels annihilate") {
    Tensor in = random_tensor({4, 4, 2, 2}, 9);
    Tensor ker({3, 3, 3, 2, 5});
    Tensor out = ops::conv3d(in, ker, 1, true);
    CHECK(out.shape == std::vector<int>{4, 4, 2, 5});
    for (double x : out.v) CHECK(x == 0.0);
}

TEST_CASE("conv3d ones kernel counts in-bounds neighbors") {
    // 2x2x1 input of ones under a zero-padded 3x3x3 ones kernel: every
    // voxel sees a 2x2x1 in-bounds window, so every output is 4.
    Tensor in({2, 2, 1, 1}, 1.0);
    Tensor ker({3, 3, 3, 1, 1}, 1.0);
    Tensor out = ops::conv3d(in, ker, 1, true);
    REQUIRE(out.shape == std::vector<int>{2, 2, 1, 1});
    for (double x : out.v) CHECK(x == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("conv3d zero-padded stride-1 preserves spatial shape") {
    for (auto dims : {std::vector<int>{5, 4, 3, 2}, {7, 7, 2, 1}, {3, 6, 5, 4}}) {
        Tensor in = random_tensor(dims, 11);
        Tensor ker = random_tensor({3, 3, 3, dims[3], 4}, 13);
        Tensor out = ops::conv3d(in, ker, 1, true);
        CHECK(out.shape == std::vector<int>{dims[0], dims[1], dims[2], 4});
    }
}

TEST_CASE("conv3d rejects channel mismatch with both shapes in the message") {
    Tensor in = random_tensor({4, 4, 2, 3}, 5);
    Tensor ker = random_tensor({3, 3, 3, 4, 8}, 6);
    try {
        ops::conv3d(in, ker, 1, true);
        FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("[4,4,2,3]") != std::string::npos);
        CHECK(msg.find("[3,3,3,4,8]") != std::string::npos);
    }
}

TEST_CASE("maxpool3d halves constant input") {
    Tensor in({4, 4, 4, 1}, 3.7);
    Tensor out = ops::maxpool3d(in, 2, 2);
    CHECK(out.shape == std::vector<int>{2, 2, 2, 1});
    for (double x : out.v) CHECK(x == 3.7);
}

TEST_CASE("maxpool3d takes the max of pairs along an axis") {
    Tensor in({4, 1, 1, 1});
    in.v = {1, 2, 3, 4};
    Tensor out = ops::maxpool3d(in, 2, 2);
    REQUIRE(out.shape == std::vector<int>{2, 1, 1, 1});
    CHECK(out.v[0] == 2.0);
    CHECK(out.v[1] == 4.0);
}

TEST_CASE("maxpool3d drops a trailing partial window but pools a short axis whole") {
    // depth 5 -> 2 under window 2 stride 2 (partial window dropped)
    Tensor in = random_tensor({12, 12, 5, 1}, 3);
    CHECK(ops::maxpool3d(in, 2, 2).shape == std::vector<int>{6, 6, 2, 1});
    // an axis shorter than the window pools into one output
    Tensor thin = random_tensor({2, 2, 1, 3}, 4);
    CHECK(ops::maxpool3d(thin, 2, 2).shape == std::vector<int>{1, 1, 1, 3});
}

TEST_CASE("maxpool3d rejects a window larger than every spatial extent") {
    Tensor in = random_tensor({1, 1, 1, 4}, 8);
    CHECK_THROWS_AS(ops::maxpool3d(in, 2, 2), DimensionError);
}

TEST_CASE("maxpool3d backward routes gradient to the argmax only") {
    Tensor in = random_tensor({4, 4, 2, 2}, 21);
    std::vector<int> argmax;
    Tensor out = ops::maxpool3d(in, 2, 2, &argmax);
    std::vector<double> d_out(out.size(), 1.0);
    std::vector<double> d_in(in.size(), 0.0);
    ops::maxpool3d_backward(argmax, d_out, d_in);
    // exactly one unit of gradient per window, landing on the max
    double total = 0;
    for (std::size_t i = 0; i < d_in.size(); ++i) {
        total += d_in[i];
        if (d_in[i] != 0.0) CHECK(d_in[i] == 1.0);
    }
    CHECK(total == doctest::Approx(static_cast<double>(out.size())));
}

TEST_CASE("dense identity and scalar affine") {
    Tensor x({3});
    x.v = {1.5, -2.0, 0.25};
    Tensor w({3, 3});
    for (int i = 0; i < 3; ++i) w.v[static_cast<std::size_t>(i * 3 + i)] = 1.0;
    Tensor b({3});
    Tensor out = ops::dense(x, w, b);
    for (int i = 0; i < 3; ++i) CHECK(out.v[static_cast<std::size_t>(i)] == x.v[static_cast<std::size_t>(i)]);

    Tensor x1({1});
    x1.v = {3.0};
    Tensor w1({1, 1});
    w1.v = {2.0};
    Tensor b1({1});
    b1.v = {1.0};
    CHECK(ops::dense(x1, w1, b1).v[0] == 7.0);
}

TEST_CASE("dense accepts the full-size 4608 to 1 head") {
    Tensor x = random_tensor({4608}, 31);
    Tensor w = random_tensor({4608, 1}, 32);
    Tensor b({1});
    Tensor out = ops::dense(x, w, b);
    CHECK(out.shape == std::vector<int>{1});
}

TEST_CASE("dense rejects length mismatch") {
    Tensor x = random_tensor({4}, 1);
    Tensor w = random_tensor({3, 2}, 2);
    Tensor b({2});
    CHECK_THROWS_AS(ops::dense(x, w, b), DimensionError);
}

TEST_CASE("relu clamps negatives") {
    Tensor x({3});
    x.v = {-1.0, 0.0, 2.0};
    Tensor out = ops::relu(x);
    CHECK(out.v == std::vector<double>{0.0, 0.0, 2.0});

    Tensor neg({4}, -3.0);
    for (double v : ops::relu(neg).v) CHECK(v == 0.0);
}

TEST_CASE("dropout rate 0 and eval mode are exact identities") {
    Tensor x = random_tensor({100}, 17);
    auto eng = make_engine(17);
    CHECK(ops::dropout(x, 0.0, Mode::train, &eng).v == x.v);
    CHECK(ops::dropout(x, 0.5, Mode::eval, nullptr).v == x.v);
}

TEST_CASE("dropout inverted scaling keeps the mean near 1") {
    Tensor x({100000}, 1.0);
    auto eng = make_engine(99);
    Tensor out = ops::dropout(x, 0.5, Mode::train, &eng);
    double mean = 0;
    for (double v : out.v) mean += v;
    mean /= static_cast<double>(out.size());
    CHECK(mean > 0.97);
    CHECK(mean < 1.03);
}

TEST_CASE("dropout masks are reproducible per seed and fresh per call") {
    Tensor x({512}, 1.0);
    auto e1 = make_engine(5);
    auto e2 = make_engine(5);
    Tensor a = ops::dropout(x, 0.5, Mode::mc, &e1);
    Tensor b = ops::dropout(x, 0.5, Mode::mc, &e2);
    CHECK(a.v == b.v);
    Tensor c = ops::dropout(x, 0.5, Mode::mc, &e1);  // same engine, next draw
    CHECK(a.v != c.v);
}

TEST_CASE("dropout rejects rate >= 1") {
    Tensor x({4}, 1.0);
    auto eng = make_engine(1);
    CHECK_THROWS_AS(ops::dropout(x, 1.0, Mode::train, &eng), ConfigError);
}
