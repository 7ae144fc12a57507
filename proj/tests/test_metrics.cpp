#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "symreg/errors.hpp"
#include "symreg/metrics.hpp"
#include "symreg/rng.hpp"

using namespace symreg;

TEST_CASE("rmse and mae hand values") {
    const std::vector<double> t{3.0, 4.0};
    CHECK(rmse(t, t) == 0.0);
    CHECK(mae(t, t) == 0.0);

    const std::vector<double> zeros{0.0, 0.0};
    CHECK(rmse(zeros, t) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
    CHECK(mae(zeros, t) == doctest::Approx(3.5).epsilon(1e-15));

    CHECK_THROWS_AS(rmse({}, {}), ConfigError);
}

TEST_CASE("mae never exceeds rmse") {
    auto eng = make_engine(11);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p(13), t(13);
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = u(eng);
            t[i] = u(eng);
        }
        CHECK(mae(p, t) <= rmse(p, t) + 1e-12);
    }
}

TEST_CASE("pearson_r hand values") {
    const std::vector<double> y{0.5, 1.0, 2.5, -1.0};
    CHECK(pearson_r(y, y) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> neg(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) neg[i] = -y[i];
    CHECK(pearson_r(y, neg) == doctest::Approx(-1.0).epsilon(1e-12));

    // cov = 3/3, sd_a = sqrt(2/3), sd_b = sqrt(14/9): r = 3/sqrt(2*14/3)
    const std::vector<double> a{1, 2, 3}, b{1, 2, 4};
    CHECK(pearson_r(a, b) == doctest::Approx(3.0 / std::sqrt(28.0 / 3.0)).epsilon(1e-12));
    CHECK(pearson_r(a, b) == doctest::Approx(0.9820).epsilon(1e-4));
}

TEST_CASE("pearson_r is invariant under positive affine transforms") {
    auto eng = make_engine(12);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> a(9), b(9);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = u(eng);
        b[i] = u(eng);
    }
    const double base = pearson_r(a, b);
    std::vector<double> scaled(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) scaled[i] = 3.7 * a[i] + 11.0;
    CHECK(pearson_r(scaled, b) == doctest::Approx(base).epsilon(1e-10));
}

TEST_CASE("pearson_r rejects degenerate input") {
    CHECK_THROWS_AS(pearson_r(std::vector<double>{1.0}, std::vector<double>{2.0}), ConfigError);
    CHECK_THROWS_AS(pearson_r(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}),
                    NumericError);
}

TEST_CASE("binary agreement: perfect predictions and degenerate classes") {
    const std::vector<double> t{1.0, 2.0, 4.0, 5.0};
    const auto perfect = binary_agreement(t, t, 3.401);
    CHECK(perfect.accuracy == 1.0);
    REQUIRE(perfect.sensitivity.has_value());
    REQUIRE(perfect.specificity.has_value());
    CHECK(*perfect.sensitivity == 1.0);
    CHECK(*perfect.specificity == 1.0);

    const std::vector<double> all_normal{4.0, 5.0, 6.0};
    const auto degen = binary_agreement(all_normal, all_normal, 3.401);
    CHECK(!degen.sensitivity.has_value());
    CHECK(degen.specificity.has_value());
}

TEST_CASE("binary agreement matches a brute-force confusion matrix") {
    auto eng = make_engine(13);
    std::uniform_real_distribution<double> u(0.44, 6.84);
    const double thr = 3.401;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> p(40), t(40);
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = u(eng);
            t[i] = u(eng);
        }
        int tp = 0, tn = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const bool pa = p[i] < thr, ta = t[i] < thr;
            tp += pa && ta;
            tn += !pa && !ta;
            fp += pa && !ta;
            fn += !pa && ta;
        }
        const auto m = binary_agreement(p, t, thr);
        CHECK(m.accuracy == doctest::Approx(double(tp + tn) / 40.0).epsilon(1e-12));
        if (tp + fn > 0) CHECK(*m.sensitivity == doctest::Approx(double(tp) / (tp + fn)).epsilon(1e-12));
        if (tn + fp > 0) CHECK(*m.specificity == doctest::Approx(double(tn) / (tn + fp)).epsilon(1e-12));
    }
}

TEST_CASE("coverage probability basics") {
    const std::vector<double> truth{1.0}, center{1.2}, width{0.3};
    CHECK(coverage_probability(truth, center, width, 0.0) == 0.0);
    CHECK(coverage_probability(truth, center, width, 1.0) == 1.0);  // |0.2| <= 0.3

    const std::vector<double> t2{0.0, 10.0}, c2{1.0, 9.0}, w2{0.5, 0.5};
    CHECK(coverage_probability(t2, c2, w2, 100.0) == 1.0);
}

TEST_CASE("sharpness basics") {
    const std::vector<double> w{0.5, 0.5};
    CHECK(sharpness(w, 0.0, 6.4) == 1.0);
    CHECK(sharpness(w, 1.0, 6.4) == doctest::Approx(1.0 - 1.0 / 6.4).epsilon(1e-12));
    CHECK(sharpness(std::vector<double>{3.2}, 1.0, 6.4) == 0.0);  // full width = span
    CHECK_THROWS_AS(sharpness(w, 1.0, 0.0), ConfigError);
}

TEST_CASE("trapezoid AUC of the (0,1),(1,0) diagonal is exactly one half") {
    CHECK(auc_trapezoid({{0.0, 1.0}, {1.0, 0.0}}) == 0.5);
}

TEST_CASE("curve is monotone, bounded and ends at CP 1") {
    auto eng = make_engine(14);
    std::uniform_real_distribution<double> u(0.44, 6.84);
    std::uniform_real_distribution<double> w(0.05, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> truths(25), centers(25), widths(25);
        for (std::size_t i = 0; i < truths.size(); ++i) {
            truths[i] = u(eng);
            centers[i] = u(eng);
            widths[i] = w(eng);
        }
        CurveConfig cfg;
        cfg.span = 6.4;
        const CurveResult res = sharpness_cp_curve(truths, centers, widths, cfg);
        REQUIRE(!res.points.empty());
        CHECK(!res.truncated);
        CHECK(res.points.back().cp == 1.0);
        for (std::size_t i = 1; i < res.points.size(); ++i) {
            CHECK(res.points[i].cp >= res.points[i - 1].cp);
            CHECK(res.points[i].sharpness <= res.points[i - 1].sharpness);
        }
        CHECK(res.auc >= 0.0);
        CHECK(res.auc <= 1.0);
    }
}

TEST_CASE("zero widths with nonzero residuals truncate at the m cap") {
    const std::vector<double> truths{1.0, 2.0}, centers{1.5, 2.5}, widths{0.0, 0.0};
    CurveConfig cfg;
    cfg.span = 6.4;
    cfg.k_step = 64.0;  // keep the walk short
    const CurveResult res = sharpness_cp_curve(truths, centers, widths, cfg);
    CHECK(res.truncated);
    CHECK(res.points.back().cp < 1.0);
}

TEST_CASE("exact zero-width predictions have AUC exactly 1") {
    const std::vector<double> truths{1.0, 2.0, 3.0};
    const std::vector<double> zero_widths{0.0, 0.0, 0.0};
    CurveConfig cfg;
    cfg.span = 6.4;
    const CurveResult res = sharpness_cp_curve(truths, truths, zero_widths, cfg);
    CHECK(res.points.front().cp == 1.0);
    CHECK(res.points.front().sharpness == 1.0);
    CHECK(res.auc == 1.0);
}

TEST_CASE("report arithmetic: the avg column is the mean of the sides") {
    auto eng = make_engine(15);
    std::uniform_real_distribution<double> u(0.44, 6.84);
    std::uniform_real_distribution<double> w(0.05, 0.6);
    const std::size_t n = 30;
    std::vector<double> yr(n), yl(n), pr(n), pl(n), cr(n), cl(n), wr(n), wl(n);
    for (std::size_t i = 0; i < n; ++i) {
        yr[i] = u(eng);
        yl[i] = u(eng);
        pr[i] = yr[i] + 0.3 * (u(eng) - 3.64);
        pl[i] = yl[i] + 0.3 * (u(eng) - 3.64);
        cr[i] = pr[i];
        cl[i] = pl[i];
        wr[i] = w(eng);
        wl[i] = w(eng);
    }
    CurveConfig curve;
    curve.span = 6.4;
    const MetricsReport rep =
        compute_metrics_report(yr, yl, pr, pl, cr, cl, wr, wl, EvalThresholds{}, curve);
    CHECK(rep.avg.rmse == doctest::Approx((rep.right.rmse + rep.left.rmse) / 2).epsilon(1e-12));
    CHECK(rep.avg.mae == doctest::Approx((rep.right.mae + rep.left.mae) / 2).epsilon(1e-12));
    CHECK(rep.avg.pearson ==
          doctest::Approx((rep.right.pearson + rep.left.pearson) / 2).epsilon(1e-12));
    CHECK(rep.auc_avg ==
          doctest::Approx((rep.curve_right.auc + rep.curve_left.auc) / 2).epsilon(1e-12));
}

TEST_CASE("a perfect oracle scores MAE 0, R 1, accuracy 1") {
    const std::vector<double> yr{1.0, 2.0, 4.0, 5.5}, yl{1.1, 2.2, 4.4, 5.0};
    const std::vector<double> w(yr.size(), 0.1);
    CurveConfig curve;
    curve.span = 6.4;
    const MetricsReport rep =
        compute_metrics_report(yr, yl, yr, yl, yr, yl, w, w, EvalThresholds{}, curve);
    CHECK(rep.right.mae == 0.0);
    CHECK(rep.left.mae == 0.0);
    CHECK(rep.right.pearson == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.bin_right.accuracy == 1.0);
    CHECK(rep.bin_left.accuracy == 1.0);
}
