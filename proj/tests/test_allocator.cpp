#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include <Eigen/Dense>

#include "esqubo/allocator.hpp"
#include "esqubo/market_data.hpp"
#include "esqubo/risk.hpp"
#include "test_support.hpp"

using esqubo::allocator::AllocationRecord;
using esqubo::allocator::AllocatorConfig;
using esqubo::allocator::allocate_series;
using esqubo::allocator::allocate_window;
using esqubo::market_data::ReturnsPanel;
using esqubo::market_data::WindowRange;
using esqubo::market_data::WindowSpec;
using esqubo::market_data::WindowStats;
using esqubo::market_data::window_stats;
using esqubo::risk::RiskConfig;

namespace {

struct Fixture {
    ReturnsPanel panel;
    WindowStats stats;
    Eigen::MatrixXd returns;

    explicit Fixture(int repetitions = 2)
        : panel(test_support::two_asset_panel(test_support::crash_pattern(), repetitions)),
          stats(window_stats(panel, WindowRange{0, 0, panel.n_periods()})),
          returns(panel.values) {}
};

AllocatorConfig tuned_config(const WindowStats& stats, double baseline_es, double alpha) {
    RiskConfig risk(alpha, stats.benchmark_sigma, baseline_es);
    AllocatorConfig cfg(risk);
    cfg.backend = "exhaustive";
    cfg.bits_per_weight = 4;
    return cfg;
}

}  // namespace

TEST_CASE("first-solve landing inside a wide band exits immediately") {
    Fixture fx;
    // baseline sigma equals the window sigma, so the target is baseline_es itself
    AllocatorConfig cfg = tuned_config(fx.stats, -0.065, 0.125);
    cfg.eta = 0.9;
    AllocationRecord rec = allocate_window(fx.stats, fx.returns, cfg);
    CHECK(rec.converged);
    CHECK(rec.trace.size() == 1);
    CHECK(rec.realized_es == rec.trace.back().realized_es);
}

TEST_CASE("max_iters cap still returns best-effort weights") {
    Fixture fx;
    AllocatorConfig cfg = tuned_config(fx.stats, -0.5, 0.125);  // unreachable tail target
    cfg.eta = 0.05;
    cfg.max_iters = 1;
    AllocationRecord rec = allocate_window(fx.stats, fx.returns, cfg);
    CHECK_FALSE(rec.converged);
    CHECK(rec.trace.size() == 1);
    CHECK(rec.weights.size() == 2);
    CHECK(rec.weights.minCoeff() >= 0.0);
}

TEST_CASE("outer loop matches the scripted replay step for step") {
    Fixture fx;
    AllocatorConfig cfg = tuned_config(fx.stats, -0.065, 0.125);
    cfg.eta = 0.05;
    AllocationRecord rec = allocate_window(fx.stats, fx.returns, cfg);
    test_support::ReplayResult replay = test_support::replay_outer_loop(fx.stats, fx.returns, cfg);

    REQUIRE(rec.trace.size() == replay.steps.size());
    for (std::size_t k = 0; k < replay.steps.size(); ++k) {
        CHECK(rec.trace[k].rho == replay.steps[k].rho);
        CHECK(rec.trace[k].realized_es == replay.steps[k].realized_es);
        CHECK(rec.trace[k].ratio == replay.steps[k].ratio);
    }
    CHECK(rec.converged == replay.converged);
    CHECK(rec.converged);
    // the converged record satisfies the band test on its own fields
    CHECK(std::abs(1.0 - rec.realized_es / rec.target_es) <= cfg.eta);
}

TEST_CASE("branch directions and multiplicative updates") {
    Fixture fx;
    AllocatorConfig cfg = tuned_config(fx.stats, -0.065, 0.125);
    cfg.eta = 0.05;
    AllocationRecord rec = allocate_window(fx.stats, fx.returns, cfg);
    REQUIRE(rec.trace.size() >= 2);
    for (std::size_t k = 0; k + 1 < rec.trace.size(); ++k) {
        const auto& cur = rec.trace[k];
        const auto& nxt = rec.trace[k + 1];
        if (cur.ratio > 1.0 + cfg.eta) CHECK(nxt.rho < cur.rho);
        if (cur.ratio < 1.0 - cfg.eta) CHECK(nxt.rho > cur.rho);
        CHECK(cur.ratio == std::abs(cur.realized_es) / std::abs(cur.target_es));
        // multiplicative step, possibly halved after an overshoot
        double m = nxt.rho / cur.rho;
        CHECK(m != 1.0);
        CHECK(m > 0.0);
        CHECK(std::abs(m - 1.0) <= cfg.rho_step + 1e-15);
    }
}

TEST_CASE("oscillating band is cut by step halving and capped honestly") {
    Fixture fx;
    // a band too narrow for the weight grid: no representable ES lands inside
    AllocatorConfig cfg = tuned_config(fx.stats, -0.012, 0.125);
    cfg.eta = 0.001;
    cfg.max_iters = 12;
    AllocationRecord rec = allocate_window(fx.stats, fx.returns, cfg);
    CHECK_FALSE(rec.converged);
    CHECK(rec.trace.size() == 12);
    test_support::ReplayResult replay = test_support::replay_outer_loop(fx.stats, fx.returns, cfg);
    REQUIRE(replay.steps.size() == rec.trace.size());
    for (std::size_t k = 0; k < replay.steps.size(); ++k)
        CHECK(rec.trace[k].rho == replay.steps[k].rho);
}

TEST_CASE("weights stay on the encoding grid and cash absorbs the remainder") {
    Fixture fx;
    AllocatorConfig cfg = tuned_config(fx.stats, -0.065, 0.125);
    AllocationRecord rec = allocate_window(fx.stats, fx.returns, cfg);
    double grid = std::ldexp(1.0, -cfg.bits_per_weight);
    for (int i = 0; i < 2; ++i) {
        double scaled = rec.weights(i) / grid;
        CHECK(scaled == std::floor(scaled));
        CHECK(rec.weights(i) >= 0.0);
        CHECK(rec.weights(i) < 1.0);
    }
    CHECK(rec.cash_weight == 1.0 - (rec.weights(0) + rec.weights(1)));
}

TEST_CASE("determinism across repeated runs") {
    Fixture fx;
    AllocatorConfig cfg = tuned_config(fx.stats, -0.065, 0.125);
    cfg.backend = "annealing";
    cfg.seed = 7;
    AllocationRecord a = allocate_window(fx.stats, fx.returns, cfg);
    AllocationRecord b = allocate_window(fx.stats, fx.returns, cfg);
    REQUIRE(a.trace.size() == b.trace.size());
    CHECK(a.converged == b.converged);
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
        CHECK(a.trace[k].rho == b.trace[k].rho);
        CHECK(a.trace[k].bits == b.trace[k].bits);
    }
}

TEST_CASE("degenerate benchmark volatility is rejected loudly") {
    // benchmark is the flat series here, so its window sigma is zero
    Eigen::MatrixXd values(2, 4);
    values << 0.0, 0.0, 0.0, 0.0, 0.01, -0.01, 0.02, 0.0;
    ReturnsPanel panel(test_support::make_dates(4), {"CASH", "X"}, values, 0);
    WindowStats stats = window_stats(panel, WindowRange{0, 0, 4});
    RiskConfig risk(0.25, 0.02, -0.05);
    AllocatorConfig cfg{risk};
    cfg.backend = "exhaustive";
    CHECK_THROWS_AS(allocate_window(stats, panel.values, cfg), std::domain_error);
}

TEST_CASE("allocate_series walks windows in order and matches per-window runs") {
    Fixture fx(4);  // 32 periods
    AllocatorConfig cfg = tuned_config(window_stats(fx.panel, WindowRange{0, 0, 16}), -0.065, 0.125);
    cfg.max_iters = 10;
    WindowSpec spec(16, 8);
    auto records = allocate_series(fx.panel, spec, cfg);
    REQUIRE(records.size() == 3);
    for (std::size_t k = 0; k < records.size(); ++k) CHECK(records[k].window_index == static_cast<int>(k));

    auto ranges = esqubo::market_data::windows(fx.panel, spec);
    for (std::size_t k = 0; k < records.size(); ++k) {
        WindowStats s = window_stats(fx.panel, ranges[k]);
        Eigen::MatrixXd r = fx.panel.values.middleCols(static_cast<Eigen::Index>(ranges[k].begin),
                                                       static_cast<Eigen::Index>(ranges[k].end - ranges[k].begin));
        AllocationRecord solo = allocate_window(s, r, cfg);
        CHECK(solo.trace.size() == records[k].trace.size());
        CHECK(solo.realized_es == records[k].realized_es);
        CHECK(solo.target_es == records[k].target_es);
    }
}

TEST_CASE("per-window targets scale inversely with benchmark volatility") {
    // first half of the series is twice as volatile as the second half
    std::vector<double> loud{-0.04, 0.04, -0.04, 0.04, -0.04, 0.04, -0.04, 0.04};
    std::vector<double> quiet{-0.02, 0.02, -0.02, 0.02, -0.02, 0.02, -0.02, 0.02};
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(2, 16);
    for (int k = 0; k < 8; ++k) {
        values(1, k) = loud[static_cast<std::size_t>(k)];
        values(1, 8 + k) = quiet[static_cast<std::size_t>(k)];
    }
    values.row(0).setConstant(0.001);
    ReturnsPanel panel(test_support::make_dates(16), {"CASH", "SPY"}, values, 1);

    RiskConfig risk(0.25, 0.02, -0.05);
    AllocatorConfig cfg(risk);
    cfg.backend = "exhaustive";
    cfg.max_iters = 4;
    auto records = allocate_series(panel, WindowSpec(8, 8), cfg);
    REQUIRE(records.size() == 2);

    auto ranges = esqubo::market_data::windows(panel, WindowSpec(8, 8));
    for (std::size_t k = 0; k < 2; ++k) {
        WindowStats s = window_stats(panel, ranges[k]);
        CHECK(records[k].target_es == esqubo::risk::es_target(risk, s.benchmark_sigma));
    }
    // double the sigma, half the target magnitude
    CHECK(records[0].target_es == doctest::Approx(records[1].target_es / 2.0).epsilon(1e-12));
    CHECK(std::abs(records[0].target_es) < std::abs(records[1].target_es));
}
