#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "adiafactor/experiments.hpp"

using namespace adiafactor;

namespace {

CostDiagonal diag_of(std::uint64_t N) { return build_cost_diagonal(factor_layout(N)); }

}  // namespace

TEST(QuadraticFit, ExactOnNoiselessQuadratic) {
    std::vector<FitPoint> pts;
    for (int n = 1; n <= 5; ++n) pts.push_back({double(n), 1.0 + 2.0 * n + 3.0 * n * n});
    const QuadraticFit fit = quadratic_fit(pts);
    EXPECT_NEAR(fit.a, 1.0, 1e-9);
    EXPECT_NEAR(fit.b, 2.0, 1e-9);
    EXPECT_NEAR(fit.c, 3.0, 1e-9);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
    EXPECT_NEAR(fit.rmse, 0.0, 1e-9);
    EXPECT_NEAR(fit(10.0), 321.0, 1e-7);
}

TEST(QuadraticFit, CollinearGivesZeroCurvature) {
    const QuadraticFit fit = quadratic_fit({{1, 3}, {2, 5}, {3, 7}});
    EXPECT_NEAR(fit.c, 0.0, 1e-9);
    EXPECT_NEAR(fit.b, 2.0, 1e-9);
    EXPECT_NEAR(fit.a, 1.0, 1e-9);
}

TEST(QuadraticFit, NoisyQuadraticData) {
    std::mt19937_64 rng(2010);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<FitPoint> pts;
    for (int n = 7; n <= 16; ++n) {
        const double v = 0.5 - 0.1 * n + 0.04 * n * n;
        pts.push_back({double(n), v * (1.0 + noise(rng))});
    }
    EXPECT_GE(quadratic_fit(pts).r_squared, 0.95);
}

TEST(QuadraticFit, PermutationInvariant) {
    std::vector<FitPoint> pts{{7, 1.3}, {8, 2.1}, {9, 2.2}, {10, 4.0}, {11, 5.5}, {12, 7.9}};
    const QuadraticFit ref = quadratic_fit(pts);
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 5; ++rep) {
        std::shuffle(pts.begin(), pts.end(), rng);
        const QuadraticFit fit = quadratic_fit(pts);
        EXPECT_NEAR(fit.a, ref.a, 1e-9);
        EXPECT_NEAR(fit.b, ref.b, 1e-9);
        EXPECT_NEAR(fit.c, ref.c, 1e-9);
        EXPECT_NEAR(fit.r_squared, ref.r_squared, 1e-12);
    }
}

TEST(QuadraticFit, TranslationConsistent) {
    const std::vector<FitPoint> pts{{7, 1.3}, {8, 2.1}, {9, 2.2}, {10, 4.0}, {11, 5.5}, {12, 7.9}};
    const QuadraticFit ref = quadratic_fit(pts);
    const double delta = 5.0;
    std::vector<FitPoint> shifted;
    for (const auto& p : pts) shifted.push_back({p.n + delta, p.value});
    const QuadraticFit fit = quadratic_fit(shifted);
    // v = a + b n + c n^2 = a' + b' (n + d) + c' (n + d)^2
    EXPECT_NEAR(fit.c, ref.c, 1e-9);
    EXPECT_NEAR(fit.b, ref.b - 2.0 * ref.c * delta, 1e-8);
    EXPECT_NEAR(fit.a, ref.a - ref.b * delta + ref.c * delta * delta, 1e-7);
    EXPECT_NEAR(fit.r_squared, ref.r_squared, 1e-12);
}

TEST(QuadraticFit, RankDeficient) {
    EXPECT_THROW(quadratic_fit({{1, 1}, {2, 2}}), InvalidArgument);
    EXPECT_THROW(quadratic_fit({{1, 1}, {1, 2}, {2, 3}, {2, 4}}), InvalidArgument);
}

TEST(WindowSearch, ConsistentWithGridOracle) {
    const CostDiagonal diag = diag_of(21);
    const ProbabilityWindow window{0.3, 0.31};
    const TimeSearchResult res = find_window_time(diag, 30.0, 2, window);
    ASSERT_FALSE(res.in_window_at_start);
    EXPECT_TRUE(window.contains(res.achieved_probability));
    EXPECT_GT(res.T_star, 0.0);
    EXPECT_EQ(res.evaluations, res.probes.size());
    EXPECT_NEAR(final_success_probability(diag, 30.0, 2, res.T_star), res.achieved_probability, 1e-12);
    // No in-window time below (1 - resolution) T*.
    const double limit = 0.99 * res.T_star;
    for (int i = 1; i <= 400; ++i) {
        const double T = limit * i / 400.0;
        EXPECT_FALSE(window.contains(final_success_probability(diag, 30.0, 2, T))) << T;
    }
}

TEST(WindowSearch, DefaultWindowAtThreeQubitsIsMetAtStart) {
    for (std::uint64_t N : {15ull, 21ull}) {
        const TimeSearchResult res = find_window_time(diag_of(N), 30.0, 2, ProbabilityWindow{});
        EXPECT_TRUE(res.in_window_at_start);
        EXPECT_EQ(res.T_star, 0.0);
        EXPECT_DOUBLE_EQ(res.achieved_probability, 0.125);
        EXPECT_EQ(res.evaluations, 0u);
    }
}

TEST(WindowSearch, WindowBelowUniformProbabilityRejected) {
    EXPECT_THROW(find_window_time(diag_of(21), 30.0, 2, {0.01, 0.02}), InvalidArgument);
    EXPECT_THROW(find_window_time(diag_of(21), 30.0, 2, {0.5, 0.4}), InvalidArgument);
}

TEST(WindowSearch, AdiabaticLimitWindowForNine) {
    const CostDiagonal diag = diag_of(9);
    const TimeSearchResult high = find_window_time(diag, 30.0, 2, {0.99, 1.0});
    EXPECT_GE(high.achieved_probability, 0.99);
    EXPECT_GT(final_success_probability(diag, 30.0, 2, 2.0 * high.T_star), 0.99);
    const TimeSearchResult mid = find_window_time(diag, 30.0, 2, {0.5, 0.51});
    EXPECT_GE(high.T_star, mid.T_star);
}

TEST(WindowSearch, HigherWindowNeedsLongerTime) {
    const CostDiagonal diag = diag_of(21);
    const TimeSearchResult low = find_window_time(diag, 30.0, 2, {0.3, 0.31});
    const TimeSearchResult high = find_window_time(diag, 30.0, 2, {0.99, 1.0});
    EXPECT_GE(high.T_star, low.T_star);
}

TEST(WindowSearch, BudgetExhaustionReportsProbes) {
    WindowSearchOptions opts;
    opts.max_evaluations = 3;
    try {
        find_window_time(diag_of(21), 30.0, 2, {0.99, 1.0}, opts);
        FAIL() << "expected WindowUnreachable";
    } catch (const WindowUnreachable& e) {
        EXPECT_NE(std::string(e.what()).find("probes"), std::string::npos);
    }
}

TEST(AdiabaticLimit, TenTimesWindowTime) {
    for (std::uint64_t N : {9ull, 15ull, 21ull}) {
        const CostDiagonal diag = diag_of(N);
        const ProbabilityWindow window{0.5, 0.51};
        const TimeSearchResult res = find_window_time(diag, 30.0, 2, window);
        EXPECT_GT(final_success_probability(diag, 30.0, 2, 10.0 * res.T_star), 0.99) << N;
    }
}

TEST(Scaling, ThreeQubitsUsesBothInstances) {
    ScalingConfig cfg;
    cfg.sizes = {3};
    cfg.samples_per_size = 2;
    const ScalingReport report = run_scaling_study(cfg);
    ASSERT_EQ(report.records.size(), 2u);
    std::vector<std::uint64_t> Ns{report.records[0].N, report.records[1].N};
    std::sort(Ns.begin(), Ns.end());
    EXPECT_EQ(Ns, (std::vector<std::uint64_t>{15, 21}));
    for (const auto& rec : report.records) {
        EXPECT_EQ(rec.status, RecordStatus::ok);
        EXPECT_EQ(rec.qubits, 3u);
        EXPECT_EQ(rec.T_star, 0.0);
    }
    EXPECT_EQ(report.means.front().available, 2u);
    EXPECT_FALSE(report.fit.has_value());
}

TEST(Scaling, ShortfallRecorded) {
    const auto instances = sample_distinct_instances(7, 10, 2010, SizeAxis::total_qubits);
    EXPECT_EQ(instances.size(), 5u);
    EXPECT_TRUE(sample_distinct_instances(4, 10, 2010, SizeAxis::total_qubits).empty());
}

TEST(Scaling, DistinctSamplesAreDeterministic) {
    for (unsigned size : {11u, 14u, 16u}) {
        const auto a = sample_distinct_instances(size, 10, 99, SizeAxis::total_qubits);
        EXPECT_EQ(a, sample_distinct_instances(size, 10, 99, SizeAxis::total_qubits));
        ASSERT_EQ(a.size(), 10u);
        std::vector<std::uint64_t> sorted = a;
        std::sort(sorted.begin(), sorted.end());
        EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
        for (auto N : a) EXPECT_EQ(factor_layout(N).n, size);
    }
    EXPECT_NE(sample_distinct_instances(14, 10, 1, SizeAxis::total_qubits),
              sample_distinct_instances(14, 10, 2, SizeAxis::total_qubits));
    for (auto N : sample_distinct_instances(9, 5, 1, SizeAxis::input_bits)) EXPECT_EQ(factor_layout(N).ell, 9u);
}

TEST(Scaling, ReproducibleAndThreadIndependent) {
    ScalingConfig cfg;
    cfg.sizes = {2, 3, 5};
    cfg.samples_per_size = 3;
    cfg.window = {0.3, 0.31};
    cfg.threads = 1;
    const ScalingReport a = run_scaling_study(cfg);
    cfg.threads = 3;
    const ScalingReport b = run_scaling_study(cfg);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].N, b.records[i].N);
        EXPECT_EQ(a.records[i].T_star, b.records[i].T_star);
        EXPECT_EQ(a.records[i].status, b.records[i].status);
    }
    ASSERT_TRUE(a.fit.has_value());
    EXPECT_EQ(a.fit->a, b.fit->a);
    EXPECT_EQ(a.fit->c, b.fit->c);
    for (const auto& m : a.means) EXPECT_GT(m.succeeded, 0u);
}

TEST(Scaling, FailuresAreRecordedNotDropped) {
    ScalingConfig cfg;
    cfg.sizes = {5};
    cfg.samples_per_size = 2;
    cfg.window = {0.3, 0.31};
    cfg.search.max_evaluations = 2;
    const ScalingReport report = run_scaling_study(cfg);
    ASSERT_EQ(report.records.size(), 2u);
    for (const auto& rec : report.records) {
        EXPECT_EQ(rec.status, RecordStatus::window_unreachable);
        EXPECT_FALSE(rec.message.empty());
    }
    EXPECT_EQ(report.means.front().succeeded, 0u);
}

TEST(Scaling, MixSeedSeparatesStreams) {
    EXPECT_NE(mix_seed(1, 7, 0), mix_seed(1, 7, 1));
    EXPECT_NE(mix_seed(1, 7, 0), mix_seed(1, 8, 0));
    EXPECT_NE(mix_seed(1, 7, 0), mix_seed(2, 7, 0));
    EXPECT_EQ(mix_seed(1, 7, 0), mix_seed(1, 7, 0));
}

TEST(Showcase, Defaults) {
    const ShowcaseBundle bundle = showcase();
    EXPECT_EQ(bundle.target, 7u);
    EXPECT_EQ(bundle.spectrum.s.size(), 101u);
    EXPECT_NEAR(bundle.spectrum.levels.back().front(), 0.0, 1e-9);
    EXPECT_NEAR(bundle.spectrum.levels.front().front(), -90.0, 1e-9);
    EXPECT_EQ(bundle.continuous.snapshots.size(), 6u);
    EXPECT_EQ(bundle.discrete.snapshots.size(), 7u);
    const auto& pops = bundle.continuous.final_state.populations();
    EXPECT_EQ(std::max_element(pops.begin(), pops.end()) - pops.begin(), 7);
    EXPECT_GE(bundle.continuous_fidelity, 0.8);
    EXPECT_NEAR(bundle.trotter_overlap, std::sqrt(bundle.trotter_fidelity), 1e-15);
}

TEST(Showcase, CanonicalSolutionPrefersSmallerX) {
    const CostDiagonal diag = diag_of(35);
    const FactorPair f = decode_basis(canonical_solution(diag), diag.instance);
    EXPECT_EQ(f, (FactorPair{5, 7}));
}
