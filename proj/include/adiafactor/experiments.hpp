#pragma once

// Studies built on the evolution engine: window-time search, the scaling
// sweep over qubit counts with a quadratic fit, and the N = 21 showcase.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "adiafactor/encoding.hpp"
#include "adiafactor/errors.hpp"
#include "adiafactor/evolution.hpp"
#include "adiafactor/hamiltonian.hpp"
#include "adiafactor/schedule.hpp"
#include "adiafactor/state.hpp"

namespace adiafactor {

struct ProbabilityWindow {
    double lo = 0.12;
    double hi = 0.13;

    bool contains(double p) const noexcept { return p >= lo && p <= hi; }

    void validate() const {
        if (!(lo > 0.0 && lo < hi && hi <= 1.0)) throw InvalidArgument("window must satisfy 0 < lo < hi <= 1");
    }
    friend bool operator==(const ProbabilityWindow&, const ProbabilityWindow&) = default;
};

// ---------------------------------------------------------------------------
// Window-time search

struct WindowSearchOptions {
    double initial_time = 1e-3;
    double resolution = 0.01;        ///< relative bracket width at which bisection may stop
    unsigned max_evaluations = 60;
    double rk4_safety = 0.05;
    double max_norm_drift = 1e-8;
    CostScaling scaling;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct Probe {
    double time = 0.0;
    double probability = 0.0;
};

struct TimeSearchResult {
    FactorInstance instance;
    double T_star = 0.0;
    double achieved_probability = 0.0;
    unsigned evaluations = 0;
    /// The T -> 0 limit (the initial state) already lies in the window; T_star is 0.
    bool in_window_at_start = false;
    std::vector<Probe> probes;
};

/// Success probability after continuous evolution for time `total_time`.
inline double final_success_probability(const CostDiagonal& diag, double g, unsigned r, double total_time,
                                        const WindowSearchOptions& opts = {}) {
    EvolutionParams params;
    params.g = g;
    params.diag = diag;
    params.schedule = Schedule::continuous(total_time, r);
    params.rk4_safety = opts.rk4_safety;
    params.max_norm_drift = opts.max_norm_drift;
    params.scaling = opts.scaling;
    params.deadline = opts.deadline;
    return success_probability(evolve_continuous(params).final_state, diag);
}

/// Probability of the zero-cost states in the initial (uniform-magnitude) state.
inline double initial_success_probability(const CostDiagonal& diag) {
    return static_cast<double>(diag.solutions().size()) / static_cast<double>(diag.costs.size());
}

/// Smallest evolution time whose success probability lies in `window`.
///
/// Doubles T from the initial guess until the probability reaches window.lo,
/// then bisects the bracket on the predicate p(T) >= window.lo. Bisection keeps
/// the lowest upper end whose probability is inside the window; when the
/// bracket is below resolution but its upper end overshoots window.hi, it keeps
/// subdividing until a hit or the evaluation budget runs out.
inline TimeSearchResult find_window_time(const CostDiagonal& diag, double g, unsigned r, ProbabilityWindow window,
                                         const WindowSearchOptions& opts = {}) {
    window.validate();
    if (!(opts.initial_time > 0.0) || !(opts.resolution > 0.0 && opts.resolution < 1.0)) {
        throw InvalidArgument("window search needs a positive initial time and a resolution in (0, 1)");
    }
    TimeSearchResult result;
    result.instance = diag.instance;

    const double start = initial_success_probability(diag);
    if (start > window.hi) {
        std::ostringstream msg;
        msg << "initial success probability " << start << " already exceeds the window [" << window.lo << ", "
            << window.hi << "]";
        throw InvalidArgument(msg.str());
    }
    if (window.contains(start)) {
        result.in_window_at_start = true;
        result.achieved_probability = start;
        return result;
    }

    auto probe = [&](double T) {
        if (result.evaluations >= opts.max_evaluations) {
            std::ostringstream msg;
            msg << "window [" << window.lo << ", " << window.hi << "] not reached for N=" << diag.instance.N
                << " within " << opts.max_evaluations << " evolutions; probes:";
            for (const auto& p : result.probes) msg << " (" << p.time << ", " << p.probability << ")";
            throw WindowUnreachable(msg.str());
        }
        ++result.evaluations;
        const double p = final_success_probability(diag, g, r, T, opts);
        result.probes.push_back({T, p});
        return p;
    };

    double lower = 0.0;  // p(lower) < window.lo; 0 stands for the initial state
    double upper = opts.initial_time;
    double upper_p = probe(upper);
    while (upper_p < window.lo) {
        lower = upper;
        upper *= 2.0;
        upper_p = probe(upper);
    }

    std::optional<Probe> best;
    if (window.contains(upper_p)) best = Probe{upper, upper_p};
    while (!best || (upper - lower) > opts.resolution * upper) {
        const double mid = 0.5 * (lower + upper);
        const double p = probe(mid);
        if (p < window.lo) {
            lower = mid;
        } else {
            upper = mid;
            if (window.contains(p)) best = Probe{mid, p};
        }
    }
    result.T_star = best->time;
    result.achieved_probability = best->probability;
    return result;
}

// ---------------------------------------------------------------------------
// Quadratic fit

struct QuadraticFit {
    double a = 0.0;  ///< constant
    double b = 0.0;  ///< linear
    double c = 0.0;  ///< quadratic
    double rmse = 0.0;
    double r_squared = 0.0;

    double operator()(double n) const noexcept { return a + b * n + c * n * n; }
};

struct FitPoint {
    double n = 0.0;
    double value = 0.0;
};

/// Least-squares a + b n + c n^2 (QR on the Vandermonde design matrix).
inline QuadraticFit quadratic_fit(const std::vector<FitPoint>& points) {
    std::set<double> distinct;
    for (const auto& p : points) distinct.insert(p.n);
    if (distinct.size() < 3) throw InvalidArgument("quadratic fit needs at least 3 distinct abscissae");

    const auto rows = static_cast<Eigen::Index>(points.size());
    // Centre and scale the abscissae so the design matrix stays well conditioned.
    double centre = 0.0;
    for (const auto& p : points) centre += p.n;
    centre /= static_cast<double>(points.size());
    double spread = 0.0;
    for (const auto& p : points) spread = std::max(spread, std::abs(p.n - centre));

    Eigen::MatrixXd design(rows, 3);
    Eigen::VectorXd values(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double u = (points[static_cast<std::size_t>(i)].n - centre) / spread;
        design(i, 0) = 1.0;
        design(i, 1) = u;
        design(i, 2) = u * u;
        values(i) = points[static_cast<std::size_t>(i)].value;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 3) throw InvalidArgument("quadratic fit design matrix is rank deficient");
    const Eigen::Vector3d w = qr.solve(values);

    // value = w0 + w1 u + w2 u^2 with u = (n - centre) / spread
    QuadraticFit fit;
    const double k = 1.0 / spread;
    fit.c = w(2) * k * k;
    fit.b = w(1) * k - 2.0 * w(2) * k * k * centre;
    fit.a = w(0) - w(1) * k * centre + w(2) * k * k * centre * centre;

    double mean = 0.0;
    for (const auto& p : points) mean += p.value;
    mean /= static_cast<double>(points.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    const Eigen::VectorXd predicted = design * w;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double resid = values(i) - predicted(i);
        ss_res += resid * resid;
        ss_tot += (values(i) - mean) * (values(i) - mean);
    }
    fit.rmse = std::sqrt(ss_res / static_cast<double>(points.size()));
    fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
    return fit;
}

// ---------------------------------------------------------------------------
// Scaling study

/// How the sweep's size axis is read: total qubits n, or bit length of N.
enum class SizeAxis { total_qubits, input_bits };

inline std::string to_string(SizeAxis axis) { return axis == SizeAxis::total_qubits ? "total_qubits" : "input_bits"; }

struct ScalingConfig {
    std::vector<unsigned> sizes;
    unsigned samples_per_size = 10;
    double g = 30.0;
    unsigned r = 2;
    ProbabilityWindow window;
    std::uint64_t seed = 2010;
    SizeAxis axis = SizeAxis::total_qubits;
    WindowSearchOptions search;
    unsigned threads = 0;  ///< 0: hardware concurrency
};

enum class RecordStatus { ok, window_unreachable, numerical_failure, deadline_exceeded };

inline std::string to_string(RecordStatus status) {
    switch (status) {
        case RecordStatus::ok: return "ok";
        case RecordStatus::window_unreachable: return "window_unreachable";
        case RecordStatus::numerical_failure: return "numerical_failure";
        case RecordStatus::deadline_exceeded: return "deadline_exceeded";
    }
    return "unknown";
}

struct ScalingRecord {
    unsigned size = 0;        ///< value on the configured axis
    unsigned ordinal = 0;     ///< instance ordinal within its size
    std::uint64_t N = 0;
    unsigned qubits = 0;
    double T_star = 0.0;
    double achieved_probability = 0.0;
    unsigned evaluations = 0;
    RecordStatus status = RecordStatus::ok;
    std::string message;
};

struct SizeSummary {
    unsigned size = 0;
    unsigned requested = 0;
    unsigned available = 0;   ///< distinct instances that exist (capped at the request when sampling)
    unsigned succeeded = 0;
    double mean_T_star = 0.0;
};

struct ScalingReport {
    ScalingConfig config;
    std::vector<ScalingRecord> records;
    std::vector<SizeSummary> means;
    std::optional<QuadraticFit> fit;
};

/// splitmix64 finalizer; mixes (seed, size, ordinal) into independent stream seeds.
inline constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ (b * 0xD6E8FEB86659FD93ULL));
}

inline std::optional<OddRange> size_range(unsigned size, SizeAxis axis) {
    return axis == SizeAxis::total_qubits ? layout_range(size) : bit_length_range(size);
}

/// Distinct instances for one size, sampled without replacement.
inline std::vector<std::uint64_t> sample_distinct_instances(unsigned size, unsigned count, std::uint64_t seed,
                                                            SizeAxis axis) {
    const auto range = size_range(size, axis);
    if (!range) return {};
    const SamplingOptions sampling;
    if (range->odd_count() <= sampling.enumerate_below) {
        auto all = odd_semiprimes_in(*range);
        if (all.size() <= count) return all;
    }
    std::vector<std::uint64_t> chosen;
    std::set<std::uint64_t> seen;
    for (std::uint64_t attempt = 0; chosen.size() < count; ++attempt) {
        if (attempt > 1000ull * count) {
            throw SamplingExhausted("could not draw " + std::to_string(count) + " distinct instances of size " +
                                    std::to_string(size));
        }
        const std::uint64_t N = sample_odd_semiprime(*range, mix_seed(seed, size, attempt), sampling);
        if (seen.insert(N).second) chosen.push_back(N);
    }
    return chosen;
}

namespace detail {

inline ScalingRecord run_scaling_instance(const ScalingConfig& cfg, unsigned size, unsigned ordinal, std::uint64_t N) {
    ScalingRecord rec;
    rec.size = size;
    rec.ordinal = ordinal;
    rec.N = N;
    try {
        const CostDiagonal diag = build_cost_diagonal(factor_layout(N));
        rec.qubits = diag.instance.n;
        const TimeSearchResult res = find_window_time(diag, cfg.g, cfg.r, cfg.window, cfg.search);
        rec.T_star = res.T_star;
        rec.achieved_probability = res.achieved_probability;
        rec.evaluations = res.evaluations;
    } catch (const WindowUnreachable& e) {
        rec.status = RecordStatus::window_unreachable;
        rec.message = e.what();
    } catch (const DeadlineExceeded& e) {
        rec.status = RecordStatus::deadline_exceeded;
        rec.message = e.what();
    } catch (const NumericalFailure& e) {
        rec.status = RecordStatus::numerical_failure;
        rec.message = e.what();
    }
    return rec;
}

/// Runs fn(i) for i in [0, count) on a small worker pool.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next++; i < count; i = next++) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace detail

/// Sweeps the configured sizes; each instance is searched independently and
/// results are reduced in (size, ordinal) order, so the report does not depend
/// on scheduling.
inline ScalingReport run_scaling_study(const ScalingConfig& cfg) {
    if (cfg.sizes.empty()) throw InvalidArgument("scaling study needs at least one size");
    if (cfg.samples_per_size < 1) throw InvalidArgument("samples per size must be at least 1");
    if (!(cfg.g > 0.0) || cfg.r < 1) throw InvalidArgument("scaling study needs g > 0 and r >= 1");
    cfg.window.validate();

    ScalingReport report;
    report.config = cfg;

    struct Job {
        unsigned size;
        unsigned ordinal;
        std::uint64_t N;
    };
    std::vector<Job> jobs;
    for (unsigned size : cfg.sizes) {
        const auto instances = sample_distinct_instances(size, cfg.samples_per_size, cfg.seed, cfg.axis);
        SizeSummary summary;
        summary.size = size;
        summary.requested = cfg.samples_per_size;
        summary.available = static_cast<unsigned>(instances.size());
        report.means.push_back(summary);
        for (unsigned i = 0; i < instances.size(); ++i) jobs.push_back({size, i, instances[i]});
    }

    report.records.resize(jobs.size());
    detail::parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
        report.records[i] = detail::run_scaling_instance(cfg, jobs[i].size, jobs[i].ordinal, jobs[i].N);
    });

    std::vector<FitPoint> points;
    for (auto& summary : report.means) {
        double total = 0.0;
        for (const auto& rec : report.records) {
            if (rec.size == summary.size && rec.status == RecordStatus::ok) {
                total += rec.T_star;
                ++summary.succeeded;
            }
        }
        if (summary.succeeded > 0) {
            summary.mean_T_star = total / summary.succeeded;
            points.push_back({static_cast<double>(summary.size), summary.mean_T_star});
        }
    }
    std::set<double> distinct;
    for (const auto& p : points) distinct.insert(p.n);
    if (distinct.size() >= 3) report.fit = quadratic_fit(points);
    return report;
}

// ---------------------------------------------------------------------------
// N = 21 showcase

struct ShowcaseConfig {
    std::uint64_t N = 21;
    double g = 30.0;
    unsigned r = 2;
    double total_time = 0.168;  ///< continuous mode
    unsigned steps = 5;         ///< discrete mode M
    double tau = 0.028;         ///< discrete mode step duration
    unsigned grid_points = 101;
    unsigned trace_points = 6;  ///< continuous mode snapshots, endpoints included
    double rk4_safety = 0.05;
};

struct SpectrumSweep {
    std::vector<double> s;
    std::vector<std::vector<double>> levels;  ///< levels[i] = ascending eigenvalues at s[i]
};

struct ShowcaseBundle {
    ShowcaseConfig config;
    FactorInstance instance;
    BasisIndex target = 0;
    SpectrumSweep spectrum;
    Trajectory continuous;
    Trajectory discrete;
    double trotter_fidelity = 0.0;
    double trotter_overlap = 0.0;
    double continuous_fidelity = 0.0;
    double trotter_success = 0.0;
    double continuous_success = 0.0;
};

inline SpectrumSweep spectrum_sweep(const Hamiltonian& h, unsigned grid_points, std::size_t levels) {
    if (grid_points < 2) throw InvalidArgument("spectrum sweep needs at least 2 grid points");
    SpectrumSweep sweep;
    for (unsigned i = 0; i < grid_points; ++i) {
        const double s = static_cast<double>(i) / (grid_points - 1);
        sweep.s.push_back(s);
        sweep.levels.push_back(spectrum(h, s, levels));
    }
    return sweep;
}

/// Solution index with x <= y, the canonical factor-encoding state.
inline BasisIndex canonical_solution(const CostDiagonal& diag) {
    for (BasisIndex j : diag.solutions()) {
        const FactorPair f = decode_basis(j, diag.instance);
        if (f.x <= f.y) return j;
    }
    throw InvalidInstance("no zero-cost basis state with x <= y for N=" + std::to_string(diag.instance.N));
}

inline ShowcaseBundle showcase(const ShowcaseConfig& cfg = {}) {
    ShowcaseBundle out;
    out.config = cfg;
    out.instance = factor_layout(cfg.N);
    const CostDiagonal diag = build_cost_diagonal(out.instance);
    out.target = canonical_solution(diag);
    const Hamiltonian h = make_hamiltonian(diag, cfg.g);
    out.spectrum = spectrum_sweep(h, cfg.grid_points, h.dimension());

    EvolutionParams discrete;
    discrete.g = cfg.g;
    discrete.diag = diag;
    discrete.schedule = Schedule::discrete(cfg.steps, cfg.tau, cfg.r);
    out.discrete = evolve_trotter(discrete);

    EvolutionParams continuous = discrete;
    continuous.schedule = Schedule::continuous(cfg.total_time, cfg.r);
    continuous.rk4_safety = cfg.rk4_safety;
    continuous.trace_points = cfg.trace_points;
    out.continuous = evolve_continuous(continuous);

    out.trotter_fidelity = fidelity(out.discrete.final_state, out.target);
    out.trotter_overlap = overlap(out.discrete.final_state, out.target);
    out.continuous_fidelity = fidelity(out.continuous.final_state, out.target);
    out.trotter_success = success_probability(out.discrete.final_state, diag);
    out.continuous_success = success_probability(out.continuous.final_state, diag);
    return out;
}

}  // namespace adiafactor
