#pragma once

// Continuous (RK4) and discrete (symmetric Trotter) evolution under
// H(t) = [1 - s(t)] H_0 + s(t) H_P, starting from the ground state of H_0.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "adiafactor/encoding.hpp"
#include "adiafactor/errors.hpp"
#include "adiafactor/hamiltonian.hpp"
#include "adiafactor/schedule.hpp"
#include "adiafactor/state.hpp"

namespace adiafactor {

struct EvolutionParams {
    double g = 30.0;
    CostDiagonal diag;
    Schedule schedule;
    double rk4_safety = 0.05;        ///< continuous mode: dt <= rk4_safety / spectral_bound
    unsigned trace_points = 2;       ///< continuous mode: equidistant snapshots including t = 0 and t = T
    double max_norm_drift = 1e-8;    ///< continuous mode: allowed | |psi|^2 - 1 | at the end
    unsigned min_rk4_steps = 64;     ///< continuous mode: floor on steps so s(t) is resolved when T ~ 1/spectral_bound
    CostScaling scaling;
    std::optional<std::chrono::steady_clock::time_point> deadline;  ///< checked between RK4 blocks

    const FactorInstance& instance() const noexcept { return diag.instance; }

    void validate() const {
        if (!(g > 0.0)) throw InvalidArgument("transverse field g must be positive");
        if (diag.instance.n == 0 || diag.instance.n > kMaxQubits) {
            throw DimensionError("qubit count outside [1, " + std::to_string(kMaxQubits) + "]");
        }
        if (diag.costs.size() != diag.instance.dimension()) throw DimensionError("cost diagonal does not match its instance");
        schedule.validate();
        if (schedule.mode == EvolutionMode::continuous) {
            if (!(rk4_safety > 0.0 && rk4_safety <= 0.5)) throw InvalidArgument("rk4 safety factor must lie in (0, 0.5]");
            if (trace_points < 2) throw InvalidArgument("trace_points must be at least 2");
        }
    }
};

struct Snapshot {
    std::size_t index = 0;  ///< snapshot ordinal; discrete mode: number of steps applied
    double time = 0.0;
    std::vector<double> populations;
    double success_probability = 0.0;
};

struct Trajectory {
    std::vector<Snapshot> snapshots;
    StateVector final_state;
    std::uint64_t steps = 0;      ///< RK4 steps or Trotter steps taken
    double dt = 0.0;              ///< RK4 step, or tau
    double norm_drift = 0.0;      ///< continuous: final | |psi|^2 - 1 |; discrete: largest per-step change
};

namespace detail {

inline Snapshot take_snapshot(std::size_t index, double time, const StateVector& psi, const CostDiagonal& diag) {
    return {index, time, psi.populations(), success_probability(psi, diag)};
}

/// out = -i * H(s) * in
inline void schrodinger_rhs(const Hamiltonian& h, double s, std::span<const Amplitude> in, std::span<Amplitude> out) {
    apply_hamiltonian(h, s, in, out);
    for (auto& a : out) a = Amplitude{a.imag(), -a.real()};
}

/// exp(-i * angle * sigma_x) on every qubit.
inline void rotate_all_x(StateVector& psi, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const Amplitude minus_i_sin{0.0, -s};
    const std::size_t dim = psi.dimension();
    for (unsigned k = 0; k < psi.qubits(); ++k) {
        const std::size_t bit = std::size_t{1} << k;
        for (std::size_t j = 0; j < dim; ++j) {
            if (j & bit) continue;
            const Amplitude a = psi[j];
            const Amplitude b = psi[j | bit];
            psi[j] = c * a + minus_i_sin * b;
            psi[j | bit] = c * b + minus_i_sin * a;
        }
    }
}

/// exp(-i * duration * diag(costs)).
inline void apply_cost_phase(StateVector& psi, const std::vector<double>& costs, double duration) {
    for (std::size_t j = 0; j < psi.dimension(); ++j) {
        psi[j] *= std::polar(1.0, -duration * costs[j]);
    }
}

}  // namespace detail

/// One symmetric splitting step e^{-i H_0 (1-s) tau/2} e^{-i H_P s tau} e^{-i H_0 (1-s) tau/2}.
/// A negative tau applies the inverse step.
inline void apply_trotter_step(StateVector& psi, const Hamiltonian& h, double s, double tau) {
    if (psi.dimension() != h.dimension()) throw DimensionError("state size does not match the Hamiltonian");
    const double half_angle = h.g * (1.0 - s) * tau / 2.0;
    detail::rotate_all_x(psi, half_angle);
    detail::apply_cost_phase(psi, h.costs, s * tau);
    detail::rotate_all_x(psi, half_angle);
}

/// Integrates i dpsi/dt = H(t) psi with classical RK4 at fixed step.
inline Trajectory evolve_continuous(const EvolutionParams& params) {
    params.validate();
    if (params.schedule.mode != EvolutionMode::continuous) throw InvalidArgument("evolve_continuous needs a continuous schedule");
    const Hamiltonian h = make_hamiltonian(params.diag, params.g, params.scaling);
    const Schedule& sched = params.schedule;

    const double max_dt = std::min(params.rk4_safety / h.spectral_bound(), sched.total_time / std::max(1u, params.min_rk4_steps));
    const unsigned intervals = params.trace_points - 1;
    const double interval = sched.total_time / intervals;
    const auto steps_per_interval = static_cast<std::uint64_t>(std::max(1.0, std::ceil(interval / max_dt)));
    const std::uint64_t total_steps = steps_per_interval * intervals;
    const double dt = sched.total_time / static_cast<double>(total_steps);

    Trajectory traj;
    traj.dt = dt;
    traj.steps = total_steps;
    StateVector psi = initial_state(h.n);
    traj.snapshots.reserve(params.trace_points);
    traj.snapshots.push_back(detail::take_snapshot(0, 0.0, psi, params.diag));

    const std::size_t dim = psi.dimension();
    std::vector<Amplitude> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    auto amp = psi.amplitudes();
    std::uint64_t step = 0;
    for (unsigned point = 1; point <= intervals; ++point) {
        for (std::uint64_t i = 0; i < steps_per_interval; ++i, ++step) {
            const double t = static_cast<double>(step) * dt;
            const double s0 = sched.at_time(t);
            const double s_half = sched.at_time(t + dt / 2.0);
            const double s1 = sched.at_time(t + dt);

            if (params.deadline && (step & 0x3FF) == 0 && std::chrono::steady_clock::now() > *params.deadline) {
                throw DeadlineExceeded("deadline passed after " + std::to_string(step) + " of " +
                                       std::to_string(total_steps) + " RK4 steps");
            }
            detail::schrodinger_rhs(h, s0, amp, k1);
            for (std::size_t j = 0; j < dim; ++j) tmp[j] = amp[j] + (dt / 2.0) * k1[j];
            detail::schrodinger_rhs(h, s_half, tmp, k2);
            for (std::size_t j = 0; j < dim; ++j) tmp[j] = amp[j] + (dt / 2.0) * k2[j];
            detail::schrodinger_rhs(h, s_half, tmp, k3);
            for (std::size_t j = 0; j < dim; ++j) tmp[j] = amp[j] + dt * k3[j];
            detail::schrodinger_rhs(h, s1, tmp, k4);
            for (std::size_t j = 0; j < dim; ++j) amp[j] += (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        traj.snapshots.push_back(detail::take_snapshot(point, static_cast<double>(step) * dt, psi, params.diag));
    }

    traj.norm_drift = std::abs(psi.norm_squared() - 1.0);
    if (traj.norm_drift > params.max_norm_drift) {
        std::ostringstream msg;
        msg << "norm drift " << traj.norm_drift << " exceeds " << params.max_norm_drift << " (dt=" << dt
            << "); lower the RK4 safety factor";
        throw NormDriftExceeded(msg.str());
    }
    traj.final_state = std::move(psi);
    return traj;
}

/// Applies U = prod_{m=0}^{M} U_m, recording a snapshot before the first and after every step.
inline Trajectory evolve_trotter(const EvolutionParams& params) {
    params.validate();
    if (params.schedule.mode != EvolutionMode::discrete) throw InvalidArgument("evolve_trotter needs a discrete schedule");
    const Hamiltonian h = make_hamiltonian(params.diag, params.g, params.scaling);
    const Schedule& sched = params.schedule;

    Trajectory traj;
    traj.dt = sched.tau;
    traj.steps = std::uint64_t{sched.steps} + 1;
    StateVector psi = initial_state(h.n);
    traj.snapshots.push_back(detail::take_snapshot(0, 0.0, psi, params.diag));
    double norm = psi.norm_squared();
    for (unsigned m = 0; m <= sched.steps; ++m) {
        apply_trotter_step(psi, h, sched.at_step(m), sched.tau);
        const double next = psi.norm_squared();
        traj.norm_drift = std::max(traj.norm_drift, std::abs(next - norm));
        norm = next;
        traj.snapshots.push_back(detail::take_snapshot(m + 1, (m + 1) * sched.tau, psi, params.diag));
    }
    traj.final_state = std::move(psi);
    return traj;
}

/// Applies U^dagger for the discrete schedule: the inverse steps in reverse order.
inline void unwind_trotter(const EvolutionParams& params, StateVector& psi) {
    params.validate();
    const Hamiltonian h = make_hamiltonian(params.diag, params.g, params.scaling);
    const Schedule& sched = params.schedule;
    for (unsigned m = sched.steps + 1; m-- > 0;) apply_trotter_step(psi, h, sched.at_step(m), -sched.tau);
}

inline Trajectory evolve(const EvolutionParams& params) {
    return params.schedule.mode == EvolutionMode::continuous ? evolve_continuous(params) : evolve_trotter(params);
}

}  // namespace adiafactor
