// Factor 21 = 3 x 7 on three qubits, continuous and Trotterized.

#include <cstdio>

#include "adiafactor/adiafactor.hpp"

using namespace adiafactor;

int main() {
    const CostDiagonal diag = build_cost_diagonal(factor_layout(21));
    const unsigned n = diag.instance.n;
    std::printf("N = 21 on %u qubits (n_x = %u, n_y = %u)\n", n, diag.instance.n_x, diag.instance.n_y);
    for (BasisIndex j = 0; j < diag.costs.size(); ++j) {
        const FactorPair f = decode_basis(j, diag.instance);
        std::printf("  |%s>  x=%llu y=%llu  cost=%llu\n", basis_label(j, n).c_str(), (unsigned long long)f.x,
                    (unsigned long long)f.y, (unsigned long long)diag.costs[j]);
    }

    for (double T : {0.168, 1.68}) {
        EvolutionParams p;
        p.diag = diag;
        p.schedule = Schedule::continuous(T, 2.0);
        const Trajectory traj = evolve(p);
        std::printf("continuous T = %.3f: P(solution) = %.6f\n", T, success_probability(traj.final_state, diag));
    }

    EvolutionParams p;
    p.diag = diag;
    p.schedule = Schedule::discrete(5, 0.028, 2.0);
    const Trajectory traj = evolve(p);
    const BasisIndex target = canonical_solution(diag);
    std::printf("trotter M = 5, tau = 0.028: |<%s|psi>| = %.4f\n", basis_label(target, n).c_str(),
                overlap(traj.final_state, target));
}
