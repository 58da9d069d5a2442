#pragma once

#include "irrevflow/maps.hpp"

namespace irrevflow {

// How the i0+ in the Cauchy kernel -1/(2 pi i) * 1/(E' - E + i0+) is handled.
struct RegularizationPolicy {
    enum class Kind { sokhotski_plemelj, epsilon_shift };
    Kind kind = Kind::sokhotski_plemelj;
    double epsilon = 0;  // epsilon_shift only; 0 means the grid spacing
};

// Direct discretization of the kernel. Sokhotski-Plemelj: 1/2 on the
// diagonal plus (i / 2 pi) sqrt(w_j w_k) / (E_j - E_k) off the diagonal.
OperatorMatrix build_mf_cauchy(EnergyGridPtr grid, RegularizationPolicy policy = {});

// M = Omega_f* Omega_f through the bridge.
OperatorMatrix build_mf_composed(const BridgeConfig& cfg);

// (psi_t, M psi_t) for each time. Times must be sorted and non-negative and
// psi normalized.
std::vector<double> lyapunov_trajectory(const OperatorMatrix& m, const EnergyState& psi,
                                        const std::vector<double>& times);

// Largest increase between consecutive values (negative when strictly
// decreasing).
double max_increment(const std::vector<double>& values);

// U(-t) M U(t).
OperatorMatrix heisenberg_mf(const OperatorMatrix& m, double t);

// (psi, M psi) with the Sokhotski-Plemelj kernel, without assembling M.
double cauchy_expectation(const EnergyState& psi);

}  // namespace irrevflow
