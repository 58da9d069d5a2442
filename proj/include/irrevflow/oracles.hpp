#pragma once

#include <functional>

#include "irrevflow/grid.hpp"

namespace irrevflow {

// Reference values computed without the matrices, FFTs or Hardy filters of
// the modules they check.

enum class OracleMethod { epsilon_richardson, residue, frequency_shift };

std::string method_name(OracleMethod m);

struct OracleReport {
    cd value;
    double estimated_error = 0;
    OracleMethod method = OracleMethod::epsilon_richardson;
};

// (psi, M psi) from the shifted kernel (i / 2 pi) / (E' - E + i eps) as a
// literal double integral, extrapolated to eps -> 0.
//
// The samples are interpolated by local cubics onto a grid `refine` times
// finer; the double sum is then sum_d K_eps(d h) C(d) with C the direct
// (non-FFT) weighted autocorrelation. With three or more levels the last
// three are fitted to V0 + a eps log eps + b eps, which also removes the
// bias of states that do not vanish at the grid ends; the error is the larger
// of the fit's distance to the first-order Richardson extrapolant and the gap
// between the last two such extrapolants. With two levels the value is the
// first-order extrapolant and the error the gap between the levels.
OracleReport oracle_mf_expectation(const EnergyState& psi, const std::vector<double>& epsilons,
                                   int refine = 8);

// Default ladder {4h, 2h, h} with h the energy grid spacing.
std::vector<double> default_epsilon_ladder(const EnergyGrid& grid);

// Image of 1/(s - pole) under P+ exp(-i s t): exp(-i pole t) / (s - pole).
// Only the part of exp(-i s t) equal to its value at the pole survives the
// projection; the remainder is analytic below the axis.
std::function<cd(double)> oracle_toeplitz_rational(double t, cd pole);

// Value at z of the upper-half-plane extension of 1/(x - pole): 1/(z - pole)
// by the residue at x = z.
cd oracle_titchmarsh_rational(cd pole, cd z);

}  // namespace irrevflow
