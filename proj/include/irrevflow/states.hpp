#pragma once

#include <cstdint>
#include <functional>

#include "irrevflow/grid.hpp"

namespace irrevflow {

enum class StateFamily { exp_decay, gaussian_bump, rational, random_seeded };

StateFamily parse_family(const std::string& name);
std::string family_name(StateFamily f);

// Named families of energy wavefunctions. Unused parameters are ignored.
//   exp-decay:     sqrt(2 rate) exp(-rate E)
//   gaussian-bump: exp(-(E - center)^2 / (2 width^2)) exp(-i slope E)
//   rational:      1 / (E - center + i width)
//   random-seeded: three gaussian bumps with seeded centers in
//                  [0.15, 0.85] e_max, widths in [0.5, 3] (at most 0.1 e_max),
//                  complex coefficients and phase slopes in [-2, 2]
struct StateSpec {
    StateFamily family = StateFamily::exp_decay;
    double rate = 1.0;
    double center = 10.0;
    double width = 2.0;
    double slope = 0.0;
    std::uint64_t seed = 0;
};

std::function<cd(double)> state_function(const StateSpec& spec, double e_max);

// Samples the family on the grid and normalizes with the grid's quadrature.
EnergyState make_family_state(const StateSpec& spec, EnergyGridPtr grid);

// The real part of a state's samples, normalized.
EnergyState real_part_state(const EnergyState& psi);

}  // namespace irrevflow
