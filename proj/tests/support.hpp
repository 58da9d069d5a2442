#pragma once

#include <numbers>
#include <random>

#include "irrevflow/maps.hpp"

namespace testing {

using irrevflow::cd;

// Energy grid with spacing 16 pi / n and a line grid sharing that spacing.
inline irrevflow::EnergyGridPtr energy_grid(int n)
{
    const double h = 16 * std::numbers::pi / n;
    return irrevflow::make_energy_grid((n - 1) * h, n, irrevflow::QuadratureRule::trapezoid);
}

inline irrevflow::BridgeConfig bridge(int n, double l_min = 200)
{
    auto e = energy_grid(n);
    return irrevflow::make_bridge(e, irrevflow::aligned_line_grid(*e, l_min));
}

inline Eigen::VectorXcd random_vector(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(n);
    for (int k = 0; k < n; ++k) v[k] = cd(g(rng), g(rng));
    return v;
}

inline Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng)
{
    Eigen::MatrixXcd a(n, n);
    for (int k = 0; k < n; ++k) a.col(k) = random_vector(n, rng);
    return 0.5 * (a + a.adjoint());
}

}  // namespace testing
