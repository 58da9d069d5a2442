#pragma once

#include "irrevflow/hardy.hpp"

namespace irrevflow {

enum class Interpolation { nearest, linear };

// Transfer between the energy grid and the line grid.
//
// nearest: every energy node must coincide with a line node and both grids
// must share the spacing. Sample psi_j goes to its node scaled by
// sqrt(w_j / spacing), which makes the embedding an isometry and lets
// exp(-iHt) and exp(-i s t) commute with it exactly.
//
// linear: the embedded function is the piecewise-linear interpolant of the
// samples on [E_0, E_{n-1}], zero elsewhere. Intended for convergence studies.
struct BridgeConfig {
    EnergyGridPtr energy;
    LineGridPtr line;
    Interpolation interpolation = Interpolation::nearest;
    std::vector<int> node_index;  // nearest: line node of each energy node
};

BridgeConfig make_bridge(EnergyGridPtr energy, LineGridPtr line,
                         Interpolation interpolation = Interpolation::nearest);

// Line grid aligned with a uniform trapezoid energy grid: same spacing,
// energy nodes on line nodes, half-width l_min or more.
LineGridPtr aligned_line_grid(const EnergyGrid& energy, double l_min);

// theta: inclusion of the half-line into the line (zero for s < 0).
LineFunction embed(const EnergyState& psi, const BridgeConfig& cfg);
// theta*: restriction to s >= 0, resampled on the energy grid.
EnergyState restrict_to_energy(const LineFunction& f, const BridgeConfig& cfg);

// Column versions acting on orthonormal energy coordinates and orthonormal
// line coordinates (sqrt(spacing) * samples).
void embed_coords(const BridgeConfig& cfg, const cd* energy_coords, cd* line_coords);
void restrict_coords(const BridgeConfig& cfg, const cd* line_coords, cd* energy_coords);

// Omega_f = P+ theta.
HardyFunction omega_f_apply(const EnergyState& psi, const BridgeConfig& cfg);
// Omega_f* = theta* restricted to H2+ inputs.
EnergyState omega_f_adjoint_apply(const HardyFunction& f, const BridgeConfig& cfg);

// theta* P+ exp(-i s t) P+ theta as an n x n matrix in orthonormal energy
// coordinates. At t = 0 this is Omega_f* Omega_f.
Eigen::MatrixXcd compressed_toeplitz(const BridgeConfig& cfg, double t);

struct QuasiAffineReport {
    double min_singular_value = 0;
    double max_singular_value = 0;
    int rank = 0;
    double range_defect = 0;  // 1 - rank / n
    bool injective = false;
};

// Singular values of a matrix in orthonormal coordinates. Rank counts
// singular values above rank_tol * largest.
QuasiAffineReport quasi_affine_report(const Eigen::MatrixXcd& a, double rank_tol = 1e-12);

}  // namespace irrevflow
