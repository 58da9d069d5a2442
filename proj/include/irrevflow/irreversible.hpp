#pragma once

#include "irrevflow/lyapunov.hpp"

namespace irrevflow {

// Relative eigenvalue threshold for inverting Lambda_F.
struct SpectralCutoff {
    double tau = 1e-6;
};

// Positive square root through the eigendecomposition. Throws
// not_positive_semidefinite when an eigenvalue is below -1e-8 * ||M||.
OperatorMatrix sqrt_positive(const OperatorMatrix& m);

// Inverts eigenvalues >= tau * ||A||, zeroes the rest.
OperatorMatrix pinv_spectral(const OperatorMatrix& a, SpectralCutoff cutoff = {});

// One eigendecomposition of M_F serving Lambda, its pseudo-inverse, the
// retained projector and every Z(t).
struct LambdaFactor {
    EnergyGridPtr grid;
    SpectralCutoff cutoff;
    Eigen::VectorXd lambda;      // eigenvalues of Lambda, ascending
    Eigen::MatrixXcd vectors;    // matching eigenvectors (columns)
    int retained = 0;            // the top `retained` eigenpairs are kept
    OperatorMatrix lambda_matrix;  // Lambda itself, assembled once

    int size() const { return static_cast<int>(lambda.size()); }
    int discarded() const { return size() - retained; }
    Eigen::MatrixXcd basis() const;  // n x retained, orthonormal
    const OperatorMatrix& lambda_op() const { return lambda_matrix; }
    OperatorMatrix pinv_op() const;
    OperatorMatrix retained_projector() const;
};

LambdaFactor factor_lambda(const OperatorMatrix& mf, SpectralCutoff cutoff = {});

// Z(t) = Lambda U(t) Lambda^+ (direct path).
OperatorMatrix build_z(double t, const LambdaFactor& f);

// Z(t) = R* T(t) R with R = Omega_f Lambda^+ (Hardy-side conjugation). The
// factor must come from the composed M_F of the same bridge.
OperatorMatrix build_z(double t, const LambdaFactor& f, const BridgeConfig& cfg);

// Spectral norms compressed to the retained subspace.
double retained_norm(const LambdaFactor& f, const Eigen::MatrixXcd& a);

// ||Lambda U(t) - Z(t) Lambda|| / ||Lambda||.
double intertwining_residual(double t, const LambdaFactor& f, const OperatorMatrix& z);
// ||U(-t) Lambda - Lambda Z(t)*|| / ||Lambda||.
double intertwining_adjoint_residual(double t, const LambdaFactor& f, const OperatorMatrix& z);

// R restricted to the retained subspace: columns are R applied to the
// retained eigenvectors, in orthonormal line coordinates.
struct IsometryR {
    BridgeConfig cfg;
    Eigen::MatrixXcd basis;    // n x r energy basis
    Eigen::MatrixXcd columns;  // line_n x r

    LineFunction apply(const EnergyState& psi) const;
};

IsometryR build_r(const BridgeConfig& cfg, const LambdaFactor& f);

// ||R* R - I|| on the retained subspace.
double r_isometry_defect(const IsometryR& r);
// ||Q* (R Z(t) R* - T(t)) Q|| with Q the range of R.
double r_transport_defect(const IsometryR& r, const OperatorMatrix& z, double t);

struct MatrixElement {
    cd reversible;    // (phi, U(-t) Lambda X Lambda U(t) psi)
    cd irreversible;  // (Lambda phi, Z(t)* X Z(t) Lambda psi)
};

MatrixElement irreversible_matrix_element(const OperatorMatrix& x, const EnergyState& phi,
                                          const EnergyState& psi, double t, const LambdaFactor& f,
                                          const OperatorMatrix& z);

// Orthonormal basis of grid vectors whose discrete spectrum is concentrated
// in |frequency| <= fraction * pi / h, keeping Slepian vectors with
// concentration >= min_concentration. Used for resolved-subspace diagnostics.
Eigen::MatrixXcd band_limited_basis(const EnergyGrid& grid, double fraction, double min_concentration);

}  // namespace irrevflow
