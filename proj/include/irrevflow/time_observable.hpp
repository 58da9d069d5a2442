#pragma once

#include "irrevflow/irreversible.hpp"

namespace irrevflow {

// Eigenvalues within `tolerance` of 0 or 1 snap to that value; any other
// eigenvalue makes the rounding fail with not_projector_like.
struct ProjectorRounding {
    double tolerance = 0.1;
};

struct RoundedProjector {
    Eigen::MatrixXcd projector;
    int rank = 0;
    double rounding_defect = 0;  // largest |eigenvalue - snapped value|
};

// Rounds the Hermitian part of `a`.
RoundedProjector round_to_projector(const Eigen::MatrixXcd& a, ProjectorRounding rounding = {});

// Full-grid projections: future(t) = round(Z*Z), past(t) = id - future(t),
// where id is the retained projector of Lambda (the identity of the space
// Z acts on).
OperatorMatrix future_projection(const OperatorMatrix& z, ProjectorRounding rounding = {});
OperatorMatrix past_projection(const OperatorMatrix& z, const OperatorMatrix& identity,
                               ProjectorRounding rounding = {});

// P_{t]} on an increasing time grid starting at 0. Projections are stored in
// the coordinates of an orthonormal basis B (n x r) of the retained
// subspace, where the identity is I_r; the grid operator is B P B*.
// Z*Z has its range in span B, so the compression loses nothing.
struct SpectralMeasureApprox {
    EnergyGridPtr grid;
    std::vector<double> times;
    Eigen::MatrixXcd basis;
    std::vector<Eigen::MatrixXcd> past;      // r x r
    std::vector<double> rounding_defects;   // per time

    int dimension() const { return static_cast<int>(basis.cols()); }
    OperatorMatrix projection(std::size_t k) const;
};

// z_family[k] is Z(times[k]).
SpectralMeasureApprox build_spectral_measure(const std::vector<double>& times,
                                             const std::vector<OperatorMatrix>& z_family,
                                             const Eigen::MatrixXcd& basis,
                                             ProjectorRounding rounding = {});

// mu((times[k], times[k + 1]]) = P_{t_{k+1}]} - P_{t_k]}, basis coordinates.
Eigen::MatrixXcd interval_measure(const SpectralMeasureApprox& m, std::size_t k);

// (psi, mu([times[k], inf)) psi) for psi in orthonormal grid coordinates.
double future_mass(const SpectralMeasureApprox& m, std::size_t k, const Eigen::VectorXcd& psi);

// sum_k t_mid (psi, mu((t_k, t_{k+1}]) psi) / ||psi||^2 over the time grid.
double time_operator_expectation(const SpectralMeasureApprox& m, const EnergyState& psi);

// ||B* (Z Z* - Z* Z) B - P_{t_k]}||: distance of the commutator form from the
// past projector in use.
double commutator_defect(const SpectralMeasureApprox& m, std::size_t k, const OperatorMatrix& z);

struct ProjectorDefects {
    double idempotency = 0;    // max ||P^2 - P||
    double hermiticity = 0;    // max ||P - P*||
    double complement = 0;     // max ||F^2 - F|| for the future projector F = I - P
    double nesting = 0;        // max ||P_{t1]} P_{t2]} - P_{t1]}||, t1 <= t2
    double interval_psd = 0;   // most negative eigenvalue over interval measures, as a positive number
    double telescoping = 0;    // ||sum of interval measures - (P_{t_max]} - P_{0]})||
    bool rank_monotone = true;
    std::vector<int> ranks;
};

ProjectorDefects projector_defects(const SpectralMeasureApprox& m);

}  // namespace irrevflow
