#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace irrevflow {

using cd = std::complex<double>;

enum class QuadratureRule { midpoint, trapezoid };

// Truncated half-line [0, e_max] with a quadrature rule. Nodes are uniform.
struct EnergyGrid {
    double e_max = 0;
    int n = 0;
    QuadratureRule rule = QuadratureRule::trapezoid;
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;

    double spacing() const;
};

using EnergyGridPtr = std::shared_ptr<const EnergyGrid>;

EnergyGridPtr make_energy_grid(double e_max, int n, QuadratureRule rule);

QuadratureRule parse_rule(const std::string& name);
std::string rule_name(QuadratureRule rule);

// Uniform grid on [-l, l) with a power-of-two node count.
struct LineGrid {
    double l = 0;
    int n = 0;
    double spacing = 0;

    double node(int k) const { return -l + k * spacing; }
    Eigen::VectorXd nodes() const;
};

using LineGridPtr = std::shared_ptr<const LineGrid>;

LineGridPtr make_line_grid(double l, int n);

// Raw samples psi(E_j). Inner products carry the quadrature weights.
struct EnergyState {
    EnergyGridPtr grid;
    Eigen::VectorXcd amplitudes;

    double norm() const;
};

EnergyState make_state(EnergyGridPtr grid, Eigen::VectorXcd amplitudes);
EnergyState normalized(const EnergyState& psi);

cd inner_product(const EnergyState& a, const EnergyState& b);

// U(t) = exp(-iHt), diagonal in the energy representation.
EnergyState evolve(const EnergyState& psi, double t);

// Coordinates sqrt(w_j) psi_j, in which the weighted inner product is the
// Euclidean one. Operator matrices are stored in these coordinates.
Eigen::VectorXcd to_orthonormal(const EnergyState& psi);
EnergyState from_orthonormal(EnergyGridPtr grid, const Eigen::VectorXcd& coords);

// Phases exp(-i E_j t) as a vector.
Eigen::VectorXcd evolution_phases(const EnergyGrid& grid, double t);

enum class Flag { unknown, asserted, checked };

// Dense operator on an energy grid, stored in orthonormal coordinates so that
// adjoints, eigendecompositions and norms are the standard matrix ones.
struct OperatorMatrix {
    EnergyGridPtr grid;
    Eigen::MatrixXcd entries;
    Flag hermitian = Flag::unknown;
    Flag contraction = Flag::unknown;

    int size() const { return static_cast<int>(entries.rows()); }
    EnergyState apply(const EnergyState& psi) const;
    cd expectation(const EnergyState& psi) const;
    OperatorMatrix adjoint() const;
};

OperatorMatrix make_operator(EnergyGridPtr grid, Eigen::MatrixXcd entries);
OperatorMatrix identity_operator(EnergyGridPtr grid);

// Sets the flag to checked when the property holds, returns the outcome.
bool check_hermitian(OperatorMatrix& a, double rel_tol = 1e-10);
bool check_contraction(OperatorMatrix& a, double tol = 1e-8);

double spectral_norm(const Eigen::MatrixXcd& a);

// Fixed-order pairwise summation; results do not depend on threading.
cd pairwise_sum(const cd* x, std::size_t n);
double pairwise_sum(const double* x, std::size_t n);

void require(bool condition, const std::string& message);

struct not_positive_semidefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct not_projector_like : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace irrevflow
