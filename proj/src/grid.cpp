#include "irrevflow/grid.hpp"

#include <cmath>

namespace irrevflow {

void require(bool condition, const std::string& message)
{
    if (!condition) throw std::invalid_argument(message);
}

double EnergyGrid::spacing() const
{
    if (rule == QuadratureRule::midpoint) return e_max / n;
    return e_max / (n - 1);
}

EnergyGridPtr make_energy_grid(double e_max, int n, QuadratureRule rule)
{
    require(std::isfinite(e_max) && e_max > 0, "energy grid: e_max must be positive");
    require(n >= 2, "energy grid: n must be at least 2");
    auto g = std::make_shared<EnergyGrid>();
    g->e_max = e_max;
    g->n = n;
    g->rule = rule;
    g->nodes.resize(n);
    g->weights.resize(n);
    const double h = g->spacing();
    for (int j = 0; j < n; ++j) {
        if (rule == QuadratureRule::midpoint) {
            g->nodes[j] = (j + 0.5) * h;
            g->weights[j] = h;
        } else {
            g->nodes[j] = j * h;
            g->weights[j] = (j == 0 || j == n - 1) ? 0.5 * h : h;
        }
    }
    if (rule == QuadratureRule::trapezoid) g->nodes[n - 1] = e_max;
    return g;
}

QuadratureRule parse_rule(const std::string& name)
{
    if (name == "midpoint") return QuadratureRule::midpoint;
    if (name == "trapezoid") return QuadratureRule::trapezoid;
    throw std::invalid_argument("unknown quadrature rule '" + name + "'");
}

std::string rule_name(QuadratureRule rule)
{
    return rule == QuadratureRule::midpoint ? "midpoint" : "trapezoid";
}

Eigen::VectorXd LineGrid::nodes() const
{
    Eigen::VectorXd s(n);
    for (int k = 0; k < n; ++k) s[k] = node(k);
    return s;
}

LineGridPtr make_line_grid(double l, int n)
{
    require(std::isfinite(l) && l > 0, "line grid: l must be positive");
    require(n >= 2 && (n & (n - 1)) == 0, "line grid: n must be a power of two");
    auto g = std::make_shared<LineGrid>();
    g->l = l;
    g->n = n;
    g->spacing = 2.0 * l / n;
    return g;
}

double EnergyState::norm() const
{
    return std::sqrt(std::max(0.0, inner_product(*this, *this).real()));
}

EnergyState make_state(EnergyGridPtr grid, Eigen::VectorXcd amplitudes)
{
    require(grid != nullptr, "state: missing grid");
    require(amplitudes.size() == grid->n, "state: amplitude count does not match grid");
    return EnergyState{std::move(grid), std::move(amplitudes)};
}

EnergyState normalized(const EnergyState& psi)
{
    const double nrm = psi.norm();
    require(nrm > 0, "cannot normalize the zero state");
    return EnergyState{psi.grid, psi.amplitudes / nrm};
}

cd pairwise_sum(const cd* x, std::size_t n)
{
    if (n <= 8) {
        cd s = 0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double pairwise_sum(const double* x, std::size_t n)
{
    if (n <= 8) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

cd inner_product(const EnergyState& a, const EnergyState& b)
{
    require(a.grid && b.grid, "inner product: missing grid");
    require(a.grid == b.grid || (a.grid->n == b.grid->n && a.grid->e_max == b.grid->e_max &&
                                 a.grid->rule == b.grid->rule),
            "inner product: states live on different grids");
    const int n = a.grid->n;
    std::vector<cd> terms(n);
    for (int j = 0; j < n; ++j)
        terms[j] = a.grid->weights[j] * std::conj(a.amplitudes[j]) * b.amplitudes[j];
    return pairwise_sum(terms.data(), terms.size());
}

Eigen::VectorXcd evolution_phases(const EnergyGrid& grid, double t)
{
    Eigen::VectorXcd ph(grid.n);
    for (int j = 0; j < grid.n; ++j) ph[j] = std::polar(1.0, -grid.nodes[j] * t);
    return ph;
}

EnergyState evolve(const EnergyState& psi, double t)
{
    return EnergyState{psi.grid, psi.amplitudes.cwiseProduct(evolution_phases(*psi.grid, t))};
}

Eigen::VectorXcd to_orthonormal(const EnergyState& psi)
{
    return psi.amplitudes.cwiseProduct(psi.grid->weights.cwiseSqrt().cast<cd>());
}

EnergyState from_orthonormal(EnergyGridPtr grid, const Eigen::VectorXcd& coords)
{
    require(coords.size() == grid->n, "coordinate count does not match grid");
    Eigen::VectorXcd amp = coords.cwiseQuotient(grid->weights.cwiseSqrt().cast<cd>());
    return EnergyState{std::move(grid), std::move(amp)};
}

EnergyState OperatorMatrix::apply(const EnergyState& psi) const
{
    require(psi.grid && psi.grid->n == size(), "operator and state sizes differ");
    return from_orthonormal(psi.grid, entries * to_orthonormal(psi));
}

cd OperatorMatrix::expectation(const EnergyState& psi) const
{
    const Eigen::VectorXcd x = to_orthonormal(psi);
    return x.dot(entries * x);
}

OperatorMatrix OperatorMatrix::adjoint() const
{
    OperatorMatrix r{grid, entries.adjoint(), hermitian, contraction};
    return r;
}

OperatorMatrix make_operator(EnergyGridPtr grid, Eigen::MatrixXcd entries)
{
    require(grid != nullptr, "operator: missing grid");
    require(entries.rows() == grid->n && entries.cols() == grid->n,
            "operator: matrix shape does not match grid");
    return OperatorMatrix{std::move(grid), std::move(entries)};
}

OperatorMatrix identity_operator(EnergyGridPtr grid)
{
    const int n = grid->n;
    OperatorMatrix r{std::move(grid), Eigen::MatrixXcd::Identity(n, n)};
    r.hermitian = Flag::checked;
    r.contraction = Flag::checked;
    return r;
}

double spectral_norm(const Eigen::MatrixXcd& a)
{
    if (a.size() == 0) return 0.0;
    // Largest eigenvalue of A*A is cheaper than a full SVD for square inputs.
    Eigen::MatrixXcd g = a.rows() >= a.cols() ? Eigen::MatrixXcd(a.adjoint() * a)
                                              : Eigen::MatrixXcd(a * a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

bool check_hermitian(OperatorMatrix& a, double rel_tol)
{
    const double scale = std::max(spectral_norm(a.entries), 1e-300);
    const double dev = (a.entries - a.entries.adjoint()).cwiseAbs().maxCoeff();
    const bool ok = dev <= rel_tol * scale;
    if (ok) a.hermitian = Flag::checked;
    return ok;
}

bool check_contraction(OperatorMatrix& a, double tol)
{
    const bool ok = spectral_norm(a.entries) <= 1.0 + tol;
    if (ok) a.contraction = Flag::checked;
    return ok;
}

}  // namespace irrevflow
