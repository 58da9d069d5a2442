#include "irrevflow/lyapunov.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace irrevflow {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void symmetrize(Eigen::MatrixXcd& a)
{
    a = (0.5 * (a + a.adjoint())).eval();
}

}  // namespace

OperatorMatrix build_mf_cauchy(EnergyGridPtr grid, RegularizationPolicy policy)
{
    require(grid != nullptr, "build_mf_cauchy: missing grid");
    const int n = grid->n;
    const Eigen::VectorXd& e = grid->nodes;
    const Eigen::VectorXd sw = grid->weights.cwiseSqrt();
    const cd i(0, 1);
    Eigen::MatrixXcd m(n, n);

    if (policy.kind == RegularizationPolicy::Kind::sokhotski_plemelj) {
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) {
                m(j, k) = j == k ? cd(0.5) : i / two_pi * sw[j] * sw[k] / (e[j] - e[k]);
            }
        }
    } else {
        double eps = policy.epsilon == 0 ? grid->spacing() : policy.epsilon;
        require(eps > 0, "build_mf_cauchy: epsilon must be positive");
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < n; ++j) {
                const double x = e[j] - e[k];
                const double d = x * x + eps * eps;
                m(j, k) = sw[j] * sw[k] * cd(eps / d, x / d) / two_pi;
            }
        }
    }
    OperatorMatrix r = make_operator(grid, std::move(m));
    r.hermitian = Flag::asserted;
    return r;
}

OperatorMatrix build_mf_composed(const BridgeConfig& cfg)
{
    Eigen::MatrixXcd m = compressed_toeplitz(cfg, 0.0);
    symmetrize(m);
    OperatorMatrix r = make_operator(cfg.energy, std::move(m));
    r.hermitian = Flag::asserted;
    if (cfg.interpolation == Interpolation::nearest) r.contraction = Flag::asserted;
    return r;
}

std::vector<double> lyapunov_trajectory(const OperatorMatrix& m, const EnergyState& psi,
                                        const std::vector<double>& times)
{
    require(psi.grid && psi.grid->n == m.size(), "lyapunov_trajectory: state and operator sizes differ");
    require(std::abs(psi.norm() - 1.0) <= 1e-8, "lyapunov_trajectory: state must be normalized");
    for (std::size_t k = 0; k < times.size(); ++k) {
        require(times[k] >= 0, "lyapunov_trajectory: times must be non-negative");
        require(k == 0 || times[k] >= times[k - 1], "lyapunov_trajectory: times must be sorted");
    }
    const Eigen::VectorXcd x = to_orthonormal(psi);
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        const Eigen::VectorXcd xt = x.cwiseProduct(evolution_phases(*psi.grid, t));
        out.push_back(xt.dot(m.entries * xt).real());
    }
    return out;
}

double max_increment(const std::vector<double>& values)
{
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < values.size(); ++k) worst = std::max(worst, values[k] - values[k - 1]);
    return worst;
}

OperatorMatrix heisenberg_mf(const OperatorMatrix& m, double t)
{
    require(t >= 0, "heisenberg_mf: t must be non-negative");
    const Eigen::VectorXcd ph = evolution_phases(*m.grid, t);
    Eigen::MatrixXcd a = ph.conjugate().asDiagonal() * m.entries * ph.asDiagonal();
    OperatorMatrix r = make_operator(m.grid, std::move(a));
    r.hermitian = m.hermitian == Flag::unknown ? Flag::unknown : Flag::asserted;
    r.contraction = m.contraction == Flag::unknown ? Flag::unknown : Flag::asserted;
    return r;
}

double cauchy_expectation(const EnergyState& psi)
{
    const EnergyGrid& g = *psi.grid;
    const Eigen::VectorXcd x = to_orthonormal(psi);
    // (x, Mx) = x*x / 2 + (i / 2 pi) sum_{j != k} conj(x_j) x_k sw_j sw_k / (E_j - E_k)
    // The j,k and k,j terms combine to -(1/pi) Im(conj(x_j) x_k) sw_j sw_k / (E_j - E_k).
    const Eigen::VectorXd sw = g.weights.cwiseSqrt();
    std::vector<double> rows(g.n);
    for (int j = 0; j < g.n; ++j) {
        double acc = 0;
        for (int k = j + 1; k < g.n; ++k) {
            acc += (std::conj(x[j]) * x[k]).imag() * sw[j] * sw[k] / (g.nodes[j] - g.nodes[k]);
        }
        rows[j] = acc;
    }
    const double pv = -pairwise_sum(rows.data(), rows.size()) / std::numbers::pi;
    return 0.5 * x.squaredNorm() + pv;
}

}  // namespace irrevflow
