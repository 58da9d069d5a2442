#include "irrevflow/time_observable.hpp"

#include <cmath>
#include <sstream>

namespace irrevflow {

RoundedProjector round_to_projector(const Eigen::MatrixXcd& a, ProjectorRounding rounding)
{
    require(rounding.tolerance > 0 && rounding.tolerance <= 0.5,
            "round_to_projector: tolerance must lie in (0, 0.5]");
    require(a.rows() == a.cols(), "round_to_projector: matrix must be square");
    const Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXd& ev = es.eigenvalues();
    Eigen::VectorXd snapped(ev.size());
    RoundedProjector out;
    int stuck = 0;
    double worst = 0;
    for (int i = 0; i < ev.size(); ++i) {
        const double s = ev[i] >= 0.5 ? 1.0 : 0.0;
        const double d = std::abs(ev[i] - s);
        if (d > rounding.tolerance) {
            ++stuck;
            worst = std::max(worst, d);
        }
        out.rounding_defect = std::max(out.rounding_defect, d);
        snapped[i] = s;
        out.rank += static_cast<int>(s);
    }
    if (stuck > 0) {
        std::ostringstream msg;
        msg << stuck << " eigenvalue(s) farther than " << rounding.tolerance
            << " from {0, 1}; worst distance " << worst;
        throw not_projector_like(msg.str());
    }
    const Eigen::MatrixXcd& v = es.eigenvectors();
    out.projector = v * snapped.cast<cd>().asDiagonal() * v.adjoint();
    return out;
}

OperatorMatrix future_projection(const OperatorMatrix& z, ProjectorRounding rounding)
{
    OperatorMatrix p = make_operator(z.grid, round_to_projector(z.entries.adjoint() * z.entries, rounding).projector);
    p.hermitian = Flag::asserted;
    p.contraction = Flag::asserted;
    return p;
}

OperatorMatrix past_projection(const OperatorMatrix& z, const OperatorMatrix& identity,
                               ProjectorRounding rounding)
{
    require(z.size() == identity.size(), "past_projection: dimension mismatch");
    OperatorMatrix p = make_operator(z.grid, identity.entries - future_projection(z, rounding).entries);
    p.hermitian = Flag::asserted;
    return p;
}

OperatorMatrix SpectralMeasureApprox::projection(std::size_t k) const
{
    require(k < past.size(), "projection: index out of range");
    OperatorMatrix p = make_operator(grid, basis * past[k] * basis.adjoint());
    p.hermitian = Flag::asserted;
    return p;
}

SpectralMeasureApprox build_spectral_measure(const std::vector<double>& times,
                                             const std::vector<OperatorMatrix>& z_family,
                                             const Eigen::MatrixXcd& basis, ProjectorRounding rounding)
{
    require(!times.empty() && times.front() == 0, "build_spectral_measure: times must start at 0");
    require(times.size() == z_family.size(), "build_spectral_measure: one Z per time required");
    for (std::size_t k = 1; k < times.size(); ++k)
        require(times[k] > times[k - 1], "build_spectral_measure: times must be strictly increasing");
    SpectralMeasureApprox m{z_family.front().grid, times, basis, {}, {}};
    const int r = static_cast<int>(basis.cols());
    for (const auto& z : z_family) {
        require(z.size() == basis.rows(), "build_spectral_measure: basis and Z sizes differ");
        const Eigen::MatrixXcd w = z.entries * basis;
        const RoundedProjector f = round_to_projector(w.adjoint() * w, rounding);
        m.past.push_back(Eigen::MatrixXcd::Identity(r, r) - f.projector);
        m.rounding_defects.push_back(f.rounding_defect);
    }
    return m;
}

Eigen::MatrixXcd interval_measure(const SpectralMeasureApprox& m, std::size_t k)
{
    require(k + 1 < m.times.size(), "interval_measure: index out of range");
    return m.past[k + 1] - m.past[k];
}

double future_mass(const SpectralMeasureApprox& m, std::size_t k, const Eigen::VectorXcd& psi)
{
    require(k < m.times.size(), "future_mass: index out of range");
    require(psi.size() == m.basis.rows(), "future_mass: state size differs from the grid");
    const Eigen::VectorXcd c = m.basis.adjoint() * psi;
    return c.squaredNorm() - c.dot(m.past[k] * c).real();
}

double time_operator_expectation(const SpectralMeasureApprox& m, const EnergyState& psi)
{
    const Eigen::VectorXcd x = to_orthonormal(psi);
    const double nn = x.squaredNorm();
    require(nn > 0, "time_operator_expectation: zero state");
    const Eigen::VectorXcd c = m.basis.adjoint() * x;
    std::vector<double> terms;
    for (std::size_t k = 0; k + 1 < m.times.size(); ++k) {
        const double mid = 0.5 * (m.times[k] + m.times[k + 1]);
        terms.push_back(mid * c.dot(interval_measure(m, k) * c).real());
    }
    return pairwise_sum(terms.data(), terms.size()) / nn;
}

double commutator_defect(const SpectralMeasureApprox& m, std::size_t k, const OperatorMatrix& z)
{
    require(k < m.past.size(), "commutator_defect: index out of range");
    const Eigen::MatrixXcd w = z.entries * m.basis;                 // Z B
    const Eigen::MatrixXcd v = z.entries.adjoint() * m.basis;       // Z* B
    const Eigen::MatrixXcd c = v.adjoint() * v - w.adjoint() * w;   // B* (Z Z* - Z* Z) B
    return spectral_norm(c - m.past[k]);
}

ProjectorDefects projector_defects(const SpectralMeasureApprox& m)
{
    ProjectorDefects d;
    const int r = m.dimension();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(r, r);
    for (std::size_t k = 0; k < m.past.size(); ++k) {
        const Eigen::MatrixXcd& p = m.past[k];
        d.idempotency = std::max(d.idempotency, spectral_norm(p * p - p));
        d.hermiticity = std::max(d.hermiticity, spectral_norm(p - p.adjoint()));
        const Eigen::MatrixXcd f = id - p;
        d.complement = std::max(d.complement, spectral_norm(f * f - f));
        const int rank = static_cast<int>(std::lround(p.trace().real()));
        if (!d.ranks.empty() && rank < d.ranks.back()) d.rank_monotone = false;
        d.ranks.push_back(rank);
        for (std::size_t j = 0; j < k; ++j) {
            const Eigen::MatrixXcd& q = m.past[j];
            d.nesting = std::max(d.nesting, spectral_norm(q * p - q));
        }
    }
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(r, r);
    for (std::size_t k = 0; k + 1 < m.times.size(); ++k) {
        const Eigen::MatrixXcd mu = interval_measure(m, k);
        sum += mu;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (mu + mu.adjoint()), Eigen::EigenvaluesOnly);
        d.interval_psd = std::max(d.interval_psd, -es.eigenvalues().minCoeff());
    }
    if (!m.past.empty()) d.telescoping = spectral_norm(sum - (m.past.back() - m.past.front()));
    return d;
}

}  // namespace irrevflow
