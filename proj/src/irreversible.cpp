#include "irrevflow/irreversible.hpp"

#include <cmath>
#include <numbers>

namespace irrevflow {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(const Eigen::MatrixXcd& a)
{
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(a);
}

void require_psd(const Eigen::VectorXd& ev)
{
    const double scale = std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
    if (ev.minCoeff() < -1e-8 * scale) {
        throw not_positive_semidefinite("matrix has eigenvalue " + std::to_string(ev.minCoeff()) +
                                        " below -1e-8 * norm");
    }
}

}  // namespace

OperatorMatrix sqrt_positive(const OperatorMatrix& m)
{
    auto es = eig(m.entries);
    const Eigen::VectorXd& ev = es.eigenvalues();
    require_psd(ev);
    const Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXcd& v = es.eigenvectors();
    OperatorMatrix r = make_operator(m.grid, v * root.cast<cd>().asDiagonal() * v.adjoint());
    r.hermitian = Flag::asserted;
    if (m.contraction != Flag::unknown) r.contraction = Flag::asserted;
    return r;
}

OperatorMatrix pinv_spectral(const OperatorMatrix& a, SpectralCutoff cutoff)
{
    require(cutoff.tau > 0 && cutoff.tau < 1, "pinv_spectral: tau must lie in (0, 1)");
    auto es = eig(a.entries);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
    for (int i = 0; i < ev.size(); ++i)
        if (ev[i] >= cutoff.tau * top && ev[i] > 0) inv[i] = 1.0 / ev[i];
    const Eigen::MatrixXcd& v = es.eigenvectors();
    OperatorMatrix r = make_operator(a.grid, v * inv.cast<cd>().asDiagonal() * v.adjoint());
    r.hermitian = Flag::asserted;
    return r;
}

LambdaFactor factor_lambda(const OperatorMatrix& mf, SpectralCutoff cutoff)
{
    require(cutoff.tau > 0 && cutoff.tau < 1, "factor_lambda: tau must lie in (0, 1)");
    auto es = eig(mf.entries);
    require_psd(es.eigenvalues());
    LambdaFactor f;
    f.grid = mf.grid;
    f.cutoff = cutoff;
    f.lambda = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    f.vectors = es.eigenvectors();
    const double top = f.lambda.maxCoeff();
    for (int i = 0; i < f.lambda.size(); ++i)
        if (f.lambda[i] >= cutoff.tau * top && f.lambda[i] > 0) ++f.retained;
    f.lambda_matrix = make_operator(f.grid, f.vectors * f.lambda.cast<cd>().asDiagonal() * f.vectors.adjoint());
    f.lambda_matrix.hermitian = Flag::asserted;
    return f;
}

Eigen::MatrixXcd LambdaFactor::basis() const { return vectors.rightCols(retained); }

OperatorMatrix LambdaFactor::pinv_op() const
{
    const Eigen::MatrixXcd b = basis();
    const Eigen::VectorXd inv = lambda.tail(retained).cwiseInverse();
    OperatorMatrix r = make_operator(grid, b * inv.cast<cd>().asDiagonal() * b.adjoint());
    r.hermitian = Flag::asserted;
    return r;
}

OperatorMatrix LambdaFactor::retained_projector() const
{
    const Eigen::MatrixXcd b = basis();
    OperatorMatrix r = make_operator(grid, b * b.adjoint());
    r.hermitian = Flag::asserted;
    r.contraction = Flag::asserted;
    return r;
}

OperatorMatrix build_z(double t, const LambdaFactor& f)
{
    require(t >= 0, "build_z: t must be non-negative");
    const Eigen::MatrixXcd b = f.basis();
    const Eigen::VectorXd lam = f.lambda.tail(f.retained);
    const Eigen::VectorXcd ph = evolution_phases(*f.grid, t);
    // Lambda U Lambda^+ = V diag(lambda) V* U B diag(1/lambda) B*
    const Eigen::MatrixXcd inner = f.vectors.adjoint() * ph.asDiagonal() * b;
    const Eigen::MatrixXcd z = f.vectors * f.lambda.cast<cd>().asDiagonal() * inner *
                               lam.cwiseInverse().cast<cd>().asDiagonal() * b.adjoint();
    return make_operator(f.grid, z);
}

OperatorMatrix build_z(double t, const LambdaFactor& f, const BridgeConfig& cfg)
{
    require(t >= 0, "build_z: t must be non-negative");
    require(cfg.energy && cfg.energy->n == f.size(), "build_z: bridge and factor sizes differ");
    const Eigen::MatrixXcd b = f.basis();
    const Eigen::VectorXcd inv = f.lambda.tail(f.retained).cwiseInverse().cast<cd>();
    const Eigen::MatrixXcd k = compressed_toeplitz(cfg, t);
    const Eigen::MatrixXcd core = inv.asDiagonal() * (b.adjoint() * k * b) * inv.asDiagonal();
    OperatorMatrix z = make_operator(f.grid, b * core * b.adjoint());
    return z;
}

double retained_norm(const LambdaFactor& f, const Eigen::MatrixXcd& a)
{
    const Eigen::MatrixXcd b = f.basis();
    return spectral_norm(b.adjoint() * a * b);
}

// The retained basis diagonalizes Lambda, so B* Lambda = diag(lambda_r) B*
// and both residuals reduce to r x r products.
double intertwining_residual(double t, const LambdaFactor& f, const OperatorMatrix& z)
{
    require(t >= 0, "intertwining_residual: t must be non-negative");
    const Eigen::MatrixXcd b = f.basis();
    const Eigen::VectorXcd lam = f.lambda.tail(f.retained).cast<cd>();
    const Eigen::VectorXcd ph = evolution_phases(*f.grid, t);
    const Eigen::MatrixXcd ub = b.adjoint() * ph.asDiagonal() * b;
    const Eigen::MatrixXcd zb = b.adjoint() * z.entries * b;
    const Eigen::MatrixXcd a = lam.asDiagonal() * ub - zb * lam.asDiagonal();
    return spectral_norm(a) / f.lambda.maxCoeff();
}

double intertwining_adjoint_residual(double t, const LambdaFactor& f, const OperatorMatrix& z)
{
    require(t >= 0, "intertwining_adjoint_residual: t must be non-negative");
    const Eigen::MatrixXcd b = f.basis();
    const Eigen::VectorXcd lam = f.lambda.tail(f.retained).cast<cd>();
    const Eigen::VectorXcd ph = evolution_phases(*f.grid, t);
    const Eigen::MatrixXcd ub = b.adjoint() * ph.conjugate().asDiagonal() * b;
    const Eigen::MatrixXcd zb = b.adjoint() * z.entries.adjoint() * b;
    const Eigen::MatrixXcd a = ub * lam.asDiagonal() - lam.asDiagonal() * zb;
    return spectral_norm(a) / f.lambda.maxCoeff();
}

LineFunction IsometryR::apply(const EnergyState& psi) const
{
    const Eigen::VectorXcd c = basis.adjoint() * to_orthonormal(psi);
    LineFunction out{cfg.line, columns * c};
    out.values /= std::sqrt(cfg.line->spacing);
    return out;
}

IsometryR build_r(const BridgeConfig& cfg, const LambdaFactor& f)
{
    require(cfg.energy && cfg.energy->n == f.size(), "build_r: bridge and factor sizes differ");
    IsometryR r{cfg, f.basis(), Eigen::MatrixXcd(cfg.line->n, f.retained)};
    const Eigen::VectorXd lam = f.lambda.tail(f.retained);
    for (int c = 0; c < f.retained; ++c) {
        const Eigen::VectorXcd x = r.basis.col(c) / lam[c];
        embed_coords(cfg, x.data(), r.columns.col(c).data());
        project_plus_inplace(cfg.line->n, r.columns.col(c).data());
    }
    return r;
}

double r_isometry_defect(const IsometryR& r)
{
    const Eigen::MatrixXcd g = r.columns.adjoint() * r.columns;
    return spectral_norm(g - Eigen::MatrixXcd::Identity(g.rows(), g.cols()));
}

double r_transport_defect(const IsometryR& r, const OperatorMatrix& z, double t)
{
    const Eigen::MatrixXcd g = r.columns.adjoint() * r.columns;
    const Eigen::MatrixXcd zr = r.basis.adjoint() * z.entries * r.basis;
    Eigen::MatrixXcd tq = r.columns;
    for (int c = 0; c < tq.cols(); ++c) {
        multiply_symbol(*r.cfg.line, t, tq.col(c).data());
        project_plus_inplace(r.cfg.line->n, tq.col(c).data());
    }
    const Eigen::MatrixXcd lhs = g * zr * g;
    const Eigen::MatrixXcd rhs = r.columns.adjoint() * tq;
    return spectral_norm(lhs - rhs);
}

MatrixElement irreversible_matrix_element(const OperatorMatrix& x, const EnergyState& phi,
                                          const EnergyState& psi, double t, const LambdaFactor& f,
                                          const OperatorMatrix& z)
{
    require(t >= 0, "irreversible_matrix_element: t must be non-negative");
    const Eigen::MatrixXcd& lam = f.lambda_op().entries;
    const Eigen::VectorXcd ph = evolution_phases(*f.grid, t);
    const Eigen::VectorXcd a = to_orthonormal(phi);
    const Eigen::VectorXcd b = to_orthonormal(psi);
    const Eigen::VectorXcd la = lam * ph.cwiseProduct(a);
    const Eigen::VectorXcd lb = lam * ph.cwiseProduct(b);
    const Eigen::VectorXcd za = z.entries * (lam * a);
    const Eigen::VectorXcd zb = z.entries * (lam * b);
    return MatrixElement{la.dot(x.entries * lb), za.dot(x.entries * zb)};
}

Eigen::MatrixXcd band_limited_basis(const EnergyGrid& grid, double fraction, double min_concentration)
{
    require(fraction > 0 && fraction <= 1, "band_limited_basis: fraction must lie in (0, 1]");
    const int n = grid.n;
    Eigen::MatrixXd s(n, n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const int d = j - k;
            s(j, k) = d == 0 ? fraction : std::sin(fraction * std::numbers::pi * d) / (std::numbers::pi * d);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    int keep = 0;
    for (int i = 0; i < n; ++i)
        if (es.eigenvalues()[i] >= min_concentration) ++keep;
    return es.eigenvectors().rightCols(keep).cast<cd>();
}

}  // namespace irrevflow
