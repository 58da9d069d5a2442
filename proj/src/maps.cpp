#include "irrevflow/maps.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace irrevflow {

BridgeConfig make_bridge(EnergyGridPtr energy, LineGridPtr line, Interpolation interpolation)
{
    require(energy && line, "bridge: missing grid");
    require(line->l >= energy->e_max, "bridge: line grid must cover [0, e_max] (l >= e_max)");
    BridgeConfig cfg{energy, line, interpolation, {}};
    if (interpolation == Interpolation::linear) return cfg;

    const double h = energy->spacing();
    require(std::abs(h - line->spacing) <= 1e-9 * h,
            "bridge: nearest injection needs equal energy and line spacings");
    cfg.node_index.resize(energy->n);
    for (int j = 0; j < energy->n; ++j) {
        const double pos = (energy->nodes[j] + line->l) / line->spacing;
        const long k = std::lround(pos);
        require(std::abs(pos - k) <= 1e-6 && k >= 0 && k < line->n,
                "bridge: energy node " + std::to_string(j) + " does not sit on a line node");
        cfg.node_index[j] = static_cast<int>(k);
    }
    return cfg;
}

LineGridPtr aligned_line_grid(const EnergyGrid& energy, double l_min)
{
    require(energy.rule == QuadratureRule::trapezoid,
            "aligned line grid: energy nodes must include 0 (trapezoid rule)");
    const double h = energy.spacing();
    int n = 2;
    while (n * h / 2 < l_min || n * h / 2 <= energy.e_max) n *= 2;
    return make_line_grid(n * h / 2, n);
}

void embed_coords(const BridgeConfig& cfg, const cd* x, cd* y)
{
    const LineGrid& line = *cfg.line;
    const EnergyGrid& en = *cfg.energy;
    std::fill(y, y + line.n, cd(0));
    if (cfg.interpolation == Interpolation::nearest) {
        for (int j = 0; j < en.n; ++j) y[cfg.node_index[j]] = x[j];
        return;
    }
    const double h = en.spacing();
    const double sq = std::sqrt(line.spacing);
    for (int k = 0; k < line.n; ++k) {
        const double s = line.node(k);
        if (s < en.nodes[0] || s > en.nodes[en.n - 1]) continue;
        const double u = (s - en.nodes[0]) / h;
        int j = std::min(static_cast<int>(u), en.n - 2);
        const double a = u - j;
        const cd pj = x[j] / std::sqrt(en.weights[j]);
        const cd pj1 = x[j + 1] / std::sqrt(en.weights[j + 1]);
        y[k] = sq * ((1 - a) * pj + a * pj1);
    }
}

void restrict_coords(const BridgeConfig& cfg, const cd* y, cd* x)
{
    const LineGrid& line = *cfg.line;
    const EnergyGrid& en = *cfg.energy;
    if (cfg.interpolation == Interpolation::nearest) {
        for (int j = 0; j < en.n; ++j) x[j] = y[cfg.node_index[j]];
        return;
    }
    // Exact adjoint of the interpolation map above.
    std::fill(x, x + en.n, cd(0));
    const double h = en.spacing();
    const double sq = std::sqrt(line.spacing);
    for (int k = 0; k < line.n; ++k) {
        const double s = line.node(k);
        if (s < en.nodes[0] || s > en.nodes[en.n - 1]) continue;
        const double u = (s - en.nodes[0]) / h;
        int j = std::min(static_cast<int>(u), en.n - 2);
        const double a = u - j;
        x[j] += sq * (1 - a) * y[k] / std::sqrt(en.weights[j]);
        x[j + 1] += sq * a * y[k] / std::sqrt(en.weights[j + 1]);
    }
}

namespace {

void check_bridge(const EnergyGridPtr& g, const BridgeConfig& cfg)
{
    require(g && cfg.energy && (g == cfg.energy || (g->n == cfg.energy->n &&
                                                     g->e_max == cfg.energy->e_max)),
            "bridge: state grid does not match the bridge's energy grid");
}

}  // namespace

LineFunction embed(const EnergyState& psi, const BridgeConfig& cfg)
{
    check_bridge(psi.grid, cfg);
    const Eigen::VectorXcd x = to_orthonormal(psi);
    LineFunction f{cfg.line, Eigen::VectorXcd(cfg.line->n)};
    embed_coords(cfg, x.data(), f.values.data());
    f.values /= std::sqrt(cfg.line->spacing);
    return f;
}

EnergyState restrict_to_energy(const LineFunction& f, const BridgeConfig& cfg)
{
    require(f.grid && f.grid->n == cfg.line->n && f.grid->l == cfg.line->l,
            "bridge: line function grid does not match the bridge's line grid");
    const Eigen::VectorXcd y = f.values * std::sqrt(cfg.line->spacing);
    Eigen::VectorXcd x(cfg.energy->n);
    restrict_coords(cfg, y.data(), x.data());
    return from_orthonormal(cfg.energy, x);
}

HardyFunction omega_f_apply(const EnergyState& psi, const BridgeConfig& cfg)
{
    return project_plus(embed(psi, cfg));
}

EnergyState omega_f_adjoint_apply(const HardyFunction& f, const BridgeConfig& cfg)
{
    require(f.certified(), "omega_f_adjoint_apply: input is not a certified H2+ function");
    return restrict_to_energy(f, cfg);
}

Eigen::MatrixXcd compressed_toeplitz(const BridgeConfig& cfg, double t)
{
    const int n = cfg.energy->n;
    const int m = cfg.line->n;
    Eigen::MatrixXcd out(n, n);
    Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXcd line(m);
    for (int j = 0; j < n; ++j) {
        unit[j] = 1;
        embed_coords(cfg, unit.data(), line.data());
        unit[j] = 0;
        project_plus_inplace(m, line.data());
        if (t != 0) {
            multiply_symbol(*cfg.line, t, line.data());
            project_plus_inplace(m, line.data());
        }
        restrict_coords(cfg, line.data(), out.col(j).data());
    }
    return out;
}

QuasiAffineReport quasi_affine_report(const Eigen::MatrixXcd& a, double rank_tol)
{
    QuasiAffineReport r;
    if (a.size() == 0) return r;
    // Hermitian input: singular values are |eigenvalues|, which keeps the
    // small ones accurate. BDCSVD is avoided; it crashes on some singular
    // matrices in Eigen 3.4.
    Eigen::VectorXd s;
    if (a.rows() == a.cols() && (a - a.adjoint()).norm() <= 1e-12 * a.norm()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
        s = es.eigenvalues().cwiseAbs();
        std::sort(s.data(), s.data() + s.size(), std::greater<>());
    } else {
        s = Eigen::JacobiSVD<Eigen::MatrixXcd>(a).singularValues();
    }
    r.max_singular_value = s.size() ? s[0] : 0.0;
    r.min_singular_value = s.size() ? s[s.size() - 1] : 0.0;
    if (a.cols() > a.rows()) r.min_singular_value = 0;  // nontrivial kernel
    for (int i = 0; i < s.size(); ++i)
        if (s[i] > rank_tol * r.max_singular_value && s[i] > 0) ++r.rank;
    const double n = static_cast<double>(a.rows());
    r.range_defect = 1.0 - r.rank / n;
    r.injective = r.min_singular_value > 0 && r.rank == a.cols();
    return r;
}

}  // namespace irrevflow
