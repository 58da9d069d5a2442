#include "irrevflow/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace irrevflow {

std::string method_name(OracleMethod m)
{
    switch (m) {
    case OracleMethod::epsilon_richardson: return "epsilon_richardson";
    case OracleMethod::residue: return "residue";
    case OracleMethod::frequency_shift: return "frequency_shift";
    }
    return "unknown";
}

namespace {

// Catmull-Rom cubic through uniform samples; the end intervals use a
// linearly extrapolated ghost sample.
cd cubic_at(const Eigen::VectorXcd& p, double u)
{
    const int n = static_cast<int>(p.size());
    int j = std::clamp(static_cast<int>(std::floor(u)), 0, n - 2);
    const double a = u - j;
    auto at = [&](int k) {
        if (k < 0) return 2.0 * p[0] - p[1];
        if (k >= n) return 2.0 * p[n - 1] - p[n - 2];
        return p[k];
    };
    const cd p0 = at(j - 1), p1 = at(j), p2 = at(j + 1), p3 = at(j + 2);
    const double a2 = a * a, a3 = a2 * a;
    return 0.5 * ((2.0 * p1) + (-p0 + p2) * a + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * a2 +
                  (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * a3);
}

}  // namespace

std::vector<double> default_epsilon_ladder(const EnergyGrid& grid)
{
    const double h = grid.spacing();
    return {4 * h, 2 * h, h};
}

OracleReport oracle_mf_expectation(const EnergyState& psi, const std::vector<double>& epsilons,
                                   int refine)
{
    require(psi.grid != nullptr, "oracle_mf_expectation: missing grid");
    require(epsilons.size() >= 2, "oracle_mf_expectation: at least two epsilon values required");
    for (std::size_t k = 0; k < epsilons.size(); ++k) {
        require(epsilons[k] > 0, "oracle_mf_expectation: epsilons must be positive");
        require(k == 0 || epsilons[k] < epsilons[k - 1], "oracle_mf_expectation: epsilons must decrease");
    }
    require(refine >= 1, "oracle_mf_expectation: refine must be >= 1");
    const EnergyGrid& g = *psi.grid;
    require(g.n >= 2, "oracle_mf_expectation: grid too small");

    const double h = g.spacing();
    const double hf = h / refine;
    const int nf = refine * (g.n - 1) + 1;
    Eigen::VectorXcd f(nf);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(nf, hf);
    w[0] = w[nf - 1] = 0.5 * hf;
    for (int i = 0; i < nf; ++i) f[i] = cubic_at(psi.amplitudes, static_cast<double>(i) / refine);

    // C(d) = sum_k w_{k+d} w_k conj(f_{k+d}) f_k
    std::vector<cd> c(nf);
    for (int d = 0; d < nf; ++d) {
        cd acc = 0;
        for (int k = 0; k + d < nf; ++k) acc += w[k + d] * w[k] * std::conj(f[k + d]) * f[k];
        c[d] = acc;
    }

    const double two_pi = 2 * std::numbers::pi;
    std::vector<double> v;
    for (double eps : epsilons) {
        std::vector<double> terms(nf);
        terms[0] = c[0].real() / (two_pi * eps);
        for (int d = 1; d < nf; ++d) {
            const double x = d * hf;
            const cd k = cd(eps, x) / (two_pi * (x * x + eps * eps));
            terms[d] = 2 * (k * c[d]).real();
        }
        v.push_back(pairwise_sum(terms.data(), terms.size()));
    }

    std::vector<double> r;
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double ratio = epsilons[k] / epsilons[k + 1];
        r.push_back((ratio * v[k + 1] - v[k]) / (ratio - 1));
    }
    OracleReport out;
    out.method = OracleMethod::epsilon_richardson;
    if (v.size() < 3) {
        out.value = r.back();
        out.estimated_error = std::abs(v.back() - v[v.size() - 2]);
        return out;
    }
    // A jump of psi at the ends of the grid adds an eps log eps term to the
    // bias, which first-order Richardson leaves at O(eps). The last three
    // levels are fitted to V0 + a eps log eps + b eps; the error estimate is
    // the distance to the plain first-order extrapolant.
    const std::size_t m = v.size();
    Eigen::Matrix3d a;
    Eigen::Vector3d rhs;
    for (int i = 0; i < 3; ++i) {
        const double e = epsilons[m - 3 + i];
        a(i, 0) = 1;
        a(i, 1) = e * std::log(e);
        a(i, 2) = e;
        rhs[i] = v[m - 3 + i];
    }
    const double fit = a.fullPivLu().solve(rhs)[0];
    out.value = fit;
    out.estimated_error = std::max(std::abs(fit - r.back()), std::abs(r.back() - r[r.size() - 2]));
    return out;
}

std::function<cd(double)> oracle_toeplitz_rational(double t, cd pole)
{
    require(pole.imag() < 0, "oracle_toeplitz_rational: pole must lie below the real axis");
    require(t >= 0, "oracle_toeplitz_rational: t must be non-negative");
    const cd coef = std::exp(cd(0, -1) * pole * t);
    return [coef, pole](double s) { return coef / (s - pole); };
}

cd oracle_titchmarsh_rational(cd pole, cd z)
{
    require(pole.imag() < 0, "oracle_titchmarsh_rational: pole must lie below the real axis");
    require(z.imag() > 0, "oracle_titchmarsh_rational: z must lie above the real axis");
    return 1.0 / (z - pole);
}

}  // namespace irrevflow
