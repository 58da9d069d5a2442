#include "irrevflow/hardy.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace irrevflow {

namespace {

struct Plans {
    fftw_plan forward;
    fftw_plan backward;
    std::vector<cd> twiddle;  // exp(i pi k / n)
};

// FFTW planning is not thread safe; execution with fftw_execute_dft is.
const Plans& plans_for(int n)
{
    static std::mutex mutex;
    static std::map<int, Plans> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    Plans p;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
    p.backward = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
    p.twiddle.resize(n);
    for (int k = 0; k < n; ++k) p.twiddle[k] = std::polar(1.0, std::numbers::pi * k / n);
    return cache.emplace(n, std::move(p)).first->second;
}

// Zeroes one half of the half-shifted spectrum: bins m >= n/2 carry the
// negative frequencies (m + 1/2 - n) * pi / l.
void half_shift_filter(int n, cd* v, bool keep_positive)
{
    const Plans& p = plans_for(n);
    for (int k = 0; k < n; ++k) v[k] *= std::conj(p.twiddle[k]);
    auto* data = reinterpret_cast<fftw_complex*>(v);
    fftw_execute_dft(p.forward, data, data);
    const int half = n / 2;
    if (keep_positive) {
        for (int m = half; m < n; ++m) v[m] = 0;
    } else {
        for (int m = 0; m < half; ++m) v[m] = 0;
    }
    fftw_execute_dft(p.backward, data, data);
    const double scale = 1.0 / n;
    for (int k = 0; k < n; ++k) v[k] *= p.twiddle[k] * scale;
}

HardyFunction wrap(const LineFunction& f)
{
    HardyFunction h;
    h.grid = f.grid;
    h.values = f.values;
    h.hardy_defect = hardy_defect(f);
    return h;
}

void require_hardy(const HardyFunction& f, const char* op)
{
    require(f.grid != nullptr, std::string(op) + ": missing line grid");
    require(f.certified(), std::string(op) + ": input is not a certified H2+ function (defect " +
                               std::to_string(f.hardy_defect) + ")");
}

}  // namespace

double LineFunction::norm() const
{
    return std::sqrt(line_inner_product(*this, *this).real());
}

bool HardyFunction::certified() const { return hardy_defect <= hardy_tolerance; }

LineFunction sample(LineGridPtr grid, const std::function<cd(double)>& f)
{
    LineFunction r{grid, Eigen::VectorXcd(grid->n)};
    for (int k = 0; k < grid->n; ++k) r.values[k] = f(grid->node(k));
    return r;
}

cd line_inner_product(const LineFunction& a, const LineFunction& b)
{
    require(a.grid && b.grid && a.grid->n == b.grid->n && a.grid->l == b.grid->l,
            "line inner product: functions live on different grids");
    std::vector<cd> terms(a.grid->n);
    for (int k = 0; k < a.grid->n; ++k) terms[k] = std::conj(a.values[k]) * b.values[k];
    return a.grid->spacing * pairwise_sum(terms.data(), terms.size());
}

void project_plus_inplace(int n, cd* values) { half_shift_filter(n, values, true); }
void project_minus_inplace(int n, cd* values) { half_shift_filter(n, values, false); }

double hardy_defect(const LineFunction& f)
{
    const double total = f.values.squaredNorm();
    if (total == 0) return 0;
    Eigen::VectorXcd neg = f.values;
    project_minus_inplace(f.grid->n, neg.data());
    return neg.squaredNorm() / total;
}

HardyFunction certify(const LineFunction& f, double tolerance)
{
    HardyFunction h = wrap(f);
    require(h.hardy_defect <= tolerance,
            "function is not in H2+ to tolerance (defect " + std::to_string(h.hardy_defect) + ")");
    return h;
}

HardyFunction project_plus(const LineFunction& f)
{
    require(f.grid != nullptr, "project_plus: missing line grid");
    LineFunction r = f;
    project_plus_inplace(f.grid->n, r.values.data());
    return wrap(r);
}

HardyFunction project_minus(const LineFunction& f)
{
    require(f.grid != nullptr, "project_minus: missing line grid");
    LineFunction r = f;
    project_minus_inplace(f.grid->n, r.values.data());
    return wrap(r);
}

cd titchmarsh_extend(const HardyFunction& f, cd z)
{
    require(z.imag() > 0, "titchmarsh_extend: z must lie in the upper half-plane");
    const LineGrid& g = *f.grid;
    const double period = 2.0 * g.l;
    const double c = std::numbers::pi / period;
    std::vector<cd> terms(g.n);
    for (int k = 0; k < g.n; ++k) {
        // sum_j (-1)^j / (z - x - j*period) = c / sin(c (z - x))
        terms[k] = f.values[k] * c / std::sin(c * (z - g.node(k)));
    }
    const cd integral = g.spacing * pairwise_sum(terms.data(), terms.size());
    return -integral / (2.0 * std::numbers::pi * cd(0, 1));
}

void multiply_symbol(const LineGrid& grid, double t, cd* values)
{
    for (int k = 0; k < grid.n; ++k) values[k] *= std::polar(1.0, -grid.node(k) * t);
}

HardyFunction toeplitz_apply(double t, const HardyFunction& f)
{
    require(t >= 0, "toeplitz_apply: t must be non-negative");
    require_hardy(f, "toeplitz_apply");
    LineFunction r = f;
    multiply_symbol(*f.grid, t, r.values.data());
    project_plus_inplace(f.grid->n, r.values.data());
    return wrap(r);
}

HardyFunction toeplitz_adjoint_apply(double t, const HardyFunction& g)
{
    require(t >= 0, "toeplitz_adjoint_apply: t must be non-negative");
    require_hardy(g, "toeplitz_adjoint_apply");
    LineFunction r = g;
    multiply_symbol(*g.grid, -t, r.values.data());
    return wrap(r);
}

HardyFunction kernel_witness(cd mu, double t0, LineGridPtr grid)
{
    require(mu.imag() < 0, "kernel_witness: mu must lie in the lower half-plane");
    require(t0 > 0, "kernel_witness: t0 must be positive");
    const cd i(0, 1);
    const cd phase = std::exp(-i * mu * t0);
    LineFunction f = sample(grid, [&](double s) {
        return (1.0 - std::exp(i * s * t0) * phase) / (s - mu);
    });
    return wrap(f);
}

HardyFunction hardy_future_projection(double t, const HardyFunction& f)
{
    require(t >= 0, "hardy_future_projection: t must be non-negative");
    require_hardy(f, "hardy_future_projection");
    LineFunction r = f;
    multiply_symbol(*f.grid, t, r.values.data());
    project_plus_inplace(f.grid->n, r.values.data());
    multiply_symbol(*f.grid, -t, r.values.data());
    return wrap(r);
}

HardyFunction hardy_past_projection(double t, const HardyFunction& f)
{
    HardyFunction fut = hardy_future_projection(t, f);
    LineFunction r{f.grid, f.values - fut.values};
    return wrap(r);
}

}  // namespace irrevflow
