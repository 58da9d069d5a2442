#pragma once

#include <functional>

#include "irrevflow/grid.hpp"

namespace irrevflow {

// Samples on a LineGrid; the L2 inner product is spacing * sum(conj(f) g).
struct LineFunction {
    LineGridPtr grid;
    Eigen::VectorXcd values;

    double norm() const;
};

// A line function together with the fraction of its L2 mass carried by
// negative frequencies. Members with hardy_defect <= hardy_tolerance count as
// certified elements of H2+.
struct HardyFunction : LineFunction {
    double hardy_defect = 0;

    bool certified() const;
};

inline constexpr double hardy_tolerance = 1e-6;

LineFunction sample(LineGridPtr grid, const std::function<cd(double)>& f);
cd line_inner_product(const LineFunction& a, const LineFunction& b);

// Fraction of ||f||^2 at negative frequencies.
double hardy_defect(const LineFunction& f);

// Wraps f as a HardyFunction after measuring its defect; throws when the
// defect exceeds the certification tolerance.
HardyFunction certify(const LineFunction& f, double tolerance = hardy_tolerance);

// Riesz projections. Frequencies are those of exp(i w s) on the
// antiperiodic extension of the window, w = (m + 1/2) * pi / l, so there is
// no zero bin and P+ + P- = I holds sample by sample.
HardyFunction project_plus(const LineFunction& f);
HardyFunction project_minus(const LineFunction& f);

// In-place variants on raw sample columns, used by the operator builders.
void project_plus_inplace(int n, cd* values);
void project_minus_inplace(int n, cd* values);

// f(z) = -(1/2 pi i) * integral f(x) / (z - x) dx for Im z > 0, with the
// kernel summed over the antiperiodic images of the window.
cd titchmarsh_extend(const HardyFunction& f, cd z);

// T(t) f = P+ (exp(-i s t) f).
HardyFunction toeplitz_apply(double t, const HardyFunction& f);

// T(t)* g = exp(i s t) g. No projection is applied: the result is in H2+
// whenever the shifted spectrum stays below the grid's highest frequency,
// and the reported defect says how much did not.
HardyFunction toeplitz_adjoint_apply(double t, const HardyFunction& g);

// f(s) = (1 - exp(i s t0) exp(-i mu t0)) / (s - mu), Im mu < 0.
HardyFunction kernel_witness(cd mu, double t0, LineGridPtr grid);

// Past and future projections on H2+: future(t) = T(t)* T(t),
// past(t) = T(t) T(t)* - T(t)* T(t) = I - future(t).
HardyFunction hardy_future_projection(double t, const HardyFunction& f);
HardyFunction hardy_past_projection(double t, const HardyFunction& f);

// Multiplication by exp(-i s t) on raw samples.
void multiply_symbol(const LineGrid& grid, double t, cd* values);

}  // namespace irrevflow
