#include <doctest.h>

#include <random>

#include "irrevflow/time_observable.hpp"
#include "support.hpp"

using namespace irrevflow;

namespace {

// Backward shift S e_j = e_{j-1}, S e_0 = 0 on a grid of size n. The powers
// S^k form a contraction semigroup in k with S^k* S^k the projector onto
// coordinates >= k, so the past projector at time k is exactly coordinates < k.
OperatorMatrix shift_power(const EnergyGridPtr& g, int k)
{
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(g->n, g->n);
    for (int j = k; j < g->n; ++j) s(j - k, j) = 1;
    return make_operator(g, s);
}

struct ShiftMeasure {
    EnergyGridPtr grid = make_energy_grid(6, 6, QuadratureRule::midpoint);
    std::vector<double> times{0, 1, 2, 3, 4, 5, 6};
    std::vector<OperatorMatrix> zs;
    SpectralMeasureApprox m;

    ShiftMeasure()
    {
        for (int k = 0; k <= 6; ++k) zs.push_back(shift_power(grid, k));
        m = build_spectral_measure(times, zs, Eigen::MatrixXcd::Identity(6, 6));
    }
};

Eigen::VectorXcd unit(int n, int j)
{
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e[j] = 1;
    return e;
}

}  // namespace

TEST_CASE("rounding to a projector")
{
    std::mt19937_64 rng(30);
    Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(
                             [&] {
                                 Eigen::MatrixXcd a(5, 5);
                                 for (int k = 0; k < 5; ++k) a.col(k) = testing::random_vector(5, rng);
                                 return a;
                             }())
                             .householderQ();
    Eigen::VectorXd d(5);
    d << 0.97, 0.02, 1.0, 0.0, 0.93;
    const Eigen::MatrixXcd a = q * d.cast<cd>().asDiagonal() * q.adjoint();
    const RoundedProjector p = round_to_projector(a);
    CHECK(p.rank == 3);
    CHECK(p.rounding_defect == doctest::Approx(0.07));
    CHECK(spectral_norm(p.projector * p.projector - p.projector) <= 1e-14);
    CHECK(spectral_norm(p.projector - p.projector.adjoint()) <= 1e-14);

    d[1] = 0.5;
    const Eigen::MatrixXcd bad = q * d.cast<cd>().asDiagonal() * q.adjoint();
    CHECK_THROWS_AS(round_to_projector(bad), not_projector_like);
    CHECK(round_to_projector(bad, {0.5}).rounding_defect == doctest::Approx(0.5));
    CHECK_THROWS_AS(round_to_projector(a, {0}), std::invalid_argument);
    CHECK_THROWS_AS(round_to_projector(a, {0.6}), std::invalid_argument);
}

TEST_CASE("full-grid past and future projections of the shift")
{
    auto g = make_energy_grid(6, 6, QuadratureRule::midpoint);
    const OperatorMatrix id = identity_operator(g);
    const OperatorMatrix fut = future_projection(shift_power(g, 2));
    const OperatorMatrix past = past_projection(shift_power(g, 2), id);
    Eigen::VectorXcd expect(6);
    expect << 0, 0, 1, 1, 1, 1;
    CHECK((fut.entries - Eigen::MatrixXcd(expect.asDiagonal())).norm() <= 1e-14);
    CHECK((past.entries + fut.entries - id.entries).norm() <= 1e-14);
    CHECK_THROWS_AS(past_projection(shift_power(g, 2), identity_operator(make_energy_grid(5, 5, QuadratureRule::midpoint))),
                    std::invalid_argument);
}

TEST_CASE("spectral measure of the shift semigroup")
{
    const ShiftMeasure s;
    const ProjectorDefects d = projector_defects(s.m);
    CHECK(d.idempotency <= 1e-14);
    CHECK(d.hermiticity <= 1e-14);
    CHECK(d.complement <= 1e-14);
    CHECK(d.nesting <= 1e-14);
    CHECK(d.interval_psd <= 1e-14);
    CHECK(d.telescoping <= 1e-14);
    CHECK(d.rank_monotone);
    CHECK(d.ranks == std::vector<int>{0, 1, 2, 3, 4, 5, 6});
    CHECK(s.m.past.front().norm() == 0);
    CHECK((s.m.past.back() - Eigen::MatrixXcd::Identity(6, 6)).norm() <= 1e-14);
    for (std::size_t k = 0; k + 1 < s.times.size(); ++k) {
        const Eigen::MatrixXcd mu = interval_measure(s.m, k);
        CHECK((mu - unit(6, static_cast<int>(k)) * unit(6, static_cast<int>(k)).adjoint()).norm() <= 1e-14);
    }
    CHECK((s.m.projection(3).entries - s.m.past[3]).norm() <= 1e-14);
    CHECK_THROWS_AS(interval_measure(s.m, 6), std::invalid_argument);
    CHECK_THROWS_AS(s.m.projection(7), std::invalid_argument);
}

TEST_CASE("future mass and time expectation of the shift")
{
    const ShiftMeasure s;
    for (int j = 0; j < 6; ++j) {
        for (int k = 0; k < 7; ++k)
            CHECK(future_mass(s.m, k, unit(6, j)) == doctest::Approx(j >= k ? 1.0 : 0.0));
        const EnergyState e = from_orthonormal(s.grid, unit(6, j));
        CHECK(time_operator_expectation(s.m, e) == doctest::Approx(j + 0.5));
    }
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const EnergyState psi = from_orthonormal(s.grid, testing::random_vector(6, rng));
        CHECK(time_operator_expectation(s.m, psi) >= 0);
    }
    CHECK_THROWS_AS(time_operator_expectation(s.m, make_state(s.grid, Eigen::VectorXcd::Zero(6))),
                    std::invalid_argument);
}

TEST_CASE("commutator defect")
{
    const ShiftMeasure s;
    CHECK(commutator_defect(s.m, 0, s.zs[0]) <= 1e-14);
    // In finite dimensions [Z, Z*] has trace zero, so it is never the past projector.
    CHECK(commutator_defect(s.m, 2, s.zs[2]) >= 1);
}

TEST_CASE("spectral measure preconditions")
{
    const ShiftMeasure s;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(6, 6);
    CHECK_THROWS_AS(build_spectral_measure({1, 2}, {s.zs[0], s.zs[1]}, id), std::invalid_argument);
    CHECK_THROWS_AS(build_spectral_measure({0, 1}, {s.zs[0]}, id), std::invalid_argument);
    CHECK_THROWS_AS(build_spectral_measure({0, 1, 1}, {s.zs[0], s.zs[1], s.zs[2]}, id), std::invalid_argument);
    CHECK_THROWS_AS(build_spectral_measure({0}, {s.zs[0]}, Eigen::MatrixXcd::Identity(5, 5)), std::invalid_argument);

    // Z* Z with an eigenvalue at 1/2 cannot be rounded
    OperatorMatrix half = s.zs[0];
    half.entries *= std::sqrt(0.5);
    CHECK_THROWS_AS(build_spectral_measure({0, 1}, {s.zs[0], half}, id), not_projector_like);
}

TEST_CASE("measure on a compressed basis")
{
    // basis = coordinates {0, 2, 4}: the shift maps them outside the span, and
    // the compressed Gram matrices stay diagonal.
    const ShiftMeasure s;
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(6, 3);
    b(0, 0) = b(2, 1) = b(4, 2) = 1;
    const SpectralMeasureApprox m = build_spectral_measure(s.times, s.zs, b);
    CHECK(m.dimension() == 3);
    CHECK(projector_defects(m).ranks == std::vector<int>{0, 1, 1, 2, 2, 3, 3});
    CHECK(time_operator_expectation(m, from_orthonormal(s.grid, unit(6, 2))) == doctest::Approx(2.5));
}
