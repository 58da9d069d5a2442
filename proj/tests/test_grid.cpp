#include <doctest.h>

#include <cmath>
#include <random>

#include "irrevflow/grid.hpp"
#include "support.hpp"

using namespace irrevflow;

TEST_CASE("midpoint grid nodes and weights")
{
    auto g = make_energy_grid(10, 5, QuadratureRule::midpoint);
    const double nodes[] = {1, 3, 5, 7, 9};
    for (int j = 0; j < 5; ++j) {
        CHECK(g->nodes[j] == doctest::Approx(nodes[j]));
        CHECK(g->weights[j] == doctest::Approx(2));
    }
}

TEST_CASE("trapezoid grid includes endpoints")
{
    auto g = make_energy_grid(2, 3, QuadratureRule::trapezoid);
    CHECK(g->nodes[0] == 0);
    CHECK(g->nodes[1] == doctest::Approx(1));
    CHECK(g->nodes[2] == 2);
    CHECK(g->weights[0] == doctest::Approx(0.5));
    CHECK(g->weights[1] == doctest::Approx(1));
    CHECK(g->weights[2] == doctest::Approx(0.5));
}

TEST_CASE("grid invariants")
{
    for (auto rule : {QuadratureRule::midpoint, QuadratureRule::trapezoid}) {
        auto g = make_energy_grid(37.5, 301, rule);
        CHECK(std::abs(g->weights.sum() - 37.5) <= 1e-12 * 37.5);
        for (int j = 0; j < g->n; ++j) {
            CHECK(g->weights[j] > 0);
            CHECK(g->nodes[j] >= 0);
            CHECK(g->nodes[j] <= 37.5);
            if (j > 0) CHECK(g->nodes[j] > g->nodes[j - 1]);
        }
    }
}

TEST_CASE("invalid grids are rejected")
{
    CHECK_THROWS_AS(make_energy_grid(0, 4, QuadratureRule::midpoint), std::invalid_argument);
    CHECK_THROWS_AS(make_energy_grid(1, 1, QuadratureRule::midpoint), std::invalid_argument);
    CHECK_THROWS_AS(make_line_grid(10, 12), std::invalid_argument);
    CHECK_THROWS_AS(make_line_grid(-1, 16), std::invalid_argument);
    CHECK_THROWS_AS(parse_rule("simpson"), std::invalid_argument);
}

TEST_CASE("line grid spacing")
{
    auto g = make_line_grid(3.0, 64);
    CHECK(g->spacing * g->n == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(g->node(0) == -3.0);
    CHECK(g->node(63) < 3.0);
}

TEST_CASE("unit coordinate states are orthonormal after weight scaling")
{
    auto g = make_energy_grid(5, 6, QuadratureRule::trapezoid);
    for (int j = 0; j < g->n; ++j) {
        for (int k = 0; k < g->n; ++k) {
            Eigen::VectorXcd a = Eigen::VectorXcd::Zero(g->n), b = Eigen::VectorXcd::Zero(g->n);
            a[j] = 1;
            b[k] = 1;
            const cd ip = inner_product(from_orthonormal(g, a), from_orthonormal(g, b));
            CHECK(std::abs(ip - cd(j == k ? 1.0 : 0.0)) < 1e-14);
        }
    }
}

TEST_CASE("exponential state has unit norm")
{
    // 2 int exp(-2E) dE = 1. The trapezoid error is led by the end
    // correction h^2 / 12 * (f'(e_max) - f'(0)) = h^2 / 3, so 1e-6 needs
    // h near 1.7e-3; at n = 4096 on [0, 40] the error is that term.
    auto norm_sq = [](int n) {
        auto g = make_energy_grid(40, n, QuadratureRule::trapezoid);
        Eigen::VectorXcd a(g->n);
        for (int j = 0; j < g->n; ++j) a[j] = std::sqrt(2.0) * std::exp(-g->nodes[j]);
        return std::pair{inner_product(make_state(g, a), make_state(g, a)).real(), g->spacing()};
    };
    const auto [coarse, h] = norm_sq(4096);
    CHECK((coarse - 1) == doctest::Approx(h * h / 3).epsilon(1e-3));
    CHECK(std::abs(norm_sq(32768).first - 1) < 1e-6);
}

TEST_CASE("inner product symmetry and grid mismatch")
{
    std::mt19937_64 rng(3);
    auto g = make_energy_grid(7, 50, QuadratureRule::midpoint);
    auto a = make_state(g, testing::random_vector(50, rng));
    auto b = make_state(g, testing::random_vector(50, rng));
    CHECK(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))) <= 1e-14 * a.norm() * b.norm());
    CHECK(std::abs(inner_product(a, a).imag()) <= 1e-14 * a.norm() * a.norm());
    CHECK(inner_product(a, a).real() >= 0);
    auto other = make_energy_grid(8, 50, QuadratureRule::midpoint);
    CHECK_THROWS_AS(inner_product(a, make_state(other, b.amplitudes)), std::invalid_argument);
}

TEST_CASE("quadrature converges at second order on smooth integrands")
{
    // |psi|^2 = exp(-E) on [0, 10]; both rules have O(h^2) error here.
    const double exact = 1 - std::exp(-10.0);
    for (auto rule : {QuadratureRule::midpoint, QuadratureRule::trapezoid}) {
        std::vector<double> errs;
        for (int n : {256, 512, 1024}) {
            auto g = make_energy_grid(10, n, rule);
            Eigen::VectorXcd a(n);
            for (int j = 0; j < n; ++j) a[j] = std::exp(-0.5 * g->nodes[j]);
            errs.push_back(std::abs(inner_product(make_state(g, a), make_state(g, a)).real() - exact));
        }
        CHECK(errs[0] / errs[1] == doctest::Approx(4).epsilon(0.05));
        CHECK(errs[1] / errs[2] == doctest::Approx(4).epsilon(0.05));
    }
}

TEST_CASE("evolution is a unitary group action")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ut(-5, 5);
    auto g = make_energy_grid(30, 200, QuadratureRule::trapezoid);
    auto psi0 = make_state(g, testing::random_vector(200, rng));
    CHECK((evolve(psi0, 0).amplitudes - psi0.amplitudes).norm() == 0);
    for (int trial = 0; trial < 50; ++trial) {
        auto psi = normalized(make_state(g, testing::random_vector(200, rng)));
        const double t1 = ut(rng), t2 = ut(rng);
        CHECK(std::abs(evolve(psi, t1).norm() - psi.norm()) < 1e-14);
        const auto a = evolve(evolve(psi, t1), t2);
        const auto b = evolve(psi, t1 + t2);
        CHECK((a.amplitudes - b.amplitudes).norm() < 1e-13 * psi.amplitudes.norm());
    }
}

TEST_CASE("operator flags and norms")
{
    auto g = make_energy_grid(3, 4, QuadratureRule::midpoint);
    Eigen::MatrixXcd a(4, 4);
    a << 2, 0, 0, 0, 0, 1, cd(0, 1), 0, 0, cd(0, -1), 1, 0, 0, 0, 0, 0.5;
    auto op = make_operator(g, a);
    CHECK(check_hermitian(op));
    CHECK(op.hermitian == Flag::checked);
    CHECK(spectral_norm(a) == doctest::Approx(2));
    CHECK_FALSE(check_contraction(op));
    auto id = identity_operator(g);
    CHECK(check_contraction(id));
    a(0, 1) = 1;
    auto bad = make_operator(g, a);
    CHECK_FALSE(check_hermitian(bad));
    CHECK_THROWS_AS(make_operator(g, Eigen::MatrixXcd::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("pairwise summation is order-fixed")
{
    std::vector<double> x(1000);
    for (int k = 0; k < 1000; ++k) x[k] = 1.0 / (k + 1);
    const double a = pairwise_sum(x.data(), x.size());
    const double b = pairwise_sum(x.data(), x.size());
    CHECK(a == b);
    CHECK(a == doctest::Approx(7.485470860550345).epsilon(1e-14));
}
