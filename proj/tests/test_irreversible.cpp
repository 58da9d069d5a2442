#include <doctest.h>

#include <random>

#include "irrevflow/irreversible.hpp"
#include "irrevflow/states.hpp"
#include "support.hpp"

using namespace irrevflow;

namespace {

OperatorMatrix diag_op(std::initializer_list<double> d)
{
    Eigen::VectorXd v(d.size());
    int k = 0;
    for (double x : d) v[k++] = x;
    auto g = make_energy_grid(static_cast<double>(v.size()), static_cast<int>(v.size()), QuadratureRule::midpoint);
    return make_operator(g, v.cast<cd>().asDiagonal());
}

OperatorMatrix random_psd(int n, std::mt19937_64& rng)
{
    Eigen::MatrixXcd a(n, n);
    for (int k = 0; k < n; ++k) a.col(k) = testing::random_vector(n, rng);
    auto g = make_energy_grid(static_cast<double>(n), n, QuadratureRule::midpoint);
    return make_operator(g, a.adjoint() * a / (4.0 * n));
}

EnergyState smooth_state(const EnergyGridPtr& g, std::uint64_t seed)
{
    StateSpec s;
    s.family = StateFamily::random_seeded;
    s.seed = seed;
    return make_family_state(s, g);
}

struct Fixture {
    BridgeConfig cfg = testing::bridge(512);
    OperatorMatrix mf = build_mf_composed(cfg);
    LambdaFactor factor = factor_lambda(mf);
};

const Fixture& fixture()
{
    static const Fixture f;
    return f;
}

}  // namespace

TEST_CASE("square root of positive operators")
{
    const OperatorMatrix id = diag_op({1, 1, 1});
    CHECK((sqrt_positive(id).entries - id.entries).norm() <= 1e-15);
    const OperatorMatrix d = sqrt_positive(diag_op({0.25, 1}));
    CHECK(std::abs(d.entries(0, 0) - 0.5) <= 1e-15);
    CHECK(std::abs(d.entries(1, 1) - 1.0) <= 1e-15);
    CHECK(std::abs(d.entries(0, 1)) <= 1e-15);
    CHECK_THROWS_AS(sqrt_positive(diag_op({-0.01, 1})), not_positive_semidefinite);

    std::mt19937_64 rng(20);
    const OperatorMatrix m = random_psd(40, rng);
    OperatorMatrix s = sqrt_positive(m);
    const double norm = spectral_norm(m.entries);
    CHECK(spectral_norm(s.entries * s.entries - m.entries) <= 1e-9 * norm);
    CHECK(check_hermitian(s));
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(s.entries).eigenvalues().minCoeff() >= -1e-12);
    CHECK(spectral_norm(sqrt_positive(fixture().mf).entries) <= 1 + 1e-8);
}

TEST_CASE("spectral pseudo-inverse")
{
    const OperatorMatrix id = diag_op({1, 1});
    CHECK((pinv_spectral(id).entries - id.entries).norm() <= 1e-15);
    const OperatorMatrix p = pinv_spectral(diag_op({1, 1e-14}), {1e-10});
    CHECK(std::abs(p.entries(0, 0) - 1.0) <= 1e-15);
    CHECK(std::abs(p.entries(1, 1)) == 0);
    CHECK_THROWS_AS(pinv_spectral(id, {0}), std::invalid_argument);
    CHECK_THROWS_AS(pinv_spectral(id, {1}), std::invalid_argument);

    std::mt19937_64 rng(21);
    const OperatorMatrix a = random_psd(40, rng);
    const Eigen::MatrixXcd api = pinv_spectral(a).entries;
    CHECK(spectral_norm(a.entries * api * a.entries - a.entries) <= 1e-8 * spectral_norm(a.entries));
}

TEST_CASE("Lambda factorization")
{
    const LambdaFactor& f = fixture().factor;
    const Eigen::MatrixXcd lam = f.lambda_op().entries;
    CHECK(spectral_norm(lam * lam - fixture().mf.entries) <= 1e-9);
    CHECK(f.retained > 0);
    CHECK(f.retained + f.discarded() == f.size());
    const Eigen::MatrixXcd b = f.basis();
    CHECK(spectral_norm(b.adjoint() * b - Eigen::MatrixXcd::Identity(f.retained, f.retained)) <= 1e-12);

    // pinv(Lambda) Lambda is the retained projector. Eigenvector roundoff
    // (about 2e-15) is amplified by the condition number 1 / tau of the
    // retained block, which sets the floor for the default tau = 1e-6.
    const Eigen::MatrixXcd q = f.pinv_op().entries * lam;
    CHECK(spectral_norm(q * q - q) <= 1e-8);
    CHECK(spectral_norm(q - f.retained_projector().entries) <= 1e-8);
    const LambdaFactor coarse = factor_lambda(fixture().mf, {1e-5});
    const Eigen::MatrixXcd qc = coarse.pinv_op().entries * coarse.lambda_op().entries;
    CHECK(spectral_norm(qc * qc - qc) <= 1e-9);

    MESSAGE("n = 512 retained " << f.retained << " of " << f.size());
    CHECK_THROWS_AS(factor_lambda(diag_op({-0.5, 1})), not_positive_semidefinite);
    CHECK_THROWS_AS(factor_lambda(fixture().mf, {2}), std::invalid_argument);
}

TEST_CASE("Z at t = 0 is the identity on the retained subspace")
{
    const Fixture& fx = fixture();
    const Eigen::MatrixXcd id = fx.factor.retained_projector().entries;
    const OperatorMatrix direct = build_z(0, fx.factor);
    const OperatorMatrix conj = build_z(0, fx.factor, fx.cfg);
    CHECK(spectral_norm(direct.entries - id) <= 1e-8);
    CHECK(intertwining_residual(0, fx.factor, direct) <= 1e-12);
    // By conjugation Z(0) = R* R, so it is the identity up to the isometry
    // defect of R, which carries the roundoff of M_F amplified by 1 / tau^2.
    const double iso = r_isometry_defect(build_r(fx.cfg, fx.factor));
    CHECK(std::abs(retained_norm(fx.factor, conj.entries - id) - iso) <= 1e-2 * iso);
    CHECK(iso < 1e-3);
    CHECK(intertwining_residual(0, fx.factor, conj) <= 1e-8);
    CHECK_THROWS_AS(build_z(-1, fx.factor), std::invalid_argument);
    CHECK_THROWS_AS(build_z(-1, fx.factor, fx.cfg), std::invalid_argument);
}

TEST_CASE("adjoint intertwining residual is the conjugate transpose of the direct one")
{
    const Fixture& fx = fixture();
    for (double t : {0.5, 1.0, 2.0}) {
        const OperatorMatrix z = build_z(t, fx.factor, fx.cfg);
        const double a = intertwining_residual(t, fx.factor, z);
        const double b = intertwining_adjoint_residual(t, fx.factor, z);
        CHECK(std::abs(a - b) <= 1e-12);
    }
}

TEST_CASE("Z acts inside the retained subspace")
{
    const Fixture& fx = fixture();
    const Eigen::MatrixXcd p = fx.factor.retained_projector().entries;
    for (double t : {0.5, 2.0}) {
        const Eigen::MatrixXcd z = build_z(t, fx.factor, fx.cfg).entries;
        CHECK(spectral_norm(z - p * z * p) <= 1e-9 * spectral_norm(z));
        CHECK(std::abs(retained_norm(fx.factor, z) - spectral_norm(z)) <= 1e-9);
    }
}

TEST_CASE("Z is a contraction on smooth states and decays")
{
    const Fixture& fx = fixture();
    std::vector<double> times;
    for (int k = 0; k <= 10; ++k) times.push_back(k);
    std::vector<OperatorMatrix> zs;
    for (double t : times) zs.push_back(build_z(t, fx.factor, fx.cfg));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Eigen::VectorXcd x = fx.factor.retained_projector().entries * to_orthonormal(smooth_state(fx.cfg.energy, seed));
        std::vector<double> norms;
        for (const auto& z : zs) norms.push_back((z.entries * x).norm());
        CHECK(max_increment(norms) <= 1e-6);
        CHECK(norms.back() < 0.1 * x.norm());
    }
}

TEST_CASE("R is an isometry on the retained subspace")
{
    const Fixture& fx = fixture();
    const IsometryR r = build_r(fx.cfg, fx.factor);
    CHECK(r.columns.cols() == fx.factor.retained);
    CHECK(r_isometry_defect(r) < 1e-3);
    const EnergyState psi = smooth_state(fx.cfg.energy, 3);
    const Eigen::VectorXcd x = fx.factor.basis() * (fx.factor.basis().adjoint() * to_orthonormal(psi));
    const LineFunction rpsi = r.apply(from_orthonormal(fx.cfg.energy, x));
    CHECK(std::abs(rpsi.norm() - x.norm()) < 1e-3 * x.norm());
    auto other = testing::bridge(256);
    CHECK_THROWS_AS(build_r(other, fx.factor), std::invalid_argument);
}

TEST_CASE("irreversible matrix elements")
{
    const Fixture& fx = fixture();
    const OperatorMatrix z = build_z(1, fx.factor, fx.cfg);
    const EnergyState psi = smooth_state(fx.cfg.energy, 4);
    const OperatorMatrix zero = make_operator(fx.cfg.energy, Eigen::MatrixXcd::Zero(512, 512));
    const MatrixElement e0 = irreversible_matrix_element(zero, psi, psi, 1, fx.factor, z);
    CHECK(e0.reversible == cd(0));
    CHECK(e0.irreversible == cd(0));

    // X = I, phi = psi: the reversible side is the Lyapunov value (psi_t, M psi_t)
    const MatrixElement e = irreversible_matrix_element(identity_operator(fx.cfg.energy), psi, psi, 1, fx.factor, z);
    const double lyap = lyapunov_trajectory(fx.mf, psi, {1.0})[0];
    CHECK(std::abs(e.reversible.real() - lyap) <= 1e-6);
    MESSAGE("X = I: reversible " << e.reversible.real() << " irreversible " << e.irreversible.real());
    CHECK_THROWS_AS(irreversible_matrix_element(zero, psi, psi, -1, fx.factor, z), std::invalid_argument);
}

TEST_CASE("band-limited basis")
{
    auto g = testing::energy_grid(256);
    const Eigen::MatrixXcd b = band_limited_basis(*g, 0.25, 0.999);
    CHECK(b.cols() > 0);
    CHECK(b.cols() < 0.25 * 256 + 1);
    CHECK(spectral_norm(b.adjoint() * b - Eigen::MatrixXcd::Identity(b.cols(), b.cols())) <= 1e-10);
    CHECK_THROWS_AS(band_limited_basis(*g, 0, 0.9), std::invalid_argument);
}
