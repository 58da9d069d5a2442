#include <doctest.h>

#include <cmath>

#include "irrevflow/states.hpp"
#include "support.hpp"

using namespace irrevflow;

TEST_CASE("family names round-trip")
{
    for (auto f : {StateFamily::exp_decay, StateFamily::gaussian_bump, StateFamily::rational,
                   StateFamily::random_seeded})
        CHECK(parse_family(family_name(f)) == f);
    CHECK_THROWS_AS(parse_family("gaussian"), std::invalid_argument);
}

TEST_CASE("closed-form families")
{
    StateSpec s;
    s.rate = 2;
    CHECK(std::abs(state_function(s, 50)(0.5) - std::sqrt(4.0) * std::exp(-1.0)) <= 1e-15);

    s.family = StateFamily::gaussian_bump;
    s.center = 10;
    s.width = 2;
    s.slope = 0.5;
    const cd g = state_function(s, 50)(12);
    CHECK(std::abs(g - std::exp(-0.5) * std::polar(1.0, -6.0)) <= 1e-15);

    s.family = StateFamily::rational;
    s.center = 3;
    s.width = 1;
    CHECK(std::abs(state_function(s, 50)(4) - 1.0 / cd(1, 1)) <= 1e-15);
}

TEST_CASE("family parameters are validated")
{
    StateSpec s;
    s.rate = 0;
    CHECK_THROWS_AS(state_function(s, 50), std::invalid_argument);
    s = {};
    s.family = StateFamily::gaussian_bump;
    s.width = -1;
    CHECK_THROWS_AS(state_function(s, 50), std::invalid_argument);
    s.family = StateFamily::rational;
    CHECK_THROWS_AS(state_function(s, 50), std::invalid_argument);
    CHECK_THROWS_AS(state_function(StateSpec{}, 0), std::invalid_argument);
}

TEST_CASE("sampled states are normalized")
{
    auto g = testing::energy_grid(512);
    for (auto f : {StateFamily::exp_decay, StateFamily::gaussian_bump, StateFamily::rational,
                   StateFamily::random_seeded}) {
        StateSpec s;
        s.family = f;
        CHECK(make_family_state(s, g).norm() == doctest::Approx(1).epsilon(1e-12));
    }
}

TEST_CASE("random-seeded states are deterministic per seed")
{
    auto g = testing::energy_grid(512);
    StateSpec s;
    s.family = StateFamily::random_seeded;
    s.seed = 42;
    const EnergyState a = make_family_state(s, g), b = make_family_state(s, g);
    CHECK(a.amplitudes == b.amplitudes);
    s.seed = 43;
    CHECK((make_family_state(s, g).amplitudes - a.amplitudes).norm() > 0.1);
}

TEST_CASE("real part state")
{
    auto g = testing::energy_grid(128);
    StateSpec s;
    s.family = StateFamily::random_seeded;
    const EnergyState r = real_part_state(make_family_state(s, g));
    CHECK(r.amplitudes.imag().norm() == 0);
    CHECK(r.norm() == doctest::Approx(1).epsilon(1e-12));
}
