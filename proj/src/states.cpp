#include "irrevflow/states.hpp"

#include <array>
#include <cmath>
#include <random>

namespace irrevflow {

StateFamily parse_family(const std::string& name)
{
    if (name == "exp-decay") return StateFamily::exp_decay;
    if (name == "gaussian-bump") return StateFamily::gaussian_bump;
    if (name == "rational") return StateFamily::rational;
    if (name == "random-seeded") return StateFamily::random_seeded;
    throw std::invalid_argument("unknown state family '" + name +
                                "' (expected exp-decay, gaussian-bump, rational or random-seeded)");
}

std::string family_name(StateFamily f)
{
    switch (f) {
    case StateFamily::exp_decay: return "exp-decay";
    case StateFamily::gaussian_bump: return "gaussian-bump";
    case StateFamily::rational: return "rational";
    case StateFamily::random_seeded: return "random-seeded";
    }
    return "unknown";
}

namespace {

struct Bump {
    cd coef;
    double center, width, slope;
};

}  // namespace

std::function<cd(double)> state_function(const StateSpec& spec, double e_max)
{
    require(e_max > 0, "state_function: e_max must be positive");
    switch (spec.family) {
    case StateFamily::exp_decay: {
        require(spec.rate > 0, "state: exp-decay rate must be positive");
        const double a = spec.rate;
        return [a](double e) { return cd(std::sqrt(2 * a) * std::exp(-a * e)); };
    }
    case StateFamily::gaussian_bump: {
        require(spec.width > 0, "state: gaussian-bump width must be positive");
        const double c = spec.center, w = spec.width, k = spec.slope;
        return [c, w, k](double e) {
            const double x = (e - c) / w;
            return std::exp(-0.5 * x * x) * std::polar(1.0, -k * e);
        };
    }
    case StateFamily::rational: {
        require(spec.width > 0, "state: rational width must be positive");
        const cd pole(spec.center, -spec.width);
        return [pole](double e) { return 1.0 / (e - pole); };
    }
    case StateFamily::random_seeded: {
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::array<Bump, 3> bumps;
        for (auto& b : bumps) {
            b.center = e_max * (0.15 + 0.7 * unit(rng));
            b.width = std::min(0.5 + 2.5 * unit(rng), 0.1 * e_max);
            b.slope = -2.0 + 4.0 * unit(rng);
            b.coef = cd(-1.0 + 2.0 * unit(rng), -1.0 + 2.0 * unit(rng));
        }
        return [bumps](double e) {
            cd acc = 0;
            for (const auto& b : bumps) {
                const double x = (e - b.center) / b.width;
                acc += b.coef * std::exp(-0.5 * x * x) * std::polar(1.0, -b.slope * e);
            }
            return acc;
        };
    }
    }
    throw std::invalid_argument("state_function: unknown family");
}

EnergyState make_family_state(const StateSpec& spec, EnergyGridPtr grid)
{
    require(grid != nullptr, "make_family_state: missing grid");
    const auto f = state_function(spec, grid->e_max);
    Eigen::VectorXcd a(grid->n);
    for (int j = 0; j < grid->n; ++j) a[j] = f(grid->nodes[j]);
    return normalized(make_state(grid, std::move(a)));
}

EnergyState real_part_state(const EnergyState& psi)
{
    return normalized(make_state(psi.grid, psi.amplitudes.real().cast<cd>()));
}

}  // namespace irrevflow
