#include "irrevflow/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>

namespace irrevflow {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kind_table{
    {ExperimentKind::build_mf, "build-mf"},
    {ExperimentKind::trajectory, "trajectory"},
    {ExperimentKind::semigroup_check, "semigroup-check"},
    {ExperimentKind::intertwining, "intertwining"},
    {ExperimentKind::time_observable, "time-observable"},
    {ExperimentKind::convergence_sweep, "convergence-sweep"},
    {ExperimentKind::validate_all, "validate-all"},
};

}  // namespace

ExperimentKind parse_kind(const std::string& name)
{
    for (const auto& [k, s] : kind_table)
        if (s == name) return k;
    throw config_error("unknown experiment kind '" + name + "'");
}

std::string kind_name(ExperimentKind k)
{
    for (const auto& [kk, s] : kind_table)
        if (kk == k) return s;
    return "unknown";
}

const std::vector<std::string>& kind_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, s] : kind_table) v.push_back(s);
        return v;
    }();
    return names;
}

// ---------------------------------------------------------------------------
// configuration

namespace {

std::vector<double> default_times(ExperimentKind kind)
{
    std::vector<double> t;
    switch (kind) {
    case ExperimentKind::trajectory:
    case ExperimentKind::build_mf:
    case ExperimentKind::convergence_sweep:
    case ExperimentKind::validate_all:
        for (int k = 0; k <= 40; ++k) t.push_back(0.25 * k);
        break;
    case ExperimentKind::semigroup_check:
        for (int k = 0; k <= 6; ++k) t.push_back(0.5 * k);
        break;
    case ExperimentKind::intertwining:
        t = {0.5, 1, 2};
        break;
    case ExperimentKind::time_observable:
        t = {0, 0.5, 1, 2, 4};
        break;
    }
    return t;
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw config_error(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw config_error((where.empty() ? "" : where + ".") + key + ": unknown field");
    }
}

template <class T>
T field(const json& j, const char* key, T fallback, const std::string& where)
{
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw config_error((where.empty() ? "" : where + ".") + key + ": wrong type");
    }
}

template <class T>
std::optional<T> optional_field(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key)) return std::nullopt;
    return field<T>(j, key, T{}, where);
}

std::vector<double> parse_times(const json& j)
{
    std::vector<double> t;
    if (j.is_array()) {
        try {
            t = j.get<std::vector<double>>();
        } catch (const json::exception&) {
            throw config_error("times: expected an array of numbers");
        }
    } else {
        check_keys(j, "times", {"start", "stop", "step", "count"});
        const double start = field<double>(j, "start", 0.0, "times");
        const double stop = field<double>(j, "stop", 10.0, "times");
        if (j.contains("count") == j.contains("step"))
            throw config_error("times: give exactly one of step or count");
        if (j.contains("count")) {
            const int count = field<int>(j, "count", 2, "times");
            if (count < 2) throw config_error("times.count: must be >= 2");
            for (int k = 0; k < count; ++k) t.push_back(start + (stop - start) * k / (count - 1));
        } else {
            const double step = field<double>(j, "step", 1.0, "times");
            if (!(step > 0)) throw config_error("times.step: must be positive");
            const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
            for (int k = 0; k < count; ++k) t.push_back(start + k * step);
        }
    }
    if (t.empty()) throw config_error("times: empty time grid");
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!(t[k] >= 0)) throw config_error("times: values must be non-negative");
        if (k > 0 && !(t[k] > t[k - 1])) throw config_error("times: values must be strictly increasing");
    }
    return t;
}

}  // namespace

ExperimentConfig parse_config(const json& j, ExperimentKind kind)
{
    check_keys(j, "", {"energy", "line", "interpolation", "mf", "cutoff", "projector_tolerance", "state",
                       "states", "seed", "times", "sweep"});
    ExperimentConfig c;
    c.kind = kind;

    const json energy = j.value("energy", json::object());
    check_keys(energy, "energy", {"n", "e_max", "spacing", "rule"});
    c.energy_n = field<int>(energy, "n", c.energy_n, "energy");
    if (c.energy_n < 2) throw config_error("energy.n: must be >= 2");
    c.e_max = optional_field<double>(energy, "e_max", "energy");
    c.spacing = optional_field<double>(energy, "spacing", "energy");
    if (c.e_max && c.spacing) throw config_error("energy: give at most one of e_max and spacing");
    if (c.e_max && !(*c.e_max > 0)) throw config_error("energy.e_max: must be positive");
    if (c.spacing && !(*c.spacing > 0)) throw config_error("energy.spacing: must be positive");
    try {
        c.rule = parse_rule(field<std::string>(energy, "rule", "trapezoid", "energy"));
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("energy.rule: ") + e.what());
    }

    const json line = j.value("line", json::object());
    check_keys(line, "line", {"l_min", "l", "n"});
    c.line_l_min = field<double>(line, "l_min", c.line_l_min, "line");
    c.line_l = field<double>(line, "l", 0.0, "line");
    c.line_n = field<int>(line, "n", 0, "line");
    if ((c.line_l > 0) != (c.line_n > 0)) throw config_error("line: l and n must be given together");
    if (line.contains("l_min") && c.line_n > 0) throw config_error("line: l_min conflicts with explicit l, n");

    const std::string interp = field<std::string>(j, "interpolation", "nearest", "");
    if (interp == "nearest") c.interpolation = Interpolation::nearest;
    else if (interp == "linear") c.interpolation = Interpolation::linear;
    else throw config_error("interpolation: expected nearest or linear");

    const json mf = j.value("mf", json::object());
    check_keys(mf, "mf", {"construction", "regularization", "epsilon"});
    const std::string cons = field<std::string>(mf, "construction", "composed", "mf");
    if (cons == "composed") c.construction = MfConstruction::composed;
    else if (cons == "cauchy") c.construction = MfConstruction::cauchy;
    else throw config_error("mf.construction: expected composed or cauchy");
    const std::string reg = field<std::string>(mf, "regularization", "sokhotski-plemelj", "mf");
    if (reg == "sokhotski-plemelj") c.regularization.kind = RegularizationPolicy::Kind::sokhotski_plemelj;
    else if (reg == "epsilon-shift") c.regularization.kind = RegularizationPolicy::Kind::epsilon_shift;
    else throw config_error("mf.regularization: expected sokhotski-plemelj or epsilon-shift");
    c.regularization.epsilon = field<double>(mf, "epsilon", 0.0, "mf");
    if (c.regularization.epsilon < 0) throw config_error("mf.epsilon: must be non-negative");

    const json cutoff = j.value("cutoff", json::object());
    check_keys(cutoff, "cutoff", {"tau"});
    c.cutoff.tau = field<double>(cutoff, "tau", c.cutoff.tau, "cutoff");
    if (!(c.cutoff.tau > 0 && c.cutoff.tau < 1)) throw config_error("cutoff.tau: must lie in (0, 1)");

    c.projector_tolerance = field<double>(j, "projector_tolerance", c.projector_tolerance, "");
    if (!(c.projector_tolerance > 0 && c.projector_tolerance <= 0.5))
        throw config_error("projector_tolerance: must lie in (0, 0.5]");

    const json st = j.value("state", json::object());
    check_keys(st, "state", {"family", "rate", "center", "width", "slope"});
    try {
        c.state.family = parse_family(field<std::string>(st, "family", "exp-decay", "state"));
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("state.family: ") + e.what());
    }
    c.state.rate = field<double>(st, "rate", c.state.rate, "state");
    c.state.center = field<double>(st, "center", c.state.center, "state");
    c.state.width = field<double>(st, "width", c.state.width, "state");
    c.state.slope = field<double>(st, "slope", c.state.slope, "state");
    c.state_count = field<int>(j, "states", 1, "");
    if (c.state_count < 1) throw config_error("states: must be >= 1");
    c.seed = field<std::uint64_t>(j, "seed", 0, "");
    c.state.seed = c.seed;

    c.times = j.contains("times") ? parse_times(j.at("times")) : default_times(kind);

    const json sweep = j.value("sweep", json::object());
    check_keys(sweep, "sweep", {"n"});
    c.sweep_n = field<std::vector<int>>(sweep, "n", c.sweep_n, "sweep");
    if (c.sweep_n.size() < 2) throw config_error("sweep.n: need at least two sizes");
    for (std::size_t k = 0; k < c.sweep_n.size(); ++k) {
        if (c.sweep_n[k] < 2) throw config_error("sweep.n: sizes must be >= 2");
        if (k > 0 && c.sweep_n[k] <= c.sweep_n[k - 1]) throw config_error("sweep.n: sizes must increase");
    }
    return c;
}

ordered_json config_echo(const ExperimentConfig& c)
{
    ordered_json j;
    j["kind"] = kind_name(c.kind);
    ordered_json energy;
    energy["n"] = c.energy_n;
    if (c.e_max) energy["e_max"] = *c.e_max;
    if (c.spacing) energy["spacing"] = *c.spacing;
    energy["rule"] = rule_name(c.rule);
    j["energy"] = energy;
    ordered_json line;
    if (c.line_n > 0) {
        line["l"] = c.line_l;
        line["n"] = c.line_n;
    } else {
        line["l_min"] = c.line_l_min;
    }
    j["line"] = line;
    j["interpolation"] = c.interpolation == Interpolation::nearest ? "nearest" : "linear";
    ordered_json mf;
    mf["construction"] = c.construction == MfConstruction::composed ? "composed" : "cauchy";
    mf["regularization"] = c.regularization.kind == RegularizationPolicy::Kind::sokhotski_plemelj
                               ? "sokhotski-plemelj"
                               : "epsilon-shift";
    mf["epsilon"] = c.regularization.epsilon;
    j["mf"] = mf;
    j["cutoff"] = ordered_json{{"tau", c.cutoff.tau}};
    j["projector_tolerance"] = c.projector_tolerance;
    ordered_json st;
    st["family"] = family_name(c.state.family);
    st["rate"] = c.state.rate;
    st["center"] = c.state.center;
    st["width"] = c.state.width;
    st["slope"] = c.state.slope;
    j["state"] = st;
    j["states"] = c.state_count;
    j["seed"] = c.seed;
    j["times"] = c.times;
    j["sweep"] = ordered_json{{"n", c.sweep_n}};
    return j;
}

// ---------------------------------------------------------------------------
// experiment context: grids plus lazily built operators

namespace {

class Context {
public:
    Context(const ExperimentConfig& cfg, int n, std::optional<double> e_max_override = std::nullopt)
        : cfg_(cfg)
    {
        const bool trap = cfg.rule == QuadratureRule::trapezoid;
        double e_max;
        if (e_max_override) e_max = *e_max_override;
        else if (cfg.e_max) e_max = *cfg.e_max;
        else {
            const double h = cfg.spacing.value_or(16 * std::numbers::pi / n);
            e_max = trap ? (n - 1) * h : n * h;
        }
        try {
            energy_ = make_energy_grid(e_max, n, cfg.rule);
        } catch (const std::invalid_argument& e) {
            throw config_error(std::string("energy: ") + e.what());
        }
        try {
            LineGridPtr line;
            if (cfg.line_n > 0) line = make_line_grid(cfg.line_l, cfg.line_n);
            else if (trap) line = aligned_line_grid(*energy_, cfg.line_l_min);
            if (line) bridge_ = make_bridge(energy_, line, cfg.interpolation);
        } catch (const std::invalid_argument& e) {
            if (cfg.construction == MfConstruction::composed || cfg.line_n > 0)
                throw config_error(std::string("energy/line: ") + e.what());
        }
        if (cfg.construction == MfConstruction::composed && !bridge_)
            throw config_error("mf.construction: composed needs a line grid (use the trapezoid rule)");
        for (int k = 0; k < cfg.state_count; ++k) {
            StateSpec s = cfg.state;
            s.seed = cfg.seed + static_cast<std::uint64_t>(k);
            try {
                states_.push_back(make_family_state(s, energy_));
            } catch (const std::invalid_argument& e) {
                throw config_error(std::string("state: ") + e.what());
            }
        }
    }

    int n() const { return energy_->n; }
    const EnergyGridPtr& energy() const { return energy_; }
    const std::optional<BridgeConfig>& bridge() const { return bridge_; }
    const std::vector<EnergyState>& states() const { return states_; }

    const OperatorMatrix& mf()
    {
        if (!mf_) {
            mf_ = cfg_.construction == MfConstruction::composed ? build_mf_composed(*bridge_)
                                                                : build_mf_cauchy(energy_, cfg_.regularization);
        }
        return *mf_;
    }

    const LambdaFactor& factor()
    {
        if (!factor_) factor_ = factor_lambda(mf(), cfg_.cutoff);
        return *factor_;
    }

    bool conjugation_path() const { return bridge_ && cfg_.construction == MfConstruction::composed; }

    const OperatorMatrix& z(double t)
    {
        auto it = z_.find(t);
        if (it != z_.end()) return it->second;
        OperatorMatrix m = conjugation_path() ? build_z(t, factor(), *bridge_) : build_z(t, factor());
        return z_.emplace(t, std::move(m)).first->second;
    }

    const OperatorMatrix& z_direct(double t)
    {
        auto it = zd_.find(t);
        if (it != zd_.end()) return it->second;
        return zd_.emplace(t, build_z(t, factor())).first->second;
    }

private:
    const ExperimentConfig& cfg_;
    EnergyGridPtr energy_;
    std::optional<BridgeConfig> bridge_;
    std::vector<EnergyState> states_;
    std::optional<OperatorMatrix> mf_;
    std::optional<LambdaFactor> factor_;
    std::map<double, OperatorMatrix> z_;
    std::map<double, OperatorMatrix> zd_;
};

std::string tag(const std::string& name, double t)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s[t=%g]", name.c_str(), t);
    return buf;
}

class Checks {
public:
    explicit Checks(RunReport& r, std::string prefix = "") : r_(r), prefix_(std::move(prefix)) {}

    void le(const std::string& name, double value, double tol, std::string note = "")
    {
        add(name, value, tol, "<=", value <= tol, std::move(note));
    }
    void ge(const std::string& name, double value, double tol, std::string note = "")
    {
        add(name, value, tol, ">=", value >= tol, std::move(note));
    }
    void fail(const std::string& name, std::string note)
    {
        add(name, std::nan(""), std::nan(""), "==", false, std::move(note));
    }
    void residual(const std::string& name, int n, double value)
    {
        r_.residuals.push_back({prefix_ + name, n, value});
    }

private:
    void add(const std::string& name, double value, double tol, const char* rel, bool pass, std::string note)
    {
        r_.checks.push_back({prefix_ + name, value, tol, rel, pass && std::isfinite(value), std::move(note)});
    }

    RunReport& r_;
    std::string prefix_;
};

double trajectory_max_increment(const std::vector<double>& v)
{
    return v.size() < 2 ? 0.0 : max_increment(v);
}

void run_build_mf(Context& ctx, Checks& c)
{
    const OperatorMatrix& m = ctx.mf();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m.entries, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    c.ge("mf_min_eigenvalue", ev.minCoeff(), -1e-8);
    c.le("mf_max_eigenvalue", ev.maxCoeff(), 1 + 1e-8);
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    c.le("mf_hermitian_defect", (m.entries - m.entries.adjoint()).cwiseAbs().maxCoeff() / scale, 1e-10);
    const EnergyState real = real_part_state(ctx.states().front());
    c.le("half_mass_real_state", std::abs(m.expectation(real).real() - 0.5), 1e-4);
    c.residual("mf_norm", ctx.n(), ev.cwiseAbs().maxCoeff());
    if (ctx.bridge()) {
        const Eigen::MatrixXcd other = build_mf_cauchy(ctx.energy(), {}).entries;
        const Eigen::MatrixXcd composed =
            ctx.conjugation_path() ? m.entries : build_mf_composed(*ctx.bridge()).entries;
        c.residual("cross_construction_gap", ctx.n(), spectral_norm(composed - other));
    }
}

void run_trajectory(Context& ctx, const std::vector<double>& times, Checks& c, RunReport& r,
                    bool write_curve)
{
    double worst = -std::numeric_limits<double>::infinity();
    double ratio = 0;
    for (std::size_t k = 0; k < ctx.states().size(); ++k) {
        const auto v = lyapunov_trajectory(ctx.mf(), ctx.states()[k], times);
        worst = std::max(worst, trajectory_max_increment(v));
        if (v.front() > 0) ratio = std::max(ratio, v.back() / v.front());
        if (k == 0 && write_curve)
            for (std::size_t i = 0; i < times.size(); ++i) r.trajectory.emplace_back(times[i], v[i]);
    }
    c.le("lyapunov_max_increment", worst, 1e-6);
    if (times.back() >= 50) c.le(tag("decay_ratio", times.back()), ratio, 0.05);
}

void run_semigroup(Context& ctx, const std::vector<double>& times, Checks& c, RunReport& r,
                   bool write_curve)
{
    const LambdaFactor& f = ctx.factor();
    c.residual("retained_dimension", ctx.n(), f.retained);
    // Z(t) = Z(t) B B* on both construction paths, so products and norms
    // reduce to the retained coordinates.
    const Eigen::MatrixXcd b = f.basis();
    std::map<double, Eigen::MatrixXcd> zr;
    double contraction = 0;
    for (double t : times) {
        const Eigen::MatrixXcd zb = ctx.z(t).entries * b;
        contraction = std::max(contraction, spectral_norm(zb));
        zr.emplace(t, b.adjoint() * zb);
    }
    double semigroup = 0;
    for (double s : times) {
        for (double t : times) {
            if (s > t) continue;
            for (double u : times) {
                if (std::abs(u - (s + t)) > 1e-12) continue;
                semigroup = std::max(semigroup, spectral_norm(zr.at(u) - zr.at(s) * zr.at(t)));
            }
        }
    }
    c.le("semigroup_defect", semigroup, 1e-4);
    c.le("z_norm", contraction, 1 + 5e-6);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ctx.states().size(); ++k) {
        const Eigen::VectorXcd x = to_orthonormal(ctx.states()[k]);
        std::vector<double> v;
        for (double t : times) v.push_back((ctx.z(t).entries * x).norm());
        worst = std::max(worst, trajectory_max_increment(v));
        if (k == 0 && write_curve)
            for (std::size_t i = 0; i < times.size(); ++i) r.trajectory.emplace_back(times[i], v[i]);
    }
    c.le("z_orbit_max_increment", worst, 1e-6);
}

void run_intertwining(Context& ctx, const std::vector<double>& times, Checks& c, RunReport& r,
                      bool write_curve)
{
    const LambdaFactor& f = ctx.factor();
    double adjoint_gap = 0;
    for (double t : times) {
        const OperatorMatrix& z = ctx.z(t);
        const double res = intertwining_residual(t, f, z);
        c.le(tag("intertwining", t), res, 1e-3);
        adjoint_gap = std::max(adjoint_gap, std::abs(res - intertwining_adjoint_residual(t, f, z)));
        if (write_curve) r.trajectory.emplace_back(t, res);
        if (ctx.conjugation_path())
            c.le(tag("z_path_gap", t), retained_norm(f, z.entries - ctx.z_direct(t).entries), 1e-3);
    }
    c.le("intertwining_adjoint_gap", adjoint_gap, 1e-12);
    if (!ctx.bridge()) return;
    const BridgeConfig& b = *ctx.bridge();
    double basic = 0;
    for (double t : times) {
        for (const auto& psi : ctx.states()) {
            const HardyFunction lhs = omega_f_apply(evolve(psi, t), b);
            const HardyFunction rhs = toeplitz_apply(t, omega_f_apply(psi, b));
            LineFunction d{lhs.grid, lhs.values - rhs.values};
            basic = std::max(basic, d.norm() / psi.norm());
        }
    }
    c.le("basic_intertwining", basic, 1e-5);
    if (!ctx.conjugation_path()) return;
    const IsometryR rr = build_r(b, f);
    c.le("r_isometry_defect", r_isometry_defect(rr), 1e-3);
    for (double t : times) c.le(tag("r_transport_defect", t), r_transport_defect(rr, ctx.z(t), t), 1e-3);
}

void run_time_observable(Context& ctx, const ExperimentConfig& cfg, const std::vector<double>& times,
                         Checks& c, RunReport& r, bool write_curve)
{
    if (times.front() != 0) {
        c.fail("time_grid", "time-observable needs a time grid starting at 0");
        return;
    }
    const LambdaFactor& f = ctx.factor();
    std::vector<OperatorMatrix> zs;
    for (double t : times) zs.push_back(ctx.z(t));
    // Round leniently so the remaining algebra can be measured, then hold
    // the worst rounding distance against the configured tolerance.
    std::optional<SpectralMeasureApprox> built;
    try {
        built = build_spectral_measure(times, zs, f.basis(), {0.5});
    } catch (const not_projector_like& e) {
        c.fail("projector_rounding", e.what());
        return;
    }
    const SpectralMeasureApprox& m = *built;
    double rounding = 0;
    for (double d : m.rounding_defects) rounding = std::max(rounding, d);
    c.le("projector_rounding_defect", rounding, cfg.projector_tolerance,
         "largest eigenvalue distance of Z*Z from {0, 1}");
    const ProjectorDefects d = projector_defects(m);
    c.le("past_at_zero", spectral_norm(m.past.front()), 1e-8);
    c.le("idempotency", d.idempotency, 1e-6);
    c.le("complement", d.complement, 1e-6);
    c.le("nesting", d.nesting, 1e-8);
    c.ge("rank_monotone", d.rank_monotone ? 1.0 : 0.0, 1.0);
    c.le("interval_psd", d.interval_psd, 1e-6);
    c.le("telescoping", d.telescoping, 1e-6);
    for (std::size_t k = 0; k < times.size(); ++k) {
        c.residual(tag("past_rank", times[k]), ctx.n(), d.ranks[k]);
        c.residual(tag("commutator_defect", times[k]), ctx.n(), commutator_defect(m, k, zs[k]));
    }
    const Eigen::MatrixXcd& lam = f.lambda_op().entries;
    double corr = 0, corr_raw = 0, expectation = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < ctx.states().size(); ++s) {
        const EnergyState& psi = ctx.states()[s];
        const Eigen::VectorXcd pl = lam * to_orthonormal(psi);
        const auto lyap = lyapunov_trajectory(ctx.mf(), psi, times);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double mass = future_mass(m, k, pl);
            corr = std::max(corr, std::abs(mass - lyap[k]));
            corr_raw = std::max(corr_raw, std::abs((zs[k].entries * pl).squaredNorm() - lyap[k]));
            if (s == 0 && write_curve) r.trajectory.emplace_back(times[k], mass);
        }
        if (pl.norm() > 0)
            expectation = std::min(expectation,
                                   time_operator_expectation(m, from_orthonormal(ctx.energy(), pl)));
    }
    c.le("correspondence", corr, 1e-5);
    c.residual("correspondence_unrounded", ctx.n(), corr_raw);
    c.ge("time_expectation", expectation, 0.0);
}

void run_sweep(const ExperimentConfig& cfg, Checks& c)
{
    Context base(cfg, cfg.energy_n);
    const double e_max = base.energy()->e_max;
    std::vector<double> gap, inter, slack;
    for (int n : cfg.sweep_n) {
        Context ctx(cfg, n, e_max);
        const Eigen::MatrixXcd cauchy = build_mf_cauchy(ctx.energy(), cfg.regularization).entries;
        if (ctx.bridge()) {
            const Eigen::MatrixXcd composed = build_mf_composed(*ctx.bridge()).entries;
            gap.push_back(spectral_norm(composed - cauchy));
            c.residual("cross_construction_gap", n, gap.back());
        }
        double s = 0;
        for (const auto& psi : ctx.states())
            s = std::max(s, trajectory_max_increment(lyapunov_trajectory(ctx.mf(), psi, cfg.times)));
        slack.push_back(std::max(s, 0.0));
        c.residual("lyapunov_slack", n, slack.back());
        inter.push_back(intertwining_residual(1.0, ctx.factor(), ctx.z(1.0)));
        c.residual("intertwining[t=1]", n, inter.back());
    }
    auto worst_ratio = [](const std::vector<double>& v) {
        double w = 0;
        for (std::size_t k = 1; k < v.size(); ++k) w = std::max(w, v[k] / v[k - 1]);
        return w;
    };
    if (!gap.empty()) {
        c.le("cross_construction_gap_ratio", worst_ratio(gap), 1.0, "largest gap(n_next) / gap(n)");
        c.le("cross_construction_gap_final", gap.back(), 5e-2);
    }
    c.le("intertwining_ratio", worst_ratio(inter), 1.0, "largest residual(n_next) / residual(n)");
}

}  // namespace

bool RunReport::passed() const
{
    for (const auto& ch : checks)
        if (!ch.pass) return false;
    return true;
}

ordered_json RunReport::to_json() const
{
    ordered_json j;
    j["library"] = "irrevflow";
    j["version"] = version;
    j["config"] = config_echo(config);
    ordered_json arr = ordered_json::array();
    for (const auto& ch : checks) {
        ordered_json e;
        e["name"] = ch.name;
        e["value"] = std::isfinite(ch.value) ? ordered_json(ch.value) : ordered_json(nullptr);
        e["tolerance"] = std::isfinite(ch.tolerance) ? ordered_json(ch.tolerance) : ordered_json(nullptr);
        e["relation"] = ch.relation;
        e["pass"] = ch.pass;
        if (!ch.note.empty()) e["note"] = ch.note;
        arr.push_back(e);
    }
    j["checks"] = arr;
    j["passed"] = passed();
    j["wall_time_seconds"] = wall_time;
    return j;
}

RunReport run(const ExperimentConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    RunReport r;
    r.config = cfg;
    if (cfg.kind == ExperimentKind::convergence_sweep) {
        Checks c(r);
        run_sweep(cfg, c);
    } else {
        Context ctx(cfg, cfg.energy_n);
        const bool all = cfg.kind == ExperimentKind::validate_all;
        auto times_for = [&](ExperimentKind k) { return all ? default_times(k) : cfg.times; };
        if (cfg.kind == ExperimentKind::build_mf || all) {
            Checks c(r, all ? "build-mf." : "");
            run_build_mf(ctx, c);
        }
        if (cfg.kind == ExperimentKind::trajectory || all) {
            Checks c(r, all ? "trajectory." : "");
            run_trajectory(ctx, cfg.times, c, r, true);
        }
        if (cfg.kind == ExperimentKind::semigroup_check || all) {
            Checks c(r, all ? "semigroup-check." : "");
            run_semigroup(ctx, times_for(ExperimentKind::semigroup_check), c, r, !all);
        }
        if (cfg.kind == ExperimentKind::intertwining || all) {
            Checks c(r, all ? "intertwining." : "");
            run_intertwining(ctx, times_for(ExperimentKind::intertwining), c, r, !all);
        }
        if (cfg.kind == ExperimentKind::time_observable || all) {
            Checks c(r, all ? "time-observable." : "");
            run_time_observable(ctx, cfg, times_for(ExperimentKind::time_observable), c, r, !all);
        }
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_outputs(const RunReport& report, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "trajectory.csv");
        out << "t,value\n";
        for (const auto& [t, v] : report.trajectory) out << format_double(t) << ',' << format_double(v) << '\n';
    }
    {
        std::ofstream out(dir / "residuals.csv");
        out << "name,n,value\n";
        for (const auto& res : report.residuals)
            out << res.name << ',' << res.n << ',' << format_double(res.value) << '\n';
    }
    std::ofstream out(dir / "report.json");
    out << report.to_json().dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + (dir / "report.json").string());
}

}  // namespace irrevflow
