#include "agepde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "agepde/hybrid.hpp"
#include "agepde/spectral.hpp"

namespace agepde::verify {

using nlohmann::ordered_json;

bool VerifyReport::all_pass() const {
    for (const auto& c : checks)
        if (c.status == Status::fail) return false;
    return true;
}

namespace {
const char* to_cstr(Status s) {
    switch (s) {
        case Status::pass: return "pass";
        case Status::fail: return "fail";
        case Status::skipped: return "skipped";
    }
    return "?";
}
}  // namespace

std::string VerifyReport::to_json() const {
    ordered_json j;
    j["schema"] = schema;
    j["scenario"] = scenario;
    j["checks"] = ordered_json::array();
    for (const auto& c : checks) {
        ordered_json jc;
        jc["name"] = c.name;
        jc["status"] = to_cstr(c.status);
        jc["measured"] = c.measured;
        jc["tolerance"] = c.tolerance;
        jc["note"] = c.note;
        j["checks"].push_back(jc);
    }
    return j.dump(2) + "\n";
}

std::string VerifyReport::to_text() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << "[" << to_cstr(c.status) << "] " << c.name;
        if (c.status != Status::skipped)
            out << "  measured=" << c.measured << " tol=" << c.tolerance;
        if (!c.note.empty()) out << "  (" << c.note << ")";
        out << "\n";
    }
    return out.str();
}

AgeGrid analysis_grid(const AgeGrid& base, double target_da, std::size_t max_cells) {
    std::size_t n = static_cast<std::size_t>(std::ceil(base.a_max / target_da));
    n = std::max(n, base.n_cells);
    n = std::min(n, max_cells);
    return AgeGrid(base.a_max, n);
}

namespace {

struct Runner {
    const Scenario& sc;
    const VerifyOptions& opts;
    VerifyReport report;
    std::mt19937_64 rng;

    // lazily shared expensive artifacts
    bool hybrid_sim_done = false;
    hybrid::HybridTrajectory hybrid_traj;
    bool hybrid_ss_done = false;
    hybrid::HybridSteadyState hybrid_ss;  // on the fine grid
    ModelParams* fine_params = nullptr;
    std::optional<ModelParams> fine_params_store;

    Runner(const Scenario& s, const VerifyOptions& o) : sc(s), opts(o), rng(o.seed) {
        report.scenario = sc.name;
    }

    bool enabled(const std::string& name) const {
        if (sc.verify_only.empty()) return true;
        return std::find(sc.verify_only.begin(), sc.verify_only.end(), name) !=
               sc.verify_only.end();
    }

    void add(const std::string& name, Status st, double measured, double tol,
             const std::string& note = "") {
        report.checks.push_back({name, st, measured, tol, note});
    }
    void skip(const std::string& name, const std::string& why) {
        add(name, Status::skipped, 0.0, 0.0, why);
    }
    void outcome(const std::string& name, bool ok, double measured, double tol,
                 const std::string& note = "") {
        add(name, ok ? Status::pass : Status::fail, measured, tol, note);
    }

    template <class F>
    void guarded(const std::string& name, F&& body) {
        if (!enabled(name)) {
            skip(name, "disabled by scenario verify.checks");
            return;
        }
        try {
            body(name);
        } catch (const pde::DivergedError& e) {
            add(name, Status::fail, 0.0, 0.0,
                std::string("solver diverged: ") + e.what() + " at t=" +
                    io_format(e.last_valid_time));
        } catch (const std::exception& e) {
            add(name, Status::fail, 0.0, 0.0, std::string("error: ") + e.what());
        }
    }

    static std::string io_format(double v) {
        std::ostringstream o;
        o << v;
        return o.str();
    }

    const ModelParams& fine() {
        if (!fine_params_store) fine_params_store.emplace(sc.params_on(analysis_grid(sc.grid, 5e-5)));
        return *fine_params_store;
    }

    const hybrid::HybridSteadyState& hybrid_steady() {
        if (!hybrid_ss_done) {
            hybrid_ss = hybrid::steady_state_hybrid(fine());
            hybrid_ss_done = true;
        }
        return hybrid_ss;
    }

    const hybrid::HybridTrajectory& hybrid_simulation() {
        if (!hybrid_sim_done) {
            const ModelParams params = sc.params();
            hybrid::HybridConfig cfg{sc.t_end, sc.record_every};
            hybrid_traj = hybrid::simulate_hybrid(params, sc.init_n1.materialize(sc.grid),
                                                  sc.init_N2, cfg);
            hybrid_sim_done = true;
        }
        return hybrid_traj;
    }

    // analytic root of the constant-rate growth map:
    // lambda^2 + (k + d - b) lambda + (k d - b d - k btilde) = 0, largest root
    static double constant_rate_lambda0(double b, double bt, double k, double d) {
        const double p = k + d - b;
        const double q = k * d - b * d - k * bt;
        const double disc = p * p - 4.0 * q;
        return 0.5 * (-p + std::sqrt(std::max(0.0, disc)));
    }

    void run();
    void c01(const std::string&);
    void c02(const std::string&);
    void c03(const std::string&);
    void c04(const std::string&);
    void c05(const std::string&);
    void c06(const std::string&);
    void c07(const std::string&);
    void c08(const std::string&);
    void c09(const std::string&);
    void c10(const std::string&);
    void c11(const std::string&);
    void c12(const std::string&);
    void c13(const std::string&);
    void c14(const std::string&);
    void c15(const std::string&);
    void c16(const std::string&);
};

void Runner::c01(const std::string& name) {
    if (!sc.rates_constant()) {
        skip(name, "hypothesis unmet: closed form needs constant rates");
        return;
    }
    const double analytic =
        constant_rate_lambda0(sc.b.value, sc.btilde.value, sc.k.value, sc.d.value);
    if (!(analytic > 0.0)) {
        skip(name, "hypothesis unmet: R0 <= 1, no positive root");
        return;
    }
    const auto lam = spectral::solve_lambda0(fine());
    const double tol = 1e-9 * opts.tol_scale;
    outcome(name, std::abs(lam.lambda0 - analytic) <= tol, std::abs(lam.lambda0 - analytic), tol);
}

void Runner::c02(const std::string& name) {
    const bool no_compet = sc.eta1 == 0 && sc.eta2 == 0 && sc.c1 == 0 && sc.c2 == 0 &&
                           sc.ctilde1 == 0 && sc.ctilde2 == 0;
    if (sc.model != ModelKind::pde_linear || !no_compet) {
        skip(name, "hypothesis unmet: needs pde-linear with zero competition");
        return;
    }
    if (!sc.assumptions.non_extinction) {
        skip(name, "hypothesis unmet: R0 <= 1");
        return;
    }
    const ModelParams params = sc.params();
    const auto lam = spectral::solve_lambda0(params);
    const auto eig = spectral::eigenfunctions(params, lam.lambda0);
    const double mu = spectral::gre_decay_rate(params, eig);
    if (!(mu > 0.0)) {
        skip(name, "GRE hypothesis unmet: decay-rate infimum <= 0");
        return;
    }
    PopulationState init(0.0, sc.init_n1.materialize(sc.grid), sc.init_n2.materialize(sc.grid),
                         params);
    pde::SolverConfig cfg;
    cfg.t_end = sc.t_end;
    cfg.record_every = sc.record_every;
    cfg.mode = pde::SimMode::linear_prescribed;
    const auto traj = pde::simulate(params, init, cfg);
    const double m0 =
        spectral::eigen_weighted_mass(eig, traj.states.front().n1, traj.states.front().n2);
    double H0 = spectral::gre_entropy(traj.states.front(), eig, m0);
    double prev = H0;
    bool monotone = true;
    double Hend = H0;
    for (const auto& st : traj.states) {
        const double H = spectral::gre_entropy(st, eig, m0);
        if (H > prev + 1e-10 * H0) monotone = false;
        prev = H;
        Hend = H;
    }
    const double bound = H0 * std::exp(-mu * sc.t_end) * (1.0 + 0.1 * opts.tol_scale);
    outcome(name, monotone && Hend <= bound, Hend, bound,
            monotone ? "" : "entropy increased between records");
}

void Runner::c03(const std::string& name) {
    if (sc.model != ModelKind::pde_linear) {
        skip(name, "hypothesis unmet: needs pde-linear");
        return;
    }
    const ModelParams params = sc.params();
    std::uniform_real_distribution<double> u(0.1, 1.0);
    double worst = 0.0;
    for (int pair = 0; pair < 5; ++pair) {
        auto lower1 = AgeFunction::sample(sc.grid, [&](double a) { return u(rng) * std::exp(-a); });
        auto lower2 = AgeFunction::sample(sc.grid, [&](double a) { return u(rng) * std::exp(-a); });
        std::vector<double> u1(lower1.values().begin(), lower1.values().end());
        std::vector<double> u2(lower2.values().begin(), lower2.values().end());
        for (auto& v : u1) v *= 1.0 + u(rng);
        for (auto& v : u2) v *= 1.0 + u(rng);
        pde::SolverConfig cfg;
        cfg.t_end = std::min(sc.t_end, 3.0);
        cfg.record_every = std::max<long>(1, sc.record_every);
        cfg.mode = pde::SimMode::linear_prescribed;
        cfg.s_table = sc.s_table;
        const auto t1 = pde::simulate(params, PopulationState(0, lower1, lower2, params), cfg);
        const auto t2 = pde::simulate(
            params,
            PopulationState(0, AgeFunction(sc.grid, u1), AgeFunction(sc.grid, u2), params), cfg);
        for (std::size_t s = 0; s < t1.states.size(); ++s)
            for (std::size_t i = 0; i < sc.grid.n_nodes(); ++i) {
                worst = std::max(worst, t1.states[s].n1[i] - t2.states[s].n1[i]);
                worst = std::max(worst, t1.states[s].n2[i] - t2.states[s].n2[i]);
            }
    }
    outcome(name, worst <= 0.0, worst, 0.0);
}

void Runner::c04(const std::string& name) {
    if (sc.model != ModelKind::pde_linear) {
        skip(name, "hypothesis unmet: a-priori bound stated for the prescribed-S system");
        return;
    }
    const ModelParams params = sc.params();
    PopulationState init(0.0, sc.init_n1.materialize(sc.grid), sc.init_n2.materialize(sc.grid),
                         params);
    pde::SolverConfig cfg;
    cfg.t_end = sc.t_end;
    cfg.record_every = sc.record_every;
    cfg.mode = pde::SimMode::linear_prescribed;
    cfg.s_table = sc.s_table;
    const auto traj = pde::simulate(params, init, cfg);
    const double rate = std::max(params.b.max(), params.btilde.max());
    const double mass0 = traj.N1.front() + traj.N2.front();
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double bound = mass0 * std::exp(rate * traj.times[i]);
        worst = std::max(worst, (traj.N1[i] + traj.N2[i]) / bound - 1.0);
    }
    const double tol = 0.01 * opts.tol_scale;
    outcome(name, worst <= tol, worst, tol);
}

void Runner::c05(const std::string& name) {
    if (sc.model != ModelKind::ode) {
        skip(name, "hypothesis unmet: needs ode model");
        return;
    }
    const auto p = sc.ode_params();
    if (!(p.c1_tot() > 0 && p.ctilde2 > 0 && p.b / p.k + p.btilde / p.d > 1.0)) {
        skip(name, "hypothesis unmet: needs c1_tot > 0, ctilde2 > 0, b/k + btilde/d > 1");
        return;
    }
    const auto ss = ode::steady_state_ode(p);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    double worst = 0.0;
    long clips = 0;
    for (int i = 0; i < 10; ++i) {
        const auto traj = ode::integrate_ode(p, u(rng), u(rng), sc.t_end, 0.01);
        clips += traj.clip_events;
        worst = std::max(worst, std::hypot(traj.N1.back() - ss.N1s, traj.N2.back() - ss.N2s));
    }
    const double tol = 1e-5 * opts.tol_scale;
    outcome(name, worst <= tol && clips == 0, worst, tol, clips ? "clip events > 0" : "");
}

void Runner::c06(const std::string& name) {
    if (sc.model != ModelKind::ode) {
        skip(name, "hypothesis unmet: needs ode model");
        return;
    }
    const auto base = sc.ode_params();
    std::uniform_real_distribution<double> upt(1e-3, 50.0);
    std::uniform_real_distribution<double> scale(0.5, 2.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (int draw = 0; draw < 10; ++draw) {
        ode::OdeParams p = base;
        p.k *= scale(rng);
        p.btilde *= scale(rng);
        p.c1 = base.c1 * scale(rng) + 1e-3;
        p.ctilde2 = base.ctilde2 * scale(rng) + 1e-3;
        for (int pt = 0; pt < 1000; ++pt)
            worst = std::max(worst, ode::dulac_divergence(p, upt(rng), upt(rng)));
    }
    outcome(name, worst < 0.0, worst, 0.0);
}

void Runner::c07(const std::string& name) {
    if (sc.model != ModelKind::ode) {
        skip(name, "hypothesis unmet: needs ode model");
        return;
    }
    const auto p = sc.ode_params();
    if (!(p.b / p.k + p.btilde / p.d < 1.0)) {
        skip(name, "hypothesis unmet: needs b/k + btilde/d < 1");
        return;
    }
    const auto traj = ode::integrate_ode(p, sc.init_N1, sc.init_N2, sc.t_end, 0.01);
    const double dist = std::hypot(traj.N1.back(), traj.N2.back());
    const double tol = 1e-6 * opts.tol_scale;
    outcome(name, dist <= tol, dist, tol);
}

void Runner::c08(const std::string& name) {
    if (sc.model != ModelKind::ode) {
        skip(name, "hypothesis unmet: needs ode model");
        return;
    }
    auto p = sc.ode_params();
    if (!(p.b <= p.k)) {
        skip(name, "hypothesis unmet: needs b <= k");
        return;
    }
    if (!(p.c1_tot() > 0 && p.ctilde2 > 0)) {
        skip(name, "hypothesis unmet: needs c1_tot > 0 and ctilde2 > 0");
        return;
    }
    double prev_err = std::numeric_limits<double>::infinity();
    bool shrinking = true;
    double last = 0.0;
    for (double bt : {0.1, 0.05, 0.025}) {
        p.btilde = bt;
        if (!(p.btilde * p.k / p.d + p.b - p.k > 0.0)) {
            skip(name, "hypothesis unmet: btilde k/d + b - k <= 0 in the sweep");
            return;
        }
        const auto approx = ode::asymptotic_small_btilde(p);
        const auto exact = ode::steady_state_ode(p);
        const double err = std::abs(approx[0] - exact.N1s) / exact.N1s;
        if (err >= prev_err) shrinking = false;
        prev_err = err;
        last = err;
    }
    outcome(name, shrinking, last, prev_err, shrinking ? "" : "relative error not monotone");
}

void Runner::c09(const std::string& name) {
    if (sc.model != ModelKind::hybrid) {
        skip(name, "hypothesis unmet: needs hybrid model");
        return;
    }
    if (!sc.assumptions.non_extinction) {
        skip(name, "hypothesis unmet: R0 <= 1");
        return;
    }
    const auto& ss = hybrid_steady();
    const ModelParams& p = fine();
    double worst = 0.0;
    worst = std::max(worst, std::abs(p.c1_tot() * ss.N1s + p.c2_tot() * ss.N2s - ss.lambda0));
    const double qscale = std::max({std::abs(ss.A), std::abs(ss.B), std::abs(ss.C), 1.0});
    worst = std::max(worst,
                     std::abs(ss.A * ss.N2s * ss.N2s + ss.B * ss.N2s + ss.C) / qscale);
    bool ok = ss.C > 0.0 && ss.Delta > 0.0 && ss.I < 1.0 / ss.lambda0;
    ok = ok && std::abs(integrate(ss.n1_profile) - ss.N1s) <= 1e-8 * (1.0 + ss.N1s);
    std::string note;
    if (p.c2_tot() > 0.0) {
        const double res = hybrid::discriminant_identity(p, ss);
        worst = std::max(worst, res / qscale);
    } else {
        note = "c2_tot = 0: discriminant identity not applicable";
    }
    const double tol = 1e-9 * opts.tol_scale;
    outcome(name, ok && worst <= tol, worst, tol, note);
}

void Runner::c10(const std::string& name) {
    if (sc.model != ModelKind::hybrid || !sc.rates_constant()) {
        skip(name, "hypothesis unmet: needs hybrid model with constant rates");
        return;
    }
    if (!sc.assumptions.non_extinction || !(sc.ctilde2 > 0.0)) {
        skip(name, "hypothesis unmet: needs R0 > 1 and ctilde2 > 0");
        return;
    }
    const auto& ss = hybrid_steady();
    const auto os = ode::steady_state_ode(sc.ode_params());
    const double gap = std::max(std::abs(ss.N1s - os.N1s), std::abs(ss.N2s - os.N2s));
    const double tol = 1e-8 * (1.0 + ss.N1s + ss.N2s) * opts.tol_scale;
    outcome(name, gap <= tol, gap, tol);
}

void Runner::c11(const std::string& name) {
    if (sc.model != ModelKind::hybrid) {
        skip(name, "hypothesis unmet: needs hybrid model");
        return;
    }
    if (!sc.assumptions.non_extinction) {
        skip(name, "hypothesis unmet: R0 <= 1");
        return;
    }
    const ModelParams& p = fine();
    const auto rep = hybrid::stability_verdict(p, hybrid_steady());
    double worst = std::abs(rep.b2_direct - rep.b2_identity) / (1.0 + std::abs(rep.b2_direct));
    worst = std::max(worst, std::abs(rep.b3_direct - rep.b3_identity) /
                                (1.0 + std::abs(rep.b3_direct)));
    bool ok = rep.stable && rep.det_crosscheck_residual <= 1e-9;

    // trivial-state verdict must flip across R0 = 1
    for (double target : {0.5, 2.0}) {
        std::vector<double> bv(p.b.values().begin(), p.b.values().end());
        const double r0 = rep.r0;
        for (double& v : bv) v *= target / r0;
        ModelParams p2(AgeFunction(p.grid(), std::move(bv)), p.btilde, p.k, p.d, p.eta1, p.eta2,
                       p.c1, p.c2, p.ctilde1, p.ctilde2, p.psi1, p.psi2);
        const auto triv = hybrid::stability_verdict_trivial(p2);
        ok = ok && (triv.stable == (target < 1.0));
    }
    const double tol = 1e-8 * opts.tol_scale;
    outcome(name, ok && worst <= tol, worst, tol);
}

void Runner::c12(const std::string& name) {
    if (sc.model != ModelKind::hybrid) {
        skip(name, "hypothesis unmet: needs hybrid model");
        return;
    }
    if (!sc.assumptions.non_extinction) {
        skip(name, "hypothesis unmet: R0 <= 1");
        return;
    }
    const auto& ss = hybrid_steady();
    const double ascale = std::max({std::abs(ss.A), std::abs(ss.B), std::abs(ss.C), 1.0});
    if (std::abs(ss.A) <= 1e-12 * ascale) {
        skip(name, "hypothesis unmet: A = 0 (degenerate sensitivity)");
        return;
    }
    const ModelParams& p = fine();
    const auto rep = hybrid::smurf_ratio_sensitivity(p, ss);
    const double denom = std::max({std::abs(rep.analytic), std::abs(rep.finite_difference), 1e-12});
    const double relgap = std::abs(rep.analytic - rep.finite_difference) / denom;
    bool ok = rep.r_bound_holds;

    ModelParams p_big(p.b, p.btilde, p.k, p.d, 1e3, p.eta2, p.c1, p.c2, p.ctilde1, p.ctilde2,
                      p.psi1, p.psi2);
    const auto ss_big = hybrid::steady_state_hybrid(p_big);
    const auto rep_big = hybrid::smurf_ratio_sensitivity(p_big, ss_big);
    ok = ok && rep_big.analytic > 0.0;

    const double tol = 1e-4 * opts.tol_scale;
    outcome(name, ok && relgap <= tol, relgap, tol, ok ? "" : "bound or large-eta1 sign failed");
}

void Runner::c13(const std::string& name) {
    if (sc.model != ModelKind::hybrid) {
        skip(name, "hypothesis unmet: needs hybrid model");
        return;
    }
    if (!sc.assumptions.non_extinction) {
        skip(name, "hypothesis unmet: R0 <= 1");
        return;
    }
    const auto rep = hybrid::one_phase_and_comparisons(fine());
    bool ok = rep.n1_order && rep.n2_order && rep.total_order_iff;
    std::string note;
    if (rep.sum_ge_applicable)
        ok = ok && rep.sum_ge;
    else
        note = "c2_tot > c1_tot: total-size comparison not guaranteed";
    outcome(name, ok, rep.N1s + rep.N2s - rep.N_star, 0.0, note);
}

void Runner::c14(const std::string& name) {
    if (sc.model != ModelKind::hybrid) {
        skip(name, "hypothesis unmet: needs hybrid model");
        return;
    }
    if (!sc.assumptions.non_extinction) {
        skip(name, "hypothesis unmet: R0 <= 1");
        return;
    }
    const ModelParams params = sc.params();
    if (!(params.k.min() > 0.0)) {
        skip(name, "hypothesis unmet: inf k = 0");
        return;
    }
    const auto& traj = hybrid_simulation();
    // steady state on the simulation grid keeps the audit self-consistent
    const auto ss = hybrid::steady_state_hybrid(params);
    const auto rep =
        hybrid::bounds_and_assumptions(params, sc.init_n1.materialize(sc.grid), sc.init_N2, traj, ss);
    if (!rep.all_flags()) {
        skip(name, "hypothesis unmet: rate-assumption flags not all true");
        return;
    }
    const bool ok = rep.audit_upper_ok && rep.t0_estimate >= 0.0 && rep.audit_lower_ok;
    outcome(name, ok, std::max(rep.sup_N1 - rep.N1_bar, rep.sup_N2 - rep.N2_bar), 0.0,
            ok ? "" : "bound audit failed");
}

void Runner::c15(const std::string& name) {
    if (sc.model != ModelKind::hybrid) {
        skip(name, "hypothesis unmet: needs hybrid model");
        return;
    }
    if (!sc.assumptions.non_extinction) {
        skip(name, "hypothesis unmet: R0 <= 1");
        return;
    }
    if (sc.t_end < 20.0) {
        skip(name, "hypothesis unmet: t_end too short for the convergence audit");
        return;
    }
    const ModelParams params = sc.params();
    const auto& traj = hybrid_simulation();
    const auto ss = hybrid::steady_state_hybrid(params);
    const auto diag = hybrid::convergence_diagnostics(params, traj, ss);
    const auto rep = hybrid::bounds_and_assumptions(params, sc.init_n1.materialize(sc.grid),
                                                    sc.init_N2, traj, ss);

    auto at_time = [&](double t) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < diag.times.size(); ++i)
            if (std::abs(diag.times[i] - t) < std::abs(diag.times[best] - t)) best = i;
        return best;
    };
    const std::size_t half = at_time(0.5 * sc.t_end);
    const std::size_t full = diag.times.size() - 1;
    bool ok = diag.profile_gap[full] < 0.5 * diag.profile_gap[half];

    const double tol_rates = 1e-3 * opts.tol_scale;
    ok = ok && std::abs(diag.lambda_t[full] - ss.lambda0) <= tol_rates &&
         std::abs(diag.kappa_t[full] - ss.kappa0) <= tol_rates;

    double worst_V = 0.0;
    if (rep.t0_estimate >= 0.0) {
        double v_t0 = 0.0;
        bool started = false;
        double prev = 0.0;
        for (std::size_t i = 0; i < diag.times.size(); ++i) {
            if (diag.times[i] < rep.t0_estimate) continue;
            if (!started) {
                v_t0 = diag.lyapunov_V[i];
                prev = v_t0;
                started = true;
                continue;
            }
            worst_V = std::max(worst_V, diag.lyapunov_V[i] - prev);
            prev = diag.lyapunov_V[i];
        }
        ok = ok && worst_V <= 1e-8 * std::max(v_t0, 1e-300);
    } else {
        ok = false;
    }

    const double final_gap = std::hypot(traj.N1.back() - ss.N1s, traj.N2.back() - ss.N2s);
    const double tol_final = 1e-3 * opts.tol_scale;
    ok = ok && final_gap <= tol_final;
    outcome(name, ok, final_gap, tol_final);
}

void Runner::c16(const std::string& name) {
    if (sc.model != ModelKind::pde_linear || sc.s_table.empty()) {
        skip(name,
             "hypothesis unmet: first-order refinement runs on pde-linear with a varying S table");
        return;
    }
    if (sc.t_end > 20.0) {
        skip(name, "hypothesis unmet: t_end too long for the refinement sweep");
        return;
    }
    std::array<double, 3> finals{};
    for (int level = 0; level < 3; ++level) {
        const AgeGrid g(sc.grid.a_max, sc.grid.n_cells << level);
        const ModelParams params = sc.params_on(g);
        PopulationState init(0.0, sc.init_n1.materialize(g), sc.init_n2.materialize(g), params);
        pde::SolverConfig cfg;
        cfg.t_end = sc.t_end;
        cfg.record_every = 1 << 30;
        cfg.mode = pde::SimMode::linear_prescribed;
        cfg.s_table = sc.s_table;
        const auto traj = pde::simulate(params, init, cfg);
        finals[static_cast<std::size_t>(level)] = traj.N1.back();
    }
    const double d1 = std::abs(finals[0] - finals[1]);
    const double d2 = std::abs(finals[1] - finals[2]);
    const double ratio = d2 > 0.0 ? d1 / d2 : 0.0;
    outcome(name, ratio >= 1.5 && ratio <= 2.5, ratio, 2.0);
}

void Runner::run() {
    guarded("c01_lambda0_closed_forms", [this](const std::string& n) { c01(n); });
    guarded("c02_gre_decay", [this](const std::string& n) { c02(n); });
    guarded("c03_comparison_principle", [this](const std::string& n) { c03(n); });
    guarded("c04_l1_mass_bound", [this](const std::string& n) { c04(n); });
    guarded("c05_ode_steady_global_stability", [this](const std::string& n) { c05(n); });
    guarded("c06_dulac_negativity", [this](const std::string& n) { c06(n); });
    guarded("c07_ode_extinction", [this](const std::string& n) { c07(n); });
    guarded("c08_small_btilde_asymptotics", [this](const std::string& n) { c08(n); });
    guarded("c09_hybrid_steady_state", [this](const std::string& n) { c09(n); });
    guarded("c10_cross_model_consistency", [this](const std::string& n) { c10(n); });
    guarded("c11_local_stability", [this](const std::string& n) { c11(n); });
    guarded("c12_ratio_sensitivity", [this](const std::string& n) { c12(n); });
    guarded("c13_competition_comparisons", [this](const std::string& n) { c13(n); });
    guarded("c14_population_bounds", [this](const std::string& n) { c14(n); });
    guarded("c15_global_convergence", [this](const std::string& n) { c15(n); });
    guarded("c16_grid_convergence", [this](const std::string& n) { c16(n); });
}

}  // namespace

VerifyReport run_verify(const Scenario& sc, const VerifyOptions& opts) {
    Runner runner(sc, opts);
    runner.run();
    return runner.report;
}

}  // namespace agepde::verify
