#include "agepde/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agepde/parallel.hpp"
#include "agepde/pde.hpp"
#include "agepde/polyroots.hpp"
#include "agepde/spectral.hpp"

namespace agepde::hybrid {

namespace {

struct SurvivalTables {
    std::vector<double> Hk;
    std::vector<double> one_sk;  // e^{-int k}
    std::vector<double> b_sk;
    std::vector<double> k_sk;
    std::vector<double> ak_sk;  // a k(a) e^{-int k}

    explicit SurvivalTables(const ModelParams& p) {
        const AgeGrid& g = p.grid();
        const std::size_t n = g.n_nodes();
        Hk = cumulative_trapezoid(g, p.k.values());
        one_sk.resize(n);
        b_sk.resize(n);
        k_sk.resize(n);
        ak_sk.resize(n);
        for_each_index(n, [&](std::size_t i) {
            const double sk = std::exp(-Hk[i]);
            one_sk[i] = sk;
            b_sk[i] = p.b[i] * sk;
            k_sk[i] = p.k[i] * sk;
            ak_sk[i] = g.node(i) * k_sk[i];
        });
    }
};

double birth_map(const AgeGrid& g, const std::vector<double>& b_sk, double lambda) {
    return integrate_decayed(g, b_sk, lambda);
}

// Root of int b e^{-int k - lambda a} = 1 by bracketed bisection.
double solve_birth_lambda0(const AgeGrid& g, const std::vector<double>& b_sk) {
    const double r0 = birth_map(g, b_sk, 0.0);
    if (!(r0 > 1.0))
        throw NoPositiveSteadyState("steady_state_hybrid: int b e^{-int k} <= 1, only the trivial state");
    double lo = 0.0, hi = 1.0;
    int doublings = 0;
    while (birth_map(g, b_sk, hi) >= 1.0) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 200) throw NoPositiveSteadyState("steady_state_hybrid: failed to bracket lambda0");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (birth_map(g, b_sk, mid) >= 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct QuadraticABC {
    double A, B, C;
};

QuadraticABC quadratic_coeffs(const ModelParams& p, double lambda0, double kappa0) {
    const double c1t = p.c1_tot();
    const double c2t = p.c2_tot();
    const double ratio = c2t / c1t;
    QuadraticABC q;
    q.A = p.eta1 * ratio * ratio + (p.ctilde1 - p.eta2) * ratio - p.ctilde2;
    q.B = -kappa0 * ratio - 2.0 * lambda0 * p.eta1 * c2t / (c1t * c1t) -
          (p.ctilde1 - p.eta2) * lambda0 / c1t - p.d[0];
    q.C = (lambda0 / c1t) * (kappa0 + p.eta1 * lambda0 / c1t);
    return q;
}

// The unique admissible root: positive Y with positive X = (lambda0-c2t Y)/c1t.
double select_root(const QuadraticABC& q, const ModelParams& p, double lambda0, CaseTag& tag) {
    const double c1t = p.c1_tot();
    const double c2t = p.c2_tot();
    const double scale = std::max({std::abs(q.A), std::abs(q.B), std::abs(q.C)});
    std::vector<double> roots;
    if (std::abs(q.A) <= 1e-14 * scale)
        roots = real_roots_quadratic(0.0, q.B, q.C);
    else
        roots = real_roots_quadratic(q.A, q.B, q.C);
    for (double& y : roots) y = polish_root({q.A, q.B, q.C}, y);

    std::vector<double> admissible;
    for (double y : roots) {
        if (!(y > 0.0)) continue;
        if (c2t > 0.0 && !(lambda0 - c2t * y > 0.0)) continue;
        admissible.push_back(y);
    }
    if (c2t == 0.0)
        tag = CaseTag::c2tot_zero;
    else if (q.A > 0.0)
        tag = CaseTag::A_positive_two_roots;
    else
        tag = CaseTag::A_nonpositive_one_root;
    if (admissible.size() != 1)
        throw NoPositiveSteadyState("steady_state_hybrid: admissible root count != 1");
    (void)c1t;
    return admissible.front();
}

struct LambdaKappa {
    double lambda_t, kappa_t;
};

LambdaKappa rates_of_profile(const ModelParams& p, const AgeFunction& n1, double N1) {
    const AgeGrid& g = p.grid();
    const std::size_t n = g.n_nodes();
    std::vector<double> bk(n), kk(n);
    for (std::size_t i = 0; i < n; ++i) {
        bk[i] = (p.b[i] - p.k[i]) * n1[i];
        kk[i] = p.k[i] * n1[i];
    }
    return {integrate(g, bk) / N1, integrate(g, kk) / N1};
}

}  // namespace

void require_hybrid_form(const ModelParams& params) {
    if (params.btilde.max() > 0.0)
        throw ConfigError("hybrid: requires btilde identically zero");
    if (params.d.max() != params.d.min())
        throw ConfigError("hybrid: requires a constant death rate d");
    if (!(params.c1_tot() > 0.0))
        throw ConfigError("hybrid: requires c1_tot > 0");
}

HybridSteadyState steady_state_hybrid(const ModelParams& params) {
    require_hybrid_form(params);
    const AgeGrid& g = params.grid();
    const SurvivalTables tabs(params);

    HybridSteadyState ss;
    ss.lambda0 = solve_birth_lambda0(g, tabs.b_sk);
    ss.I = integrate_decayed(g, tabs.one_sk, ss.lambda0);
    ss.kappa0 = 1.0 / ss.I - ss.lambda0;

    const auto q = quadratic_coeffs(params, ss.lambda0, ss.kappa0);
    ss.A = q.A;
    ss.B = q.B;
    ss.C = q.C;
    ss.Delta = q.B * q.B - 4.0 * q.A * q.C;
    ss.N2s = select_root(q, params, ss.lambda0, ss.case_tag);
    ss.N1s = (ss.lambda0 - params.c2_tot() * ss.N2s) / params.c1_tot();
    if (!(ss.N1s > 0.0))
        throw NoPositiveSteadyState("steady_state_hybrid: nonpositive N1 at the selected root");

    const double n1_at_0 = ss.N1s / ss.I;
    std::vector<double> prof(g.n_nodes());
    const auto decay = exp_decay_nodes(g, ss.lambda0);
    for_each_index(g.n_nodes(), [&](std::size_t i) { prof[i] = n1_at_0 * tabs.one_sk[i] * decay[i]; });
    ss.n1_profile = AgeFunction(g, std::move(prof));
    return ss;
}

double discriminant_identity(const ModelParams& params, const HybridSteadyState& ss) {
    const double c2t = params.c2_tot();
    if (!(c2t > 0.0)) throw DomainError("discriminant_identity: requires c2_tot > 0");
    const double d = params.d[0];
    const double lam = ss.lambda0;
    const double res_b =
        std::abs(c2t * ss.B - (-lam * ss.A - lam * params.ctilde2 - (c2t * c2t / lam) * ss.C - c2t * d));
    const double u = lam / c2t;
    const double v = c2t / lam;
    const double sq = -u * ss.A - u * params.ctilde2 + v * ss.C - d;
    const double res_delta = std::abs(ss.Delta - (sq * sq + 4.0 * v * ss.C * (u * params.ctilde2 + d)));
    return std::max(res_b, res_delta);
}

StabilityReport stability_verdict_trivial(const ModelParams& params) {
    StabilityReport rep;
    rep.trivial_state = true;
    const SurvivalTables tabs(params);
    rep.r0 = integrate(params.grid(), tabs.b_sk);
    rep.stable = rep.r0 < 1.0;
    return rep;
}

StabilityReport stability_verdict(const ModelParams& params, const HybridSteadyState& ss) {
    StabilityReport rep;
    const double c1t = params.c1_tot();
    const double c2t = params.c2_tot();
    const double d = params.d[0];
    const double N1 = ss.N1s, N2 = ss.N2s;
    const AgeGrid& g = params.grid();
    const SurvivalTables tabs(params);
    rep.r0 = integrate(g, tabs.b_sk);

    const double n1_at_0 = N1 / ss.I;
    const double kn1 = n1_at_0 * integrate_decayed(g, tabs.k_sk, ss.lambda0);

    rep.b2_direct = params.ctilde1 * N1 + 2.0 * params.ctilde2 * N2 + d - params.eta2 * N1;
    rep.b3_direct = params.ctilde1 * N2 - 2.0 * params.eta1 * N1 - params.eta2 * N2;
    rep.b2_identity = (kn1 + params.eta1 * N1 * N1 + params.ctilde2 * N2 * N2) / N2;
    rep.b3_identity =
        (kn1 - params.ctilde2 * N2 * N2 - d * N2 - params.eta1 * N1 * N1) / N1;

    rep.coeff_linear = rep.b2_direct + c1t * N1;
    rep.coeff_const_unsimplified =
        rep.b2_direct * c1t * N1 - rep.b3_direct * c2t * N1 + c2t * n1_at_0 - ss.lambda0 * c2t * N1;
    rep.coeff_const = rep.b2_direct * c1t * N1 +
                      c2t * (params.ctilde2 * N2 * N2 + d * N2 + params.eta1 * N1 * N1);
    rep.stable = rep.coeff_linear > 0.0 && rep.coeff_const > 0.0;

    // Full 3x3 determinant at sample lambda, against the reduced quadratic.
    double worst = 0.0;
    for (double lam : {0.37, 0.83, 1.29}) {
        const double G = integrate_decayed(g, tabs.one_sk, ss.lambda0 + lam);
        const double a2 = c2t * n1_at_0 / lam;
        const double a3 = c1t * n1_at_0 / lam;
        const double b1 = -1.0 + (ss.lambda0 + lam) * G;
        const double b2 = rep.b2_direct + lam + (ss.lambda0 + lam) * G * a2 - ss.lambda0 * N1 * c2t / lam;
        const double b3 = rep.b3_direct + (ss.lambda0 + lam) * G * a3 - ss.lambda0 * N1 * c1t / lam;
        const double c1_ = -G;
        const double c2_ = c2t * N1 / lam - G * a2;
        const double c3_ = 1.0 + c1t * N1 / lam - G * a3;
        const double det = b2 * c3_ - b3 * c2_ - a2 * (b1 * c3_ - b3 * c1_) + a3 * (b1 * c2_ - b2 * c1_);
        const double target =
            (lam * lam + lam * rep.coeff_linear + rep.coeff_const_unsimplified) / lam;
        const double scale = std::max({std::abs(det), std::abs(target), 1.0});
        worst = std::max(worst, std::abs(det - target) / scale);
    }
    rep.det_crosscheck_residual = worst;
    return rep;
}

SensitivityReport smurf_ratio_sensitivity(const ModelParams& params, const HybridSteadyState& ss,
                                          double h) {
    const double c1t = params.c1_tot();
    const double c2t = params.c2_tot();
    const double d = params.d[0];
    const AgeGrid& g = params.grid();
    const SurvivalTables tabs(params);

    const double ascale = std::max({std::abs(ss.A), std::abs(ss.B), std::abs(ss.C), 1.0});
    if (std::abs(ss.A) <= 1e-12 * ascale)
        throw DomainError("smurf_ratio_sensitivity: A = 0 (degenerate quadratic)");

    SensitivityReport rep;
    rep.I = ss.I;
    rep.R = integrate_decayed(g, tabs.ak_sk, ss.lambda0) / (ss.lambda0 * ss.I * ss.I);
    rep.r_bound_holds = 1.0 / (ss.lambda0 * ss.I) >= rep.R - 1e-12;

    const double sqD = std::sqrt(ss.Delta);
    const double sum = ss.N1s + ss.N2s;
    rep.analytic = ss.lambda0 / (c1t * sum * sum) *
                   ((0.5 / ss.A) * (d / ss.lambda0 + rep.R * c2t / c1t) * (-1.0 - ss.B / sqD) -
                    ss.lambda0 * rep.R / (c1t * sqD));

    // Finite difference: rescale b so the perturbed growth rate hits
    // lambda0 + delta exactly, re-solve the steady state from scratch.
    auto ratio_at = [&](double delta) {
        const double target = ss.lambda0 + delta;
        const double scale_b = 1.0 / integrate_decayed(g, tabs.b_sk, target);
        std::vector<double> bv(params.b.values().begin(), params.b.values().end());
        for (double& v : bv) v *= scale_b;
        ModelParams p2(AgeFunction(g, std::move(bv)), params.btilde, params.k, params.d,
                       params.eta1, params.eta2, params.c1, params.c2, params.ctilde1,
                       params.ctilde2, params.psi1, params.psi2);
        const auto s2 = steady_state_hybrid(p2);
        return s2.N2s / (s2.N1s + s2.N2s);
    };
    const double d1 = (ratio_at(h) - ratio_at(-h)) / (2.0 * h);
    const double d2 = (ratio_at(0.5 * h) - ratio_at(-0.5 * h)) / h;
    rep.finite_difference = (4.0 * d2 - d1) / 3.0;
    return rep;
}

ComparisonReport one_phase_and_comparisons(const ModelParams& params) {
    require_hybrid_form(params);
    ComparisonReport rep;
    const SurvivalTables tabs(params);
    const double r0 = integrate(params.grid(), tabs.b_sk);

    const auto ss = steady_state_hybrid(params);
    rep.N1s = ss.N1s;
    rep.N2s = ss.N2s;
    rep.N_star = r0 > 1.0 ? ss.lambda0 / params.c1_tot() : 0.0;

    ModelParams no_eta(params.b, params.btilde, params.k, params.d, 0.0, 0.0, params.c1_tot(),
                       params.c2_tot(), params.ctilde1, params.ctilde2, params.psi1, params.psi2);
    const auto ss2 = steady_state_hybrid(no_eta);
    rep.N1ss = ss2.N1s;
    rep.N2ss = ss2.N2s;

    const double tol = 1e-12 * (1.0 + std::abs(rep.N1s) + std::abs(rep.N2s));
    rep.sum_ge_applicable = params.c2_tot() <= params.c1_tot() + tol;
    rep.sum_ge = rep.N1s + rep.N2s >= rep.N_star - tol;
    rep.n1_order = rep.N1ss >= rep.N1s - tol;
    rep.n2_order = rep.N2ss <= rep.N2s + tol;
    const bool lhs = params.c2_tot() <= params.c1_tot() + tol;
    const bool rhs = rep.N1ss + rep.N2ss <= rep.N1s + rep.N2s + tol;
    rep.total_order_iff = lhs == rhs;
    return rep;
}

HybridTrajectory simulate_hybrid(const ModelParams& params, const AgeFunction& n1_init,
                                 double N2_init, const HybridConfig& cfg) {
    require_hybrid_form(params);
    if (!(N2_init >= 0.0)) throw DomainError("simulate_hybrid: N2 init must be >= 0");
    require_same_grid(n1_init.grid(), params.grid(), "simulate_hybrid");
    const AgeGrid& g = params.grid();
    const double dt = g.da();
    const std::size_t n = g.n_nodes();
    const double d = params.d[0];

    std::vector<double> decay_k(n, 1.0);
    for (std::size_t j = 1; j < n; ++j)
        decay_k[j] = std::exp(-0.5 * (params.k[j - 1] + params.k[j]) * dt);
    if (g.da() * params.b[0] >= 1.0)
        throw ConfigError("simulate_hybrid: grid too coarse for the renewal closure");

    const long n_steps = static_cast<long>(std::llround(cfg.t_end / dt));
    const long stride = std::max<long>(1, cfg.record_every);

    std::vector<double> n1(n1_init.values().begin(), n1_init.values().end());
    std::vector<double> buf(n), scratch(n);
    const double da0 = g.da();
    {
        // renewal compatibility of the initial data at age 0
        scratch[0] = 0.0;
        for (std::size_t j = 1; j < n; ++j) scratch[j] = params.b[j] * n1[j];
        const double P0 = da0 * (block_sum(scratch) - 0.5 * scratch[n - 1]);
        n1[0] = P0 / (1.0 - 0.5 * da0 * params.b[0]);
    }
    double N1 = integrate(g, n1);
    double N2 = N2_init;
    const double initial_mass = N1 + N2;
    const double blowup = 1e12 * (initial_mass > 0.0 ? initial_mass : 1.0);

    HybridTrajectory traj;
    auto push = [&](double t) {
        traj.times.push_back(t);
        traj.N1.push_back(N1);
        traj.N2.push_back(N2);
    };
    auto record = [&](double t) {
        traj.record_times.push_back(t);
        traj.profiles.emplace_back(g, n1);
        traj.record_N2.push_back(N2);
    };
    push(0.0);
    record(0.0);

    const double da = g.da();
    const double alpha = 0.5 * da * params.b[0];
    for (long s = 0; s < n_steps; ++s) {
        // transition inflow at step start
        for_each_index(n, [&](std::size_t i) {
            scratch[i] = (params.k[i] + params.eta1 * N1 + params.eta2 * N2) * n1[i];
        });
        const double inflow = integrate(g, scratch);

        const double ctot = params.c1_tot() * N1 + params.c2_tot() * N2;
        const double f1 = std::exp(-ctot * dt);
        for_each_index(n - 1, [&](std::size_t i) {
            const std::size_t j = i + 1;
            buf[j] = n1[j - 1] * decay_k[j] * f1;
        });
        scratch[0] = 0.0;
        for_each_index(n - 1, [&](std::size_t i) {
            const std::size_t j = i + 1;
            scratch[j] = params.b[j] * buf[j];
        });
        const double P = da * (block_sum(scratch) - 0.5 * scratch[n - 1]);
        buf[0] = P / (1.0 - alpha);
        n1.swap(buf);

        const double outflow_rate = d + params.ctilde1 * N1 + params.ctilde2 * N2;
        if (dt * outflow_rate >= 1.0)
            throw ConfigError("simulate_hybrid: dt * phase-2 outflow rate >= 1, refine the grid");
        N2 = N2 + dt * (inflow - outflow_rate * N2);
        N1 = integrate(g, n1);

        const double t = static_cast<double>(s + 1) * dt;
        if (!std::isfinite(N1) || !std::isfinite(N2) || N1 + N2 > blowup)
            throw pde::DivergedError("simulate_hybrid: diverged", t - dt);
        push(t);
        if ((s + 1) % stride == 0 || s + 1 == n_steps) record(t);
    }
    return traj;
}

BoundsReport bounds_and_assumptions(const ModelParams& params, const AgeFunction& n1_init,
                                    double N2_init, const HybridTrajectory& traj,
                                    const HybridSteadyState& ss) {
    require_hybrid_form(params);
    const double k_lower = params.k.min();
    if (!(k_lower > 0.0)) throw DomainError("bounds_and_assumptions: requires inf k > 0");
    const double c1t = params.c1_tot();
    const double c2t = params.c2_tot();
    const double d = params.d[0];
    const double b_max = params.b.max();
    const double k_max = params.k.max();

    BoundsReport rep;
    const double N1_0 = integrate(n1_init);
    rep.N1_bar = std::max(N1_0, (b_max - k_lower) / c1t);
    rep.n2_bar_defined = d > params.eta2 * rep.N1_bar;
    rep.N2_bar = rep.n2_bar_defined
                     ? std::max(N2_init, (k_max + params.eta1 * rep.N1_bar * rep.N1_bar) /
                                             (d - params.eta2 * rep.N1_bar))
                     : std::numeric_limits<double>::infinity();

    rep.flag_i = d >= params.eta1 * rep.N1_bar;
    if (c2t == 0.0) {
        rep.flag_iv = true;
        rep.M_margin = std::numeric_limits<double>::infinity();
        rep.M_used = 2.0;
    } else {
        rep.M_margin = ss.lambda0 / (c2t * rep.N2_bar);
        rep.flag_iv = rep.M_margin > 1.0;
        rep.M_used = rep.flag_iv ? 0.5 * (1.0 + rep.M_margin) : 2.0;
    }
    const double term1 = b_max > k_lower ? ss.lambda0 / (rep.M_used * (b_max - k_lower))
                                         : std::numeric_limits<double>::infinity();
    rep.N1_under = std::min(term1, (ss.lambda0 / rep.M_used - c2t * rep.N2_bar) / c1t);

    rep.flag_ii = 2.0 * params.ctilde1 * rep.N1_under * c1t >=
                  c2t * (k_max + params.ctilde1 * rep.N2_bar + params.eta2 * ss.N2s +
                         params.eta1 * ss.N1s) +
                      c2t * params.eta1 * rep.N1_under;
    rep.flag_iii =
        d >= -0.5 * ((k_max + 2.0 * params.eta2 + params.eta1) * rep.N1_bar +
                     params.ctilde1 * rep.N2_bar + (params.eta2 - 2.0 * params.ctilde2) * ss.N2s +
                     (params.eta1 - params.ctilde1) * ss.N1s);

    // t0: first recorded time with lambda_t >= lambda0 / M for 5 consecutive records
    const double threshold = ss.lambda0 / rep.M_used;
    std::vector<double> lam_rec(traj.record_times.size());
    for (std::size_t i = 0; i < traj.profiles.size(); ++i) {
        const double N1r = integrate(traj.profiles[i]);
        lam_rec[i] = rates_of_profile(params, traj.profiles[i], N1r).lambda_t;
    }
    rep.t0_estimate = -1.0;
    for (std::size_t i = 0; i + 5 <= lam_rec.size(); ++i) {
        bool ok = true;
        for (std::size_t j = i; j < i + 5; ++j) ok = ok && lam_rec[j] >= threshold;
        if (ok) {
            rep.t0_estimate = traj.record_times[i];
            break;
        }
    }

    rep.sup_N1 = *std::max_element(traj.N1.begin(), traj.N1.end());
    rep.sup_N2 = *std::max_element(traj.N2.begin(), traj.N2.end());
    rep.audit_upper_ok = rep.sup_N1 <= rep.N1_bar && rep.sup_N2 <= rep.N2_bar;
    rep.inf_N1_after_t0 = std::numeric_limits<double>::infinity();
    if (rep.t0_estimate >= 0.0) {
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            if (traj.times[i] >= rep.t0_estimate)
                rep.inf_N1_after_t0 = std::min(rep.inf_N1_after_t0, traj.N1[i]);
        rep.audit_lower_ok = rep.inf_N1_after_t0 >= rep.N1_under;
    }
    return rep;
}

ConvergenceDiagnostics convergence_diagnostics(const ModelParams& params,
                                               const HybridTrajectory& traj,
                                               const HybridSteadyState& ss) {
    ConvergenceDiagnostics diag;
    const AgeGrid& g = params.grid();
    const std::size_t n = g.n_nodes();
    const double c2t = params.c2_tot();
    const double d = params.d[0];

    // age window: the profile mass is negligible past a_win
    std::vector<double> shape(n);
    double shape_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        shape[i] = ss.n1_profile[i] / ss.N1s;
        shape_max = std::max(shape_max, shape[i]);
    }
    std::size_t win = n - 1;
    while (win > 0 && shape[win] < 1e-6 * shape_max) --win;
    diag.a_win = g.node(win);

    diag.lyapunov_weight_defined = params.ctilde1 > 0.0 || c2t == 0.0;
    const double weight = params.ctilde1 > 0.0 ? c2t / (2.0 * params.ctilde1) : 0.0;
    const double ratio = params.ctilde1 > 0.0 ? c2t / params.ctilde1 : 0.0;

    diag.times = traj.record_times;
    for (std::size_t r = 0; r < traj.profiles.size(); ++r) {
        const AgeFunction& prof = traj.profiles[r];
        const double N1 = integrate(prof);
        const double N2 = traj.record_N2[r];
        const auto lk = rates_of_profile(params, prof, N1);
        diag.lambda_t.push_back(lk.lambda_t);
        diag.kappa_t.push_back(lk.kappa_t);

        double gap = 0.0;
        for (std::size_t i = 0; i <= win; ++i)
            gap = std::max(gap, std::abs(prof[i] / N1 - shape[i]));
        diag.profile_gap.push_back(gap);

        const double e1 = N1 - ss.N1s;
        const double e2 = N2 - ss.N2s;
        diag.lyapunov_V.push_back(0.5 * e1 * e1 + weight * e2 * e2);

        diag.A_t.push_back(ss.lambda0 - params.c1_tot() * (N1 + ss.N1s) - c2t * N2);
        if (diag.lyapunov_weight_defined) {
            diag.B_t.push_back(-ratio * d - ss.N1s * c2t - ratio * params.ctilde2 * (N2 + ss.N2s) +
                               ratio * params.eta2 * N1);
            diag.C_t.push_back(c2t * ss.N1s +
                               ratio * (lk.kappa_t + params.ctilde1 * N2 + params.eta2 * ss.N2s +
                                        params.eta1 * (N1 + ss.N1s)));
        } else {
            diag.B_t.push_back(std::numeric_limits<double>::quiet_NaN());
            diag.C_t.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return diag;
}

}  // namespace agepde::hybrid
