#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "agepde/hybrid.hpp"
#include "agepde/ode.hpp"
#include "agepde/pde.hpp"

using namespace agepde;
using namespace agepde::hybrid;

namespace {

ModelParams make_params(const AgeGrid& g, double b, double k, double d, double eta1, double eta2,
                        double c1, double c2, double ct1, double ct2) {
    return ModelParams(AgeFunction::constant(g, b), AgeFunction::constant(g, 0.0),
                       AgeFunction::constant(g, k), AgeFunction::constant(g, d), eta1, eta2, c1,
                       c2, ct1, ct2);
}

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
const AgeGrid kFine(24.0, 480000);
const AgeGrid kSim(24.0, 2400);

ModelParams const_a(const AgeGrid& g) { return make_params(g, 2.0, 1.0, 1.0, 0, 0, 1.0, 0, 0, 1.0); }

struct Draw {
    double b, k, d, eta1, eta2, c1, c2, ct1, ct2;
};

Draw random_draw(std::mt19937_64& rng, bool c2tot_le_c1tot = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Draw dr;
    dr.k = 0.5 + u(rng);
    dr.b = dr.k * (1.1 + 1.1 * u(rng));
    dr.d = 0.5 + u(rng);
    dr.eta1 = 0.8 * u(rng);
    dr.eta2 = 0.5 * u(rng);
    dr.c1 = 0.2 + 1.3 * u(rng);
    dr.c2 = 0.8 * u(rng);
    dr.ct1 = u(rng);
    dr.ct2 = 0.2 + 1.3 * u(rng);
    if (c2tot_le_c1tot && dr.eta2 + dr.c2 > dr.eta1 + dr.c1) {
        const double shrink = 0.9 * (dr.eta1 + dr.c1) / (dr.eta2 + dr.c2);
        dr.eta2 *= shrink;
        dr.c2 *= shrink;
    }
    return dr;
}

ModelParams materialize(const AgeGrid& g, const Draw& dr) {
    return make_params(g, dr.b, dr.k, dr.d, dr.eta1, dr.eta2, dr.c1, dr.c2, dr.ct1, dr.ct2);
}

}  // namespace

TEST_CASE("steady_state_hybrid: CONST-A closed forms") {
    const auto ss = steady_state_hybrid(const_a(kFine));
    CHECK(std::abs(ss.lambda0 - 1.0) < 1e-9);
    CHECK(std::abs(ss.I - 0.5) < 1e-9);
    CHECK(std::abs(ss.kappa0 - 1.0) < 1e-8);
    CHECK(std::abs(ss.N1s - 1.0) < 1e-8);
    CHECK(std::abs(ss.N2s - kGolden) < 1e-8);
    CHECK(ss.case_tag == CaseTag::c2tot_zero);
    CHECK(ss.A == doctest::Approx(-1.0).epsilon(1e-12));  // A = -ctilde2 when c2_tot = 0
    CHECK(std::abs(integrate(ss.n1_profile) - ss.N1s) < 1e-10);
    CHECK(std::abs(ss.C - 1.0) < 1e-8);
    CHECK(ss.Delta > 0.0);
    CHECK(ss.I < 1.0 / ss.lambda0);
}

TEST_CASE("steady_state_hybrid: R0 <= 1 throws NoPositiveSteadyState") {
    const AgeGrid g(30.0, 3000);
    CHECK_THROWS_AS(steady_state_hybrid(make_params(g, 0.8, 1.0, 1.0, 0, 0, 1, 0, 0, 1)),
                    NoPositiveSteadyState);
}

TEST_CASE("steady_state_hybrid: delayed transition cross-checked by the full-system residual") {
    const AgeGrid g(26.0, 26000);
    auto k = AgeFunction::sample(g, [](double a) { return a >= 1.0 ? 1.0 : 0.0; });
    ModelParams params(AgeFunction::constant(g, 2.0), AgeFunction::constant(g, 0.0), k,
                       AgeFunction::constant(g, 1.0), 0, 0, 1.0, 0, 0, 1.0);
    const auto ss = steady_state_hybrid(params);
    CHECK(ss.N1s > 0.0);
    CHECK(ss.N2s > 0.0);
    const auto r = pde::steady_residual(params, ss.N1s, ss.N2s);
    CHECK(std::abs(r[0]) < 1e-6);
    CHECK(std::abs(r[1]) < 1e-6);
}

TEST_CASE("steady-state invariants over random admissible draws") {
    std::mt19937_64 rng(2024);
    const AgeGrid g(30.0, 30000);
    int two_root_cases = 0;
    for (int rep = 0; rep < 60; ++rep) {
        const auto params = materialize(g, random_draw(rng));
        const auto ss = steady_state_hybrid(params);
        const double c1t = params.c1_tot();
        const double c2t = params.c2_tot();
        CHECK(std::abs(c1t * ss.N1s + c2t * ss.N2s - ss.lambda0) < 1e-10);
        const double qscale = std::max({std::abs(ss.A), std::abs(ss.B), std::abs(ss.C)});
        CHECK(std::abs((ss.A * ss.N2s + ss.B) * ss.N2s + ss.C) < 1e-10 * qscale * (1 + ss.N2s));
        CHECK(ss.C > 0.0);
        CHECK(ss.Delta > 0.0);
        CHECK(ss.I < 1.0 / ss.lambda0);

        // case bookkeeping: A > 0 puts lambda0/c2_tot strictly between the roots
        if (ss.A > 0.0 && c2t > 0.0) {
            ++two_root_cases;
            const double y0 = ss.lambda0 / c2t;
            const double p_at_y0 = (ss.A * y0 + ss.B) * y0 + ss.C;
            CHECK(p_at_y0 < 0.0);
            const double other = (-ss.B + std::sqrt(ss.Delta)) / (2.0 * ss.A);
            CHECK(ss.N2s < y0);
            CHECK(other > y0);
        }
        if (c2t > 0.0) {
            const double res = discriminant_identity(params, ss);
            CHECK(res < 1e-9 * std::max(1.0, qscale));
        }
    }
    CHECK(two_root_cases > 0);
}

TEST_CASE("discriminant_identity: perturbing B is detected") {
    const AgeGrid g(24.0, 24000);
    const auto params = make_params(g, 2.0, 1.0, 1.0, 0, 0, 1.0, 0.5, 0, 1.0);
    auto ss = steady_state_hybrid(params);
    CHECK(discriminant_identity(params, ss) < 1e-9 * std::max({1.0, std::abs(ss.B)}));
    ss.B += 1e-3;
    CHECK(discriminant_identity(params, ss) > 1e-4);
}

TEST_CASE("discriminant_identity: rejects c2_tot = 0") {
    const auto params = const_a(kSim);
    const auto ss = steady_state_hybrid(params);
    CHECK_THROWS_AS(discriminant_identity(params, ss), DomainError);
}

TEST_CASE("profile identity: cell-mean survival ratio at every cell") {
    const AgeGrid g(26.0, 5200);
    auto k = AgeFunction::sample(g, [](double a) { return 0.5 + 0.5 * std::tanh(a - 2.0); });
    ModelParams params(AgeFunction::constant(g, 2.0), AgeFunction::constant(g, 0.0), k,
                       AgeFunction::constant(g, 1.0), 0.1, 0, 0.9, 0.2, 0.1, 1.0);
    const auto ss = steady_state_hybrid(params);
    for (std::size_t j = 1; j < g.n_nodes(); j += 97) {
        const double mean_k = 0.5 * (params.k[j - 1] + params.k[j]);
        const double expected = std::exp(-(mean_k + ss.lambda0) * g.da());
        CHECK(ss.n1_profile[j] / ss.n1_profile[j - 1] ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("stability_verdict: CONST-A printed identities") {
    const auto params = const_a(kFine);
    const auto ss = steady_state_hybrid(params);
    const auto rep = stability_verdict(params, ss);
    // (1/N2)(kappa0 N1 + N2^2) + N1 = 1/0.618*(1+0.382) + 1
    const double expected_linear = (1.0 / kGolden) * (1.0 + kGolden * kGolden) + 1.0;
    CHECK(rep.coeff_linear == doctest::Approx(expected_linear).epsilon(1e-7));
    CHECK(rep.stable);
    CHECK(std::abs(rep.b2_direct - rep.b2_identity) < 1e-8 * (1 + std::abs(rep.b2_direct)));
    CHECK(std::abs(rep.b3_direct - rep.b3_identity) < 1e-8 * (1 + std::abs(rep.b3_direct)));
    CHECK(rep.det_crosscheck_residual < 1e-9);
}

TEST_CASE("stability_verdict: trivial state flips at R0 = 1") {
    const AgeGrid g(30.0, 3000);
    const auto stable = stability_verdict_trivial(make_params(g, 0.5, 1.0, 1.0, 0, 0, 1, 0, 0, 1));
    CHECK(stable.trivial_state);
    CHECK(stable.stable);
    const auto unstable = stability_verdict_trivial(make_params(g, 2.0, 1.0, 1.0, 0, 0, 1, 0, 0, 1));
    CHECK_FALSE(unstable.stable);
}

TEST_CASE("stability_verdict: stable over random admissible draws") {
    std::mt19937_64 rng(515);
    const AgeGrid g(30.0, 120000);
    for (int rep = 0; rep < 25; ++rep) {
        const auto params = materialize(g, random_draw(rng));
        const auto ss = steady_state_hybrid(params);
        const auto verdict = stability_verdict(params, ss);
        CHECK(verdict.stable);
        CHECK(std::abs(verdict.b2_direct - verdict.b2_identity) <
              1e-8 * (1 + std::abs(verdict.b2_direct)));
        CHECK(verdict.det_crosscheck_residual < 1e-9);
        // simplified vs unsimplified constant coefficient
        CHECK(std::abs(verdict.coeff_const - verdict.coeff_const_unsimplified) <
              1e-9 * (1 + std::abs(verdict.coeff_const)));
        CHECK(verdict.coeff_const >= 0.0);
    }
}

TEST_CASE("smurf_ratio_sensitivity: finite differences confirm the closed form") {
    const AgeGrid g(24.0, 120000);
    const auto params = make_params(g, 2.0, 1.0, 1.0, 0, 0, 1.0, 0.5, 0, 1.0);
    const auto ss = steady_state_hybrid(params);
    const auto rep = smurf_ratio_sensitivity(params, ss);
    CHECK(std::abs(rep.analytic - rep.finite_difference) <=
          1e-4 * std::max({std::abs(rep.analytic), std::abs(rep.finite_difference), 1e-12}));
    CHECK(rep.r_bound_holds);
}

TEST_CASE("smurf_ratio_sensitivity: positive sign at large eta1") {
    const AgeGrid g(24.0, 24000);
    const auto params = make_params(g, 2.0, 1.0, 1.0, 1e3, 0, 1.0, 0.5, 0, 1.0);
    const auto ss = steady_state_hybrid(params);
    const auto rep = smurf_ratio_sensitivity(params, ss);
    CHECK(rep.analytic > 0.0);
}

TEST_CASE("smurf_ratio_sensitivity: degenerate A is rejected") {
    const AgeGrid g(24.0, 2400);
    // eta1 (c2t/c1t)^2 + (ct1-eta2)(c2t/c1t) - ct2 = 0 with c2t = c1t: eta1 + ct1 - eta2 = ct2
    const auto params = make_params(g, 2.0, 1.0, 1.0, 0.5, 0.0, 0.5, 1.0, 0.5, 1.0);
    const auto ss = steady_state_hybrid(params);
    CHECK_THROWS_AS(smurf_ratio_sensitivity(params, ss), DomainError);
}

TEST_CASE("one_phase_and_comparisons: CONST-A values") {
    const auto rep = one_phase_and_comparisons(const_a(kFine));
    CHECK(rep.N_star == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rep.N1s + rep.N2s == doctest::Approx(1.0 + kGolden).epsilon(1e-7));
    CHECK(rep.sum_ge_applicable);
    CHECK(rep.sum_ge);
}

TEST_CASE("one_phase_and_comparisons: transition competition orderings") {
    const AgeGrid g(24.0, 24000);
    // eta1 = 0.5, c1 = 0.5 keeps c1_tot = 1
    const auto params = make_params(g, 2.0, 1.0, 1.0, 0.5, 0.0, 0.5, 0.0, 0.0, 1.0);
    const auto rep = one_phase_and_comparisons(params);
    CHECK(rep.n1_order);
    CHECK(rep.n2_order);
    CHECK(rep.total_order_iff);
}

TEST_CASE("one_phase_and_comparisons: equal totals at the c2_tot = c1_tot boundary") {
    const AgeGrid g(24.0, 24000);
    const auto params = make_params(g, 2.0, 1.0, 1.0, 0.3, 0.3, 0.7, 0.7, 0.2, 1.0);
    const auto rep = one_phase_and_comparisons(params);
    CHECK(std::abs((rep.N1ss + rep.N2ss) - (rep.N1s + rep.N2s)) < 1e-8);
    CHECK(rep.total_order_iff);
}

TEST_CASE("simulate_hybrid: zero init stays zero, steady init stays put") {
    const auto params = const_a(kSim);
    HybridConfig cfg{0.5, 10};
    const auto zero = simulate_hybrid(params, AgeFunction::constant(kSim, 0.0), 0.0, cfg);
    CHECK(zero.N1.back() == 0.0);
    CHECK(zero.N2.back() == 0.0);

    const auto ss = steady_state_hybrid(params);
    HybridConfig ten_steps{10.0 * kSim.da(), 1};
    const auto traj = simulate_hybrid(params, ss.n1_profile, ss.N2s, ten_steps);
    CHECK(std::abs(traj.N1.back() - ss.N1s) < 1e-8 * ss.N1s);
    CHECK(std::abs(traj.N2.back() - ss.N2s) < 1e-6 * ss.N2s);
}

TEST_CASE("simulate_hybrid: rejects btilde > 0") {
    ModelParams params(AgeFunction::constant(kSim, 2.0), AgeFunction::constant(kSim, 0.1),
                       AgeFunction::constant(kSim, 1.0), AgeFunction::constant(kSim, 1.0), 0, 0, 1,
                       0, 0, 1);
    CHECK_THROWS_AS(simulate_hybrid(params, AgeFunction::constant(kSim, 0.1), 0.0, HybridConfig{1, 1}),
                    ConfigError);
}

TEST_CASE("simulate_hybrid: converges to the steady state") {
    const AgeGrid g(24.0, 9600);
    const auto params = const_a(g);
    const auto init = AgeFunction::sample(g, [](double a) { return a <= 1.0 ? 1.0 : 0.0; });
    HybridConfig cfg{80.0, 40};
    const auto traj = simulate_hybrid(params, init, 0.3, cfg);
    const auto ss = steady_state_hybrid(params);
    CHECK(std::abs(traj.N1.back() - ss.N1s) < 1e-3);
    CHECK(std::abs(traj.N2.back() - ss.N2s) < 1e-3);
}

TEST_CASE("cross-model: constant-rate hybrid matches the ode steady state") {
    std::mt19937_64 rng(808);
    for (int rep = 0; rep < 6; ++rep) {
        const auto dr = random_draw(rng);
        const AgeGrid g(46.0 / dr.k, static_cast<std::size_t>(46.0 / dr.k / 5e-5));
        const auto params = materialize(g, dr);
        const auto hss = steady_state_hybrid(params);
        ode::OdeParams op;
        op.b = dr.b;
        op.k = dr.k;
        op.d = dr.d;
        op.eta1 = dr.eta1;
        op.eta2 = dr.eta2;
        op.c1 = dr.c1;
        op.c2 = dr.c2;
        op.ctilde1 = dr.ct1;
        op.ctilde2 = dr.ct2;
        const auto oss = ode::steady_state_ode(op);
        CHECK(std::abs(hss.N1s - oss.N1s) < 1e-8 * (1 + oss.N1s));
        CHECK(std::abs(hss.N2s - oss.N2s) < 1e-8 * (1 + oss.N2s));
    }
}

TEST_CASE("bounds_and_assumptions: printed plug-in values") {
    const AgeGrid g(24.0, 2400);
    // b = 2, k = 1, c1_tot = 1, N1(0) = 0.5: N1_bar = max(0.5, 1) = 1
    const auto params = const_a(g);
    const auto init = AgeFunction::sample(g, [](double a) { return 0.5 * std::exp(-a) / (1 - std::exp(-24.0)); });
    HybridConfig cfg{30.0, 10};
    const auto traj = simulate_hybrid(params, init, 0.1, cfg);
    const auto ss = steady_state_hybrid(params);
    const auto rep = bounds_and_assumptions(params, init, 0.1, traj, ss);
    CHECK(rep.N1_bar == doctest::Approx(1.0).epsilon(1e-6));
    // eta2 = 0, d = 1, eta1 = 0, k = 1, N2(0) = 0.1: N2_bar = max(0.1, 1) = 1
    CHECK(rep.N2_bar == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.flag_i);
    CHECK(rep.flag_iv);  // c2_tot = 0
    CHECK(rep.M_used == 2.0);
    CHECK(rep.flag_ii);  // cleared form holds trivially at c2_tot = 0
    CHECK(rep.audit_upper_ok);
    CHECK(rep.t0_estimate >= 0.0);
    CHECK(rep.audit_lower_ok);
}

TEST_CASE("bounds_and_assumptions: k with zero infimum is rejected") {
    const AgeGrid g(26.0, 2600);
    auto k = AgeFunction::sample(g, [](double a) { return a >= 1.0 ? 1.0 : 0.0; });
    ModelParams params(AgeFunction::constant(g, 2.0), AgeFunction::constant(g, 0.0), k,
                       AgeFunction::constant(g, 1.0), 0, 0, 1, 0, 0, 1);
    HybridConfig cfg{1.0, 10};
    const auto init = AgeFunction::constant(g, 0.05);
    const auto traj = simulate_hybrid(params, init, 0.1, cfg);
    const auto ss = steady_state_hybrid(params);
    CHECK_THROWS_AS(bounds_and_assumptions(params, init, 0.1, traj, ss), DomainError);
}

TEST_CASE("convergence_diagnostics: stationary data sits at the fixed point") {
    const AgeGrid g(24.0, 4800);
    const auto params = const_a(g);
    const auto ss = steady_state_hybrid(params);
    HybridConfig cfg{2.0, 40};
    const auto traj = simulate_hybrid(params, ss.n1_profile, ss.N2s, cfg);
    const auto diag = convergence_diagnostics(params, traj, ss);
    for (std::size_t i = 0; i < diag.times.size(); ++i) {
        CHECK(std::abs(diag.lambda_t[i] - ss.lambda0) < 1e-6);
        CHECK(std::abs(diag.kappa_t[i] - ss.kappa0) < 1e-6);
        CHECK(diag.lyapunov_V[i] < 1e-10);
    }
}

TEST_CASE("convergence_diagnostics: CONST-A generic init converges with certificates") {
    const AgeGrid g(24.0, 9600);
    const auto params = const_a(g);
    const auto init = AgeFunction::sample(g, [](double a) { return a <= 1.0 ? 1.0 : 0.0; });
    HybridConfig cfg{80.0, 40};
    const auto traj = simulate_hybrid(params, init, 0.3, cfg);
    const auto ss = steady_state_hybrid(params);
    const auto diag = convergence_diagnostics(params, traj, ss);
    const auto rep = bounds_and_assumptions(params, init, 0.3, traj, ss);

    auto index_near = [&](double t) {
        std::size_t best = 0;
        for (std::size_t i = 0; i < diag.times.size(); ++i)
            if (std::abs(diag.times[i] - t) < std::abs(diag.times[best] - t)) best = i;
        return best;
    };
    CHECK(diag.profile_gap[index_near(40.0)] < 0.5 * diag.profile_gap[index_near(20.0)]);
    CHECK(std::abs(diag.lambda_t.back() - 1.0) < 1e-3);
    CHECK(std::abs(diag.kappa_t.back() - 1.0) < 1e-3);

    REQUIRE(rep.t0_estimate >= 0.0);
    double v_t0 = -1.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < diag.times.size(); ++i) {
        if (diag.times[i] < rep.t0_estimate) continue;
        if (v_t0 < 0.0) {
            v_t0 = diag.lyapunov_V[i];
            prev = v_t0;
            continue;
        }
        CHECK(diag.lyapunov_V[i] <= prev + 1e-8 * v_t0);
        prev = diag.lyapunov_V[i];
    }
    CHECK(diag.lyapunov_weight_defined);  // c2_tot = 0 makes the weight 0
}

TEST_CASE("lyapunov combination coefficients are negative past t0 when flags hold") {
    const AgeGrid g(26.0, 2600);
    // c2_tot = 0 family with ctilde1 > 0 so the weight is defined
    const auto params = make_params(g, 1.4, 1.0, 1.2, 0.1, 0.0, 0.8, 0.0, 0.5, 0.8);
    const auto init = AgeFunction::sample(g, [](double a) { return 0.3 * std::exp(-a); });
    HybridConfig cfg{60.0, 20};
    const auto traj = simulate_hybrid(params, init, 0.2, cfg);
    const auto ss = steady_state_hybrid(params);
    const auto rep = bounds_and_assumptions(params, init, 0.2, traj, ss);
    REQUIRE(rep.all_flags());
    const auto diag = convergence_diagnostics(params, traj, ss);
    for (std::size_t i = 0; i < diag.times.size(); ++i) {
        if (diag.times[i] < rep.t0_estimate) continue;
        CHECK(diag.A_t[i] + 0.5 * diag.C_t[i] < 0.0);
        CHECK(diag.B_t[i] + 0.5 * diag.C_t[i] < 0.0);
    }
}

TEST_CASE("uniqueness: exactly one admissible candidate per draw") {
    std::mt19937_64 rng(999);
    const AgeGrid g(30.0, 30000);
    for (int rep = 0; rep < 60; ++rep) {
        const auto params = materialize(g, random_draw(rng));
        // the solver itself throws unless exactly one candidate passes
        CHECK_NOTHROW(steady_state_hybrid(params));
    }
}
