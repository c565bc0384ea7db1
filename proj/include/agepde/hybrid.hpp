// The btilde = 0, constant-d reduction: an age-structured phase 1 coupled to
// a scalar phase-2 ODE. Quadratic steady-state solver, local stability via
// the characteristic-determinant reduction, sensitivity of the phase-2
// fraction, one-phase and no-transition-competition comparisons, population
// bounds, and the Lyapunov convergence diagnostics.
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "agepde/model.hpp"

namespace agepde::hybrid {

struct NoPositiveSteadyState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CaseTag { A_positive_two_roots, A_nonpositive_one_root, c2tot_zero };

struct HybridSteadyState {
    double lambda0 = 0.0;
    double I = 0.0;       // int e^{-int k - lambda0 a}
    double kappa0 = 0.0;  // 1/I - lambda0
    double A = 0.0, B = 0.0, C = 0.0;
    double Delta = 0.0;
    CaseTag case_tag = CaseTag::A_nonpositive_one_root;
    double N1s = 0.0, N2s = 0.0;
    AgeFunction n1_profile;  // n1*(a) = n1*(0) e^{-int_0^a (k + lambda0)}
};

// Enforces btilde == 0 and constant d.
void require_hybrid_form(const ModelParams& params);

HybridSteadyState steady_state_hybrid(const ModelParams& params);

// Max residual of the printed B-identity and of the completed-square
// discriminant expression; both are algebraic in (A,B,C,lambda0,d,...).
double discriminant_identity(const ModelParams& params, const HybridSteadyState& ss);

struct StabilityReport {
    bool trivial_state = false;
    bool stable = false;
    double r0 = 0.0;  // trivial-state test value int b e^{-int k}
    double b2_direct = 0.0, b2_identity = 0.0;
    double b3_direct = 0.0, b3_identity = 0.0;
    double coeff_linear = 0.0;          // b2* + c1_tot N1*
    double coeff_const = 0.0;           // simplified form
    double coeff_const_unsimplified = 0.0;
    double det_crosscheck_residual = 0.0;  // full 3x3 determinant vs quadratic
};

// Routh-Hurwitz verdict at the positive steady state, or the sign test at
// the trivial state when ss is not supplied.
StabilityReport stability_verdict(const ModelParams& params, const HybridSteadyState& ss);
StabilityReport stability_verdict_trivial(const ModelParams& params);

struct SensitivityReport {
    double analytic = 0.0;          // d/d lambda0 of N2*/(N1*+N2*)
    double finite_difference = 0.0;  // Richardson-extrapolated central difference
    double I = 0.0, R = 0.0;
    bool r_bound_holds = false;  // 1/(lambda0 I) >= R
};

SensitivityReport smurf_ratio_sensitivity(const ModelParams& params, const HybridSteadyState& ss,
                                          double h = 1e-4);

struct ComparisonReport {
    double N_star = 0.0;    // one-phase equilibrium size
    double N1s = 0.0, N2s = 0.0;    // with transition competition
    double N1ss = 0.0, N2ss = 0.0;  // eta1 = eta2 = 0, same c totals
    bool sum_ge_applicable = false;  // requires c2_tot <= c1_tot
    bool sum_ge = false;             // N1s + N2s >= N_star
    bool n1_order = false;           // N1ss >= N1s
    bool n2_order = false;           // N2ss <= N2s
    bool total_order_iff = false;    // c2_tot <= c1_tot <=> N1ss+N2ss <= N1s+N2s
};

ComparisonReport one_phase_and_comparisons(const ModelParams& params);

struct HybridTrajectory {
    std::vector<double> times;  // per step
    std::vector<double> N1, N2;
    std::vector<double> record_times;
    std::vector<AgeFunction> profiles;  // n1 at recorded times
    std::vector<double> record_N2;
};

struct HybridConfig {
    double t_end = 0.0;
    long record_every = 1;
};

HybridTrajectory simulate_hybrid(const ModelParams& params, const AgeFunction& n1_init,
                                 double N2_init, const HybridConfig& cfg);

struct BoundsReport {
    double N1_bar = 0.0, N2_bar = 0.0, N1_under = 0.0;
    double M_margin = 0.0;  // sup of admissible M (> 1 when flag iv holds)
    double M_used = 0.0;    // concrete M for N1_under and t0
    double t0_estimate = -1.0;  // first sustained time with lambda_t >= lambda0/M
    bool flag_i = false, flag_ii = false, flag_iii = false, flag_iv = false;
    bool n2_bar_defined = false;  // d > eta2 N1_bar
    bool all_flags() const { return flag_i && flag_ii && flag_iii && flag_iv && n2_bar_defined; }
    // trajectory audit
    double sup_N1 = 0.0, sup_N2 = 0.0, inf_N1_after_t0 = 0.0;
    bool audit_upper_ok = false, audit_lower_ok = false;
};

BoundsReport bounds_and_assumptions(const ModelParams& params, const AgeFunction& n1_init,
                                    double N2_init, const HybridTrajectory& traj,
                                    const HybridSteadyState& ss);

struct ConvergenceDiagnostics {
    std::vector<double> times;  // recorded times
    std::vector<double> lambda_t, kappa_t;
    std::vector<double> profile_gap;  // sup over [0, a_win] of |n1/N1 - n1*/N1*|
    std::vector<double> lyapunov_V;
    double a_win = 0.0;
    bool lyapunov_weight_defined = true;  // false when ctilde1 == 0 with c2_tot > 0
    // printed combination coefficients at recorded times
    std::vector<double> A_t, B_t, C_t;
};

ConvergenceDiagnostics convergence_diagnostics(const ModelParams& params,
                                               const HybridTrajectory& traj,
                                               const HybridSteadyState& ss);

}  // namespace agepde::hybrid
