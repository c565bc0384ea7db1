// Constant-rate reduction of the two-phase model: RK4 integration, the
// resultant-based steady-state solver, Dulac diagnostics, extinction, and
// small-btilde asymptotics.
#pragma once

#include <array>
#include <stdexcept>
#include <vector>

namespace agepde::ode {

struct OdeParams {
    double b = 0.0, btilde = 0.0, k = 0.0, d = 0.0;
    double eta1 = 0.0, eta2 = 0.0;
    double c1 = 0.0, c2 = 0.0;
    double ctilde1 = 0.0, ctilde2 = 0.0;

    double c1_tot() const { return eta1 + c1; }
    double c2_tot() const { return eta2 + c2; }
    void validate() const;
};

struct NoSteadyState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OdeSteadyState {
    double N1s = 0.0, N2s = 0.0;
    double residual1 = 0.0, residual2 = 0.0;  // |eq 1|, |eq 2| at (N1s, N2s)
    int cubic_root_index = 0;                 // which real root of the cubic
    bool quadratic_positive_branch = true;    // branch used to recover N1
};

struct AmbiguousSteadyState : std::runtime_error {
    std::vector<OdeSteadyState> candidates;
    explicit AmbiguousSteadyState(std::vector<OdeSteadyState> cands)
        : std::runtime_error("steady_state_ode: multiple admissible candidates"),
          candidates(std::move(cands)) {}
};

// Right-hand sides:
//   N1' = b N1 + btilde N2 - (k + c1_tot N1 + c2_tot N2) N1
//   N2' = (k + eta1 N1 + eta2 N2) N1 - (d + ctilde1 N1 + ctilde2 N2) N2
std::array<double, 2> ode_rhs(const OdeParams& p, double N1, double N2);

struct OdeTrajectory {
    std::vector<double> times;
    std::vector<double> N1, N2;
    long clip_events = 0;  // negativity clips; zero on well-resolved runs
};

struct DivergedError : std::runtime_error {
    double last_valid_time;
    DivergedError(const std::string& msg, double t) : std::runtime_error(msg), last_valid_time(t) {}
};

OdeTrajectory integrate_ode(const OdeParams& p, double N1_0, double N2_0, double t_end, double dt);

// Coefficients of the eliminant P(N2) = A3 Y^3 + A2 Y^2 + A1 Y + A0 whose
// roots locate common roots in N1 of the steady-state polynomial pair.
struct ResultantCubic {
    double A3 = 0.0, A2 = 0.0, A1 = 0.0, A0 = 0.0;
};
ResultantCubic resultant_coefficients(const OdeParams& p);

// Residuals of the steady polynomial pair at (N1, N2):
//   eq1 = c1_tot N1^2 + N1 (k + c2_tot N2 - b) - btilde N2
//   eq2 = -eta1 N1^2 + N1 (N2 (ctilde1 - eta2) - k) + ctilde2 N2^2 + d N2
std::array<double, 2> steady_poly_residuals(const OdeParams& p, double N1, double N2);

// All real cubic roots; for each positive root the positive quadratic branch
// for N1; the unique strictly positive pair passing the residual filter.
// Throws NoSteadyState / AmbiguousSteadyState otherwise.
OdeSteadyState steady_state_ode(const OdeParams& p);

// Divergence of the 1/(N1 N2)-weighted field:
//   -c1_tot/N2 - btilde/N1^2 - ctilde2/N1 - k/N2^2, always < 0 here.
double dulac_divergence(const OdeParams& p, double N1, double N2);

// Leading-order steady state for b - k <= 0 and btilde k/d + b - k > 0:
//   N1 ~ (btilde k + d (b - k)) / (c1_tot d + c2_tot k),  N2 ~ (k/d) N1.
std::array<double, 2> asymptotic_small_btilde(const OdeParams& p);

}  // namespace agepde::ode
