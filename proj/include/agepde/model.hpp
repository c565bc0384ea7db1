// Model parameters (tabulated rates + linear competition coefficients),
// population states with their aggregates, and the admissibility report.
#pragma once

#include <optional>

#include "agepde/grid.hpp"
#include "agepde/quadrature.hpp"

namespace agepde {

inline constexpr double kTruncationTol = 1e-10;
inline constexpr double kAbsTol = 1e-10;

// Linear competition: c_tot(S1,S2) = (eta1+c1) S1 + (eta2+c2) S2, etc.
// Subscript-1 coefficients couple to the phase-1 pressure S1.
struct ModelParams {
    AgeFunction b, btilde, k, d;
    AgeFunction psi1, psi2;  // competition kernels; identically 1 unless configured
    double eta1 = 0.0, eta2 = 0.0;
    double c1 = 0.0, c2 = 0.0;
    double ctilde1 = 0.0, ctilde2 = 0.0;

    ModelParams(AgeFunction b_, AgeFunction btilde_, AgeFunction k_, AgeFunction d_,
                double eta1_, double eta2_, double c1_, double c2_, double ctilde1_,
                double ctilde2_, std::optional<AgeFunction> psi1_ = std::nullopt,
                std::optional<AgeFunction> psi2_ = std::nullopt);

    const AgeGrid& grid() const { return b.grid(); }

    double c1_tot() const { return eta1 + c1; }
    double c2_tot() const { return eta2 + c2; }

    double ctot(double s1, double s2) const { return c1_tot() * s1 + c2_tot() * s2; }
    double ctilde(double s1, double s2) const { return ctilde1 * s1 + ctilde2 * s2; }
    double eta(double s1, double s2) const { return eta1 * s1 + eta2 * s2; }
};

// Density pair at one time with its quadrature aggregates.
struct PopulationState {
    double t = 0.0;
    AgeFunction n1, n2;
    double N1 = 0.0, N2 = 0.0;
    double S1 = 0.0, S2 = 0.0;

    PopulationState(double t_, AgeFunction n1_, AgeFunction n2_, const ModelParams& params);
};

struct AssumptionReport {
    double R0 = 0.0;           // growth functional at lambda = 0
    bool non_extinction = false;  // R0 > 1
    bool degenerate = false;      // R0 = 1 within tolerance
    bool rates_bounded = false;
    double k_lower_bound = 0.0;
    double k_hazard_at_amax = 0.0;
    double d_hazard_at_amax = 0.0;
    bool truncation_ok_k = false;  // exp(-int k) <= tol at a_max
    bool truncation_ok_d = false;
    bool competition_nonnegative = false;
};

// R0 = int b e^{-int k} + (int k e^{-int k}) * (int btilde e^{-int d});
// report-only, no mutation.
AssumptionReport check_assumptions(const ModelParams& params, double truncation_tol = kTruncationTol);

}  // namespace agepde
