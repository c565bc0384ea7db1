// Eigenvalue problem of the linearised system: growth rate lambda0, direct
// and adjoint eigenfunctions, and the relative-entropy functional that
// drives the long-time convergence checks.
#pragma once

#include <optional>

#include "agepde/model.hpp"

namespace agepde {
struct PopulationState;
}

namespace agepde::spectral {

struct NoPositiveRoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// F(lambda) = int b e^{-int k - lambda a}
//           + (int k e^{-int k - lambda a}) * (int btilde e^{-int d - lambda a});
// strictly decreasing in lambda. Precomputes the survival-weighted rates once.
class GrowthMap {
  public:
    explicit GrowthMap(const ModelParams& params);
    double operator()(double lambda) const;
    double r0() const { return r0_; }
    const AgeGrid& grid() const { return grid_; }

  private:
    AgeGrid grid_;
    std::vector<double> b_sk_, k_sk_, bt_sd_;
    double r0_;
};

struct Lambda0Result {
    double lambda0 = 0.0;
    bool degenerate = false;  // R0 = 1 within tolerance
};

// Bracketed bisection of F(lambda) = 1 on [0, lambda_hi], doubling lambda_hi
// until F < 1. Stops at interval width 1e-13 or 200 iterations.
// Throws NoPositiveRoot when R0 < 1.
Lambda0Result solve_lambda0(const ModelParams& params);
Lambda0Result solve_lambda0(const GrowthMap& map);

struct EigenSolution {
    double lambda0 = 0.0;
    AgeFunction n1_0, n2_0;    // direct, n1_0(0) = 1
    AgeFunction phi1_0, phi2_0;  // adjoint, rescaled so int(phi.n0) = 1
    double m0_normalizer = 0.0;  // int(phi1 n1_0 + phi2 n2_0) before rescaling
    // Prop-2.9-style bounds in the rescaled units.
    double phi1_upper = 0.0, phi2_upper = 0.0;
};

// Closed-form survival products for the direct pair; suffix-accumulated
// tail integrals for the adjoint pair, then joint renormalization.
EigenSolution eigenfunctions(const ModelParams& params, double lambda0);

// Weighted initial mass int(phi1 n1 + phi2 n2); the conserved quantity of the
// rescaled linear flow.
double eigen_weighted_mass(const EigenSolution& eig, const AgeFunction& n1, const AgeFunction& n2);

// H(t) = int |e^{-lambda0 t} n1 - m0 n1_0| phi1 + |e^{-lambda0 t} n2 - m0 n2_0| phi2.
double gre_entropy(const PopulationState& state, const EigenSolution& eig, double m0);

// Largest mu with b >= mu phi1/phi1(0) and btilde >= mu phi2/phi2(0) on the
// grid (a vanishing phi2 makes the second constraint vacuous). Values <= 0
// mean the decay hypothesis is unmet.
double gre_decay_rate(const ModelParams& params, const EigenSolution& eig);

}  // namespace agepde::spectral
