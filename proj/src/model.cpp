#include "agepde/model.hpp"

#include <cmath>
#include <utility>

namespace agepde {

ModelParams::ModelParams(AgeFunction b_, AgeFunction btilde_, AgeFunction k_, AgeFunction d_,
                         double eta1_, double eta2_, double c1_, double c2_, double ctilde1_,
                         double ctilde2_, std::optional<AgeFunction> psi1_,
                         std::optional<AgeFunction> psi2_)
    : b(std::move(b_)),
      btilde(std::move(btilde_)),
      k(std::move(k_)),
      d(std::move(d_)),
      psi1(psi1_ ? std::move(*psi1_) : AgeFunction::constant(b.grid(), 1.0)),
      psi2(psi2_ ? std::move(*psi2_) : AgeFunction::constant(b.grid(), 1.0)),
      eta1(eta1_),
      eta2(eta2_),
      c1(c1_),
      c2(c2_),
      ctilde1(ctilde1_),
      ctilde2(ctilde2_) {
    require_same_grid(b.grid(), btilde.grid(), "ModelParams");
    require_same_grid(b.grid(), k.grid(), "ModelParams");
    require_same_grid(b.grid(), d.grid(), "ModelParams");
    require_same_grid(b.grid(), psi1.grid(), "ModelParams");
    require_same_grid(b.grid(), psi2.grid(), "ModelParams");
    for (double v : {eta1, eta2, c1, c2, ctilde1, ctilde2})
        if (!(v >= 0.0)) throw DomainError("ModelParams: competition coefficients must be >= 0");
}

PopulationState::PopulationState(double t_, AgeFunction n1_, AgeFunction n2_,
                                 const ModelParams& params)
    : t(t_), n1(std::move(n1_)), n2(std::move(n2_)) {
    require_same_grid(n1.grid(), params.grid(), "PopulationState");
    require_same_grid(n2.grid(), params.grid(), "PopulationState");
    N1 = integrate(n1);
    N2 = integrate(n2);
    S1 = integrate_product(params.psi1, n1);
    S2 = integrate_product(params.psi2, n2);
}

AssumptionReport check_assumptions(const ModelParams& params, double truncation_tol) {
    AssumptionReport rep;
    const AgeGrid& g = params.grid();
    const auto Hk = cumulative_trapezoid(g, params.k.values());
    const auto Hd = cumulative_trapezoid(g, params.d.values());

    const std::size_t n = g.n_nodes();
    std::vector<double> b_sk(n), k_sk(n), bt_sd(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sk = std::exp(-Hk[i]);
        const double sd = std::exp(-Hd[i]);
        b_sk[i] = params.b[i] * sk;
        k_sk[i] = params.k[i] * sk;
        bt_sd[i] = params.btilde[i] * sd;
    }
    rep.R0 = integrate(g, b_sk) + integrate(g, k_sk) * integrate(g, bt_sd);
    rep.degenerate = std::abs(rep.R0 - 1.0) <= 1e-9;
    rep.non_extinction = rep.R0 > 1.0 && !rep.degenerate;

    rep.rates_bounded = std::isfinite(params.b.max()) && std::isfinite(params.btilde.max()) &&
                        std::isfinite(params.k.max()) && std::isfinite(params.d.max());
    rep.k_lower_bound = params.k.min();
    rep.k_hazard_at_amax = Hk.back();
    rep.d_hazard_at_amax = Hd.back();
    rep.truncation_ok_k = std::exp(-Hk.back()) <= truncation_tol;
    rep.truncation_ok_d = std::exp(-Hd.back()) <= truncation_tol;
    rep.competition_nonnegative = true;  // enforced at construction
    return rep;
}

}  // namespace agepde
