#include "agepde/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agepde/parallel.hpp"

namespace agepde::spectral {

GrowthMap::GrowthMap(const ModelParams& params) : grid_(params.grid()) {
    const auto Hk = cumulative_trapezoid(grid_, params.k.values());
    const auto Hd = cumulative_trapezoid(grid_, params.d.values());
    const std::size_t n = grid_.n_nodes();
    b_sk_.resize(n);
    k_sk_.resize(n);
    bt_sd_.resize(n);
    for_each_index(n, [&](std::size_t i) {
        const double sk = std::exp(-Hk[i]);
        const double sd = std::exp(-Hd[i]);
        b_sk_[i] = params.b[i] * sk;
        k_sk_[i] = params.k[i] * sk;
        bt_sd_[i] = params.btilde[i] * sd;
    });
    r0_ = (*this)(0.0);
}

double GrowthMap::operator()(double lambda) const {
    return integrate_decayed(grid_, b_sk_, lambda) +
           integrate_decayed(grid_, k_sk_, lambda) * integrate_decayed(grid_, bt_sd_, lambda);
}

Lambda0Result solve_lambda0(const ModelParams& params) { return solve_lambda0(GrowthMap(params)); }

Lambda0Result solve_lambda0(const GrowthMap& map) {
    const double r0 = map.r0();
    if (std::abs(r0 - 1.0) <= 1e-9) return {0.0, true};
    if (r0 < 1.0) throw NoPositiveRoot("solve_lambda0: R0 < 1, growth map never crosses 1 on the positive axis");

    double lo = 0.0, hi = 1.0;
    int doublings = 0;
    while (map(hi) >= 1.0) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 200) throw NoPositiveRoot("solve_lambda0: failed to bracket the root");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (map(mid) >= 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return {0.5 * (lo + hi), false};
}

EigenSolution eigenfunctions(const ModelParams& params, double lambda0) {
    if (!(lambda0 > 0.0)) throw DomainError("eigenfunctions: lambda0 must be > 0");
    const AgeGrid& g = params.grid();
    const std::size_t n = g.n_nodes();
    const auto Hk = cumulative_trapezoid(g, params.k.values());
    const auto Hd = cumulative_trapezoid(g, params.d.values());
    const auto decay = exp_decay_nodes(g, lambda0);

    std::vector<double> n1v(n), n2shape(n), b_sk(n), k_sk(n), bt_sd(n);
    for_each_index(n, [&](std::size_t i) {
        const double sk = std::exp(-Hk[i]);
        const double sd = std::exp(-Hd[i]);
        n1v[i] = sk * decay[i];
        n2shape[i] = sd * decay[i];
        b_sk[i] = params.b[i] * sk;
        k_sk[i] = params.k[i] * sk;
        bt_sd[i] = params.btilde[i] * sd;
    });
    AgeFunction n1_0(g, n1v);
    const double n2_boundary = integrate_decayed(g, k_sk, lambda0);  // int k n1_0
    std::vector<double> n2v(n);
    for_each_index(n, [&](std::size_t i) { n2v[i] = n2_boundary * n2shape[i]; });
    AgeFunction n2_0(g, n2v);

    // Adjoint pair with phi1(0) = 1 before normalization. Suffix tails are
    // accumulated right-to-left with a constant-extension analytic tail
    // beyond a_max.
    const std::vector<double> tail_b = suffix_decayed_integral(g, b_sk, lambda0, params.k[n - 1]);
    const std::vector<double> tail_k = suffix_decayed_integral(g, k_sk, lambda0, params.k[n - 1]);
    const std::vector<double> tail_bt = suffix_decayed_integral(g, bt_sd, lambda0, params.d[n - 1]);
    const double phi2_at_0 = tail_bt[0];

    std::vector<double> phi1v(n), phi2v(n);
    for_each_index(n, [&](std::size_t i) {
        const double grow_k = std::exp(Hk[i] + lambda0 * g.node(i));
        const double grow_d = std::exp(Hd[i] + lambda0 * g.node(i));
        phi1v[i] = (tail_b[i] + phi2_at_0 * tail_k[i]) * grow_k;
        phi2v[i] = tail_bt[i] * grow_d;
    });

    std::vector<double> weighted(n);
    for (std::size_t i = 0; i < n; ++i) weighted[i] = phi1v[i] * n1v[i] + phi2v[i] * n2v[i];
    const double normalizer = integrate(g, weighted);
    if (!(normalizer > 0.0)) throw DomainError("eigenfunctions: degenerate normalizer");
    for_each_index(n, [&](std::size_t i) {
        phi1v[i] /= normalizer;
        phi2v[i] /= normalizer;
    });

    EigenSolution sol{lambda0, std::move(n1_0), std::move(n2_0),
                      AgeFunction(g, std::move(phi1v)), AgeFunction(g, std::move(phi2v)),
                      normalizer, 0.0, 0.0};
    const double phi1_at_0 = sol.phi1_0[0];
    sol.phi1_upper = phi1_at_0 * params.b.max() / lambda0 + phi2_at_0 / normalizer;
    sol.phi2_upper = phi1_at_0 * params.btilde.max() / lambda0;
    return sol;
}

double eigen_weighted_mass(const EigenSolution& eig, const AgeFunction& n1, const AgeFunction& n2) {
    return integrate_product(eig.phi1_0, n1) + integrate_product(eig.phi2_0, n2);
}

double gre_entropy(const PopulationState& state, const EigenSolution& eig, double m0) {
    require_same_grid(state.n1.grid(), eig.n1_0.grid(), "gre_entropy");
    const AgeGrid& g = state.n1.grid();
    const std::size_t n = g.n_nodes();
    const double scale = std::exp(-eig.lambda0 * state.t);
    std::vector<double> integrand(n);
    for_each_index(n, [&](std::size_t i) {
        const double h1 = scale * state.n1[i] - m0 * eig.n1_0[i];
        const double h2 = scale * state.n2[i] - m0 * eig.n2_0[i];
        integrand[i] = std::abs(h1) * eig.phi1_0[i] + std::abs(h2) * eig.phi2_0[i];
    });
    return integrate(g, integrand);
}

double gre_decay_rate(const ModelParams& params, const EigenSolution& eig) {
    const std::size_t n = params.grid().n_nodes();
    const double phi1_0 = eig.phi1_0[0];
    const double phi2_0 = eig.phi2_0[0];
    double mu = std::numeric_limits<double>::infinity();
    bool any_constraint = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (eig.phi1_0[i] > 0.0) {
            mu = std::min(mu, params.b[i] * phi1_0 / eig.phi1_0[i]);
            any_constraint = true;
        }
        if (phi2_0 > 0.0 && eig.phi2_0[i] > 0.0) {
            mu = std::min(mu, params.btilde[i] * phi2_0 / eig.phi2_0[i]);
            any_constraint = true;
        }
    }
    return any_constraint ? mu : 0.0;
}

}  // namespace agepde::spectral
