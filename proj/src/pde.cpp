#include "agepde/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agepde/parallel.hpp"
#include "agepde/spectral.hpp"

namespace agepde::pde {

std::array<double, 2> PrescribedS::at(double time) const {
    if (t.empty()) return {0.0, 0.0};
    if (time <= t.front()) return {S1.front(), S2.front()};
    if (time >= t.back()) return {S1.back(), S2.back()};
    std::size_t j = 1;
    while (t[j] < time) ++j;
    const double w = (time - t[j - 1]) / (t[j] - t[j - 1]);
    return {S1[j - 1] + w * (S1[j] - S1[j - 1]), S2[j - 1] + w * (S2[j] - S2[j - 1])};
}

namespace {

double product_integral(const AgeGrid& g, std::span<const double> f, std::span<const double> h,
                        std::vector<double>& scratch) {
    const std::size_t n = f.size();
    for_each_index(n, [&](std::size_t i) { scratch[i] = f[i] * h[i]; });
    return integrate(g, std::span<const double>(scratch.data(), n));
}

// Per-cell mean decay factors and renewal weights, fixed once per run.
struct StepKernel {
    const ModelParams& params;
    double dt;
    std::vector<double> decay_k;  // exp(-mean(k on cell j) dt), j >= 1
    std::vector<double> decay_d;
    std::vector<double> scratch;

    StepKernel(const ModelParams& p, double dt_) : params(p), dt(dt_) {
        const AgeGrid& g = p.grid();
        if (std::abs(dt - g.da()) > 1e-15 * g.da())
            throw ConfigError("step: dt must equal the grid step (unit CFL)");
        const std::size_t n = g.n_nodes();
        decay_k.assign(n, 1.0);
        decay_d.assign(n, 1.0);
        scratch.assign(n, 0.0);
        for_each_index(n - 1, [&](std::size_t i) {
            const std::size_t j = i + 1;
            decay_k[j] = std::exp(-0.5 * (p.k[j - 1] + p.k[j]) * dt);
            decay_d[j] = std::exp(-0.5 * (p.d[j - 1] + p.d[j]) * dt);
        });
        const double da = g.da();
        if (da * std::max({p.b[0], p.btilde[0], p.k[0]}) >= 1.0)
            throw ConfigError("step: grid too coarse for the renewal closure (da * rate(0) >= 1)");
    }

    // Advances (n1, n2) in place via the swap buffers; returns the new
    // boundary values (n1(0), n2(0)).
    std::array<double, 2> advance(std::vector<double>& n1, std::vector<double>& n2,
                                  std::vector<double>& buf1, std::vector<double>& buf2,
                                  double ctot, double ctilde, double eta) {
        const AgeGrid& g = params.grid();
        const std::size_t n = g.n_nodes();
        const double f1 = std::exp(-ctot * dt);
        const double f2 = std::exp(-ctilde * dt);
        for_each_index(n - 1, [&](std::size_t i) {
            const std::size_t j = i + 1;
            buf1[j] = n1[j - 1] * decay_k[j] * f1;
            buf2[j] = n2[j - 1] * decay_d[j] * f2;
        });

        // Renewal closure: the age-0 values belong to the post-transport
        // density, so the trapezoid includes them; solve the 2x2 system
        //   n1(0) = P + (da/2)(b0 n1(0) + bt0 n2(0))
        //   n2(0) = Q + (da/2)(k0 + eta) n1(0)
        const double da = g.da();
        scratch[0] = 0.0;
        for_each_index(n - 1, [&](std::size_t i) {
            const std::size_t j = i + 1;
            scratch[j] = params.b[j] * buf1[j] + params.btilde[j] * buf2[j];
        });
        const double P = da * (block_sum(scratch) - 0.5 * scratch[n - 1]);
        for_each_index(n - 1, [&](std::size_t i) {
            const std::size_t j = i + 1;
            scratch[j] = (params.k[j] + eta) * buf1[j];
        });
        const double Q = da * (block_sum(scratch) - 0.5 * scratch[n - 1]);

        const double alpha = 0.5 * da * params.b[0];
        const double beta = 0.5 * da * params.btilde[0];
        const double gamma = 0.5 * da * (params.k[0] + eta);
        const double denom = 1.0 - alpha - beta * gamma;
        if (!(denom > 0.0)) throw ConfigError("step: renewal closure not solvable at this resolution");
        buf1[0] = (P + beta * Q) / denom;
        buf2[0] = Q + gamma * buf1[0];
        n1.swap(buf1);
        n2.swap(buf2);
        return {n1[0], n2[0]};
    }

    // Renewal compatibility at t = 0: the age-0 node is determined by the
    // boundary integrals of the data itself, as for the weak solution.
    void make_compatible(std::vector<double>& n1, std::vector<double>& n2, double eta) {
        const AgeGrid& g = params.grid();
        const std::size_t n = g.n_nodes();
        const double da = g.da();
        scratch[0] = 0.0;
        for (std::size_t j = 1; j < n; ++j)
            scratch[j] = params.b[j] * n1[j] + params.btilde[j] * n2[j];
        const double P = da * (block_sum(scratch) - 0.5 * scratch[n - 1]);
        for (std::size_t j = 1; j < n; ++j) scratch[j] = (params.k[j] + eta) * n1[j];
        const double Q = da * (block_sum(scratch) - 0.5 * scratch[n - 1]);
        const double alpha = 0.5 * da * params.b[0];
        const double beta = 0.5 * da * params.btilde[0];
        const double gamma = 0.5 * da * (params.k[0] + eta);
        const double denom = 1.0 - alpha - beta * gamma;
        if (!(denom > 0.0)) throw ConfigError("step: renewal closure not solvable at this resolution");
        n1[0] = (P + beta * Q) / denom;
        n2[0] = Q + gamma * n1[0];
    }
};

}  // namespace

PopulationState step(const PopulationState& state, const ModelParams& params, double dt,
                     SimMode mode, const PrescribedS* table) {
    StepKernel kernel(params, dt);
    double s1 = state.S1, s2 = state.S2;
    if (mode == SimMode::linear_prescribed) {
        const auto s = table ? table->at(state.t) : std::array<double, 2>{0.0, 0.0};
        s1 = s[0];
        s2 = s[1];
    }
    std::vector<double> n1(state.n1.values().begin(), state.n1.values().end());
    std::vector<double> n2(state.n2.values().begin(), state.n2.values().end());
    std::vector<double> buf1(n1.size()), buf2(n2.size());
    kernel.advance(n1, n2, buf1, buf2, params.ctot(s1, s2), params.ctilde(s1, s2),
                   params.eta(s1, s2));
    return PopulationState(state.t + dt, AgeFunction(params.grid(), std::move(n1)),
                           AgeFunction(params.grid(), std::move(n2)), params);
}

Trajectory simulate(const ModelParams& params, const PopulationState& init, const SolverConfig& cfg) {
    const AgeGrid& g = params.grid();
    const double dt = cfg.dt > 0.0 ? cfg.dt : g.da();
    StepKernel kernel(params, dt);
    const long n_steps = static_cast<long>(std::llround(cfg.t_end / dt));
    const long stride = std::max<long>(1, cfg.record_every);

    Trajectory traj;
    traj.times.reserve(n_steps + 1);

    std::vector<double> n1(init.n1.values().begin(), init.n1.values().end());
    std::vector<double> n2(init.n2.values().begin(), init.n2.values().end());
    std::vector<double> buf1(n1.size()), buf2(n2.size()), prod(n1.size());

    {
        double es1 = init.S1, es2 = init.S2;
        if (cfg.mode == SimMode::linear_prescribed) {
            const auto sv = cfg.s_table.at(0.0);
            es1 = sv[0];
            es2 = sv[1];
        }
        kernel.make_compatible(n1, n2, params.eta(es1, es2));
    }
    double N1 = integrate(g, n1);
    double N2 = integrate(g, n2);
    double S1 = product_integral(g, params.psi1.values(), n1, prod);
    double S2 = product_integral(g, params.psi2.values(), n2, prod);
    const double initial_mass = N1 + N2;
    const double blowup = 1e12 * (initial_mass > 0.0 ? initial_mass : 1.0);

    auto push_summary = [&](double t, double b1, double b2) {
        traj.times.push_back(t);
        traj.N1.push_back(N1);
        traj.N2.push_back(N2);
        traj.S1.push_back(S1);
        traj.S2.push_back(S2);
        traj.boundary1.push_back(b1);
        traj.boundary2.push_back(b2);
    };
    auto record_state = [&](double t) {
        traj.record_times.push_back(t);
        traj.states.emplace_back(t, AgeFunction(g, n1), AgeFunction(g, n2), params);
    };

    push_summary(0.0, n1[0], n2[0]);
    record_state(0.0);

    for (long s = 0; s < n_steps; ++s) {
        const double t = static_cast<double>(s) * dt;
        double cs1 = S1, cs2 = S2;
        if (cfg.mode == SimMode::linear_prescribed) {
            const auto sv = cfg.s_table.at(t);
            cs1 = sv[0];
            cs2 = sv[1];
        }
        const auto bc = kernel.advance(n1, n2, buf1, buf2, params.ctot(cs1, cs2),
                                       params.ctilde(cs1, cs2), params.eta(cs1, cs2));
        N1 = integrate(g, n1);
        N2 = integrate(g, n2);
        S1 = product_integral(g, params.psi1.values(), n1, prod);
        S2 = product_integral(g, params.psi2.values(), n2, prod);
        const double tn = static_cast<double>(s + 1) * dt;
        if (!std::isfinite(N1) || !std::isfinite(N2) || N1 + N2 > blowup)
            throw DivergedError("simulate: diverged", t);
        push_summary(tn, bc[0], bc[1]);
        if ((s + 1) % stride == 0 || s + 1 == n_steps) record_state(tn);
    }
    return traj;
}

std::array<double, 2> steady_residual(const ModelParams& params, double N1, double N2) {
    if (!(N1 >= 0.0) || !(N2 >= 0.0)) throw DomainError("steady_residual: N1, N2 must be >= 0");
    const AgeGrid& g = params.grid();
    const std::size_t n = g.n_nodes();
    const double ct = params.ctot(N1, N2);
    const double cc = params.ctilde(N1, N2);
    const double et = params.eta(N1, N2);

    const auto Hk = cumulative_trapezoid(g, params.k.values());
    const auto Hd = cumulative_trapezoid(g, params.d.values());
    std::vector<double> b_sk(n), kq_sk(n), one_sk(n), bt_sd(n), one_sd(n);
    for_each_index(n, [&](std::size_t i) {
        const double sk = std::exp(-Hk[i]);
        const double sd = std::exp(-Hd[i]);
        b_sk[i] = params.b[i] * sk;
        kq_sk[i] = (params.k[i] + et) * sk;
        one_sk[i] = sk;
        bt_sd[i] = params.btilde[i] * sd;
        one_sd[i] = sd;
    });
    const double r1 = integrate_decayed(g, bt_sd, cc) * integrate_decayed(g, kq_sk, ct) +
                      integrate_decayed(g, b_sk, ct) - 1.0;
    const double r2 = N1 * integrate_decayed(g, one_sd, cc) * integrate_decayed(g, kq_sk, ct) -
                      N2 * integrate_decayed(g, one_sk, ct);
    return {r1, r2};
}

SBounds bounds_S(const ModelParams& params, const PopulationState& init) {
    const double psi1_lo = params.psi1.min(), psi1_hi = params.psi1.max();
    const double psi2_lo = params.psi2.min(), psi2_hi = params.psi2.max();
    if (!(psi1_lo > 0.0) || !(psi2_lo > 0.0))
        throw ConfigError("bounds_S: kernels must be bounded below by a positive constant");
    const double growth = 2.0 * std::max(params.b.max(), params.btilde.max());

    // gap(M) = min(ctilde(0, c2 M), c(c1 M, 0)) - growth, nondecreasing in M
    auto gap = [&](double M) {
        const double via2 = params.ctilde(0.0, psi2_lo * M);
        const double via1 = params.c1 * psi1_lo * M;
        return std::min(via2, via1) - growth;
    };
    if (gap(1e300) <= 0.0)
        throw ConfigError("bounds_S: competition does not dominate growth (unbounded)");
    double lo = 0.0, hi = 1.0;
    while (gap(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    SBounds out;
    out.M_root = 0.5 * (lo + hi);
    out.M_upper = 2.0 * std::max(psi1_hi, psi2_hi) * out.M_root;

    if (params.btilde.max() > 0.0) {
        const auto lam = spectral::solve_lambda0(params);
        if (lam.lambda0 > 0.0) {
            const auto eig = spectral::eigenfunctions(params, lam.lambda0);
            double C1 = 0.0, C2 = 0.0;
            double c1k = std::numeric_limits<double>::infinity();
            double c2k = std::numeric_limits<double>::infinity();
            bool ok = true;
            for (std::size_t i = 0; i < params.grid().n_nodes() && ok; ++i) {
                if (!(eig.phi1_0[i] > 0.0) || !(eig.phi2_0[i] > 0.0)) {
                    ok = false;
                    break;
                }
                C1 = std::max(C1, params.psi1[i] / eig.phi1_0[i]);
                C2 = std::max(C2, params.psi2[i] / eig.phi2_0[i]);
                c1k = std::min(c1k, params.psi1[i] / eig.phi1_0[i]);
                c2k = std::min(c2k, params.psi2[i] / eig.phi2_0[i]);
            }
            if (ok) {
                // root of lambda0 = (c_tot + ctilde)(C1 N, C2 N), linear in N
                const double slope = (params.c1_tot() + params.ctilde1) * C1 +
                                     (params.c2_tot() + params.ctilde2) * C2;
                if (slope > 0.0) {
                    const double Ntilde = lam.lambda0 / slope;
                    const double N0_init = spectral::eigen_weighted_mass(eig, init.n1, init.n2);
                    out.m_lower = std::min(N0_init, Ntilde) / std::max(c1k, c2k);
                }
            }
        }
    }
    return out;
}

}  // namespace agepde::pde
