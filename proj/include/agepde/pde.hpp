// Time integration of the two-phase transport system at unit CFL:
// exact shift along characteristics, cell-mean exponential decay, implicit
// renewal boundary fill. Hosts the steady-state residual of the coupled
// system and the environmental-pressure bounds.
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "agepde/model.hpp"

namespace agepde::pde {

enum class SimMode { nonlinear, linear_prescribed };

// Piecewise-linear (t, S1, S2) table for the prescribed-environment mode.
struct PrescribedS {
    std::vector<double> t, S1, S2;
    std::array<double, 2> at(double time) const;
    bool empty() const { return t.empty(); }
};

struct SolverConfig {
    double dt = 0.0;  // must equal the grid step
    double t_end = 0.0;
    long record_every = 1;
    SimMode mode = SimMode::nonlinear;
    PrescribedS s_table;  // linear mode only
};

struct DivergedError : std::runtime_error {
    double last_valid_time;
    DivergedError(const std::string& msg, double t) : std::runtime_error(msg), last_valid_time(t) {}
};

struct Trajectory {
    // per-step summary, index 0 = initial state
    std::vector<double> times;
    std::vector<double> N1, N2, S1, S2;
    std::vector<double> boundary1, boundary2;  // n1(t,0), n2(t,0)
    // strided full states (always includes the initial and final state)
    std::vector<double> record_times;
    std::vector<PopulationState> states;
};

// One unit-CFL step. S1, S2 frozen at step start (nonlinear mode) or read
// from the table at the step-start time (linear mode).
PopulationState step(const PopulationState& state, const ModelParams& params, double dt,
                     SimMode mode = SimMode::nonlinear, const PrescribedS* table = nullptr);

Trajectory simulate(const ModelParams& params, const PopulationState& init, const SolverConfig& cfg);

// Residuals of the coupled steady-state system at population sizes (N1, N2):
// r1 = birth-loop value - 1, r2 = phase-flux balance.
std::array<double, 2> steady_residual(const ModelParams& params, double N1, double N2);

struct SBounds {
    double M_root = 0.0;   // root of 2 max(||b||,||btilde||) = min(ctilde(0,c2 M), c(c1 M,0))
    double M_upper = 0.0;  // 2 max(C1,C2) M_root
    std::optional<double> m_lower;  // absent when btilde == 0
};

// Upper bound for S1 + S2 along trajectories; adjoint-weighted lower bound
// when btilde is not identically zero. Kernel extrema are taken over the
// grid, so the lower bound is certified for this grid only.
SBounds bounds_S(const ModelParams& params, const PopulationState& init);

}  // namespace agepde::pde
