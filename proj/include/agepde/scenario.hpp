// Scenario files: JSON descriptions of the grid, rates, competition
// coefficients, initial data and solver settings. Rates are kept as specs
// (constant / table) so analysis code can resample them onto finer grids
// than the simulation grid.
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "agepde/model.hpp"
#include "agepde/ode.hpp"
#include "agepde/pde.hpp"

namespace agepde {

enum class ModelKind { pde, pde_linear, ode, hybrid };

std::string to_string(ModelKind m);

// Constant, tabulated, or indicator-shaped age profile.
struct ProfileSpec {
    enum class Kind { constant, table, indicator } kind = Kind::constant;
    double value = 0.0;                               // constant
    std::vector<std::pair<double, double>> table;     // (age, value)
    double lo = 0.0, hi = 0.0, scale = 1.0;           // indicator
    bool is_constant() const { return kind == Kind::constant; }
    AgeFunction materialize(const AgeGrid& grid) const;
};

struct Scenario {
    std::string name;
    ModelKind model = ModelKind::pde;
    AgeGrid grid;
    ProfileSpec b, btilde, k, d, psi1, psi2;
    double eta1 = 0, eta2 = 0, c1 = 0, c2 = 0, ctilde1 = 0, ctilde2 = 0;

    ProfileSpec init_n1, init_n2;
    double init_N1 = 0.0, init_N2 = 0.0;  // ode init; init_N2 doubles as the hybrid phase-2 size

    double t_end = 10.0;
    long record_every = 1;
    pde::PrescribedS s_table;
    double truncation_tol = kTruncationTol;
    std::vector<std::string> verify_only;  // empty: run every applicable check

    AssumptionReport assumptions;  // attached at load time

    ModelParams params_on(const AgeGrid& g) const;
    ModelParams params() const { return params_on(grid); }
    ode::OdeParams ode_params() const;  // requires constant rates
    bool rates_constant() const;
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario load_scenario_json(const std::string& text, const std::string& origin = "<memory>");

}  // namespace agepde
