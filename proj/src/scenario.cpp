#include "agepde/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace agepde {

using nlohmann::json;

std::string to_string(ModelKind m) {
    switch (m) {
        case ModelKind::pde: return "pde";
        case ModelKind::pde_linear: return "pde-linear";
        case ModelKind::ode: return "ode";
        case ModelKind::hybrid: return "hybrid";
    }
    return "?";
}

AgeFunction ProfileSpec::materialize(const AgeGrid& grid) const {
    switch (kind) {
        case Kind::constant:
            return AgeFunction::constant(grid, value);
        case Kind::table:
            return AgeFunction::from_table(grid, table);
        case Kind::indicator:
            return AgeFunction::sample(grid, [&](double a) {
                return (a >= lo && a <= hi) ? scale : 0.0;
            });
    }
    throw ConfigError("ProfileSpec: unknown kind");
}

ModelParams Scenario::params_on(const AgeGrid& g) const {
    return ModelParams(b.materialize(g), btilde.materialize(g), k.materialize(g),
                       d.materialize(g), eta1, eta2, c1, c2, ctilde1, ctilde2,
                       psi1.materialize(g), psi2.materialize(g));
}

bool Scenario::rates_constant() const {
    return b.is_constant() && btilde.is_constant() && k.is_constant() && d.is_constant();
}

ode::OdeParams Scenario::ode_params() const {
    if (!rates_constant())
        throw ConfigError("scenario '" + name + "': ode parameters require constant rates");
    ode::OdeParams p;
    p.b = b.value;
    p.btilde = btilde.value;
    p.k = k.value;
    p.d = d.value;
    p.eta1 = eta1;
    p.eta2 = eta2;
    p.c1 = c1;
    p.c2 = c2;
    p.ctilde1 = ctilde1;
    p.ctilde2 = ctilde2;
    return p;
}

namespace {

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
    std::string unknown;
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) unknown += (unknown.empty() ? "" : ", ") + where + "." + key;
    }
    if (!unknown.empty()) throw ConfigError("scenario: unknown key(s): " + unknown);
}

double require_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ConfigError("scenario: missing or non-numeric '" + where + "." + key + "'");
    return obj[key].get<double>();
}

ProfileSpec parse_profile(const json& obj, const std::string& where, bool allow_negative = false) {
    require_keys(obj, where, {"constant", "table", "indicator", "scale"});
    ProfileSpec spec;
    int forms = 0;
    if (obj.contains("constant")) {
        spec.kind = ProfileSpec::Kind::constant;
        spec.value = obj["constant"].get<double>();
        if (!allow_negative && spec.value < 0.0)
            throw ConfigError("scenario: negative value in '" + where + ".constant'");
        ++forms;
    }
    if (obj.contains("table")) {
        spec.kind = ProfileSpec::Kind::table;
        for (const auto& row : obj["table"]) {
            if (!row.is_array() || row.size() != 2)
                throw ConfigError("scenario: '" + where + ".table' rows must be [age, value]");
            const double a = row[0].get<double>();
            const double v = row[1].get<double>();
            if (!allow_negative && v < 0.0)
                throw ConfigError("scenario: negative value in '" + where + ".table'");
            spec.table.emplace_back(a, v);
        }
        ++forms;
    }
    if (obj.contains("indicator")) {
        spec.kind = ProfileSpec::Kind::indicator;
        const auto& arr = obj["indicator"];
        if (!arr.is_array() || arr.size() != 2)
            throw ConfigError("scenario: '" + where + ".indicator' must be [lo, hi]");
        spec.lo = arr[0].get<double>();
        spec.hi = arr[1].get<double>();
        spec.scale = obj.value("scale", 1.0);
        if (spec.scale < 0.0) throw ConfigError("scenario: negative '" + where + ".scale'");
        ++forms;
    }
    if (forms != 1)
        throw ConfigError("scenario: '" + where + "' needs exactly one of constant/table/indicator");
    return spec;
}

}  // namespace

Scenario load_scenario_json(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario " + origin + ": " + e.what());
    }
    require_keys(root, "", {"name", "model", "grid", "rates", "competition", "kernels", "init",
                            "solver", "s_table", "truncation_tol", "verify"});

    Scenario sc;
    sc.name = root.value("name", origin);
    const std::string model = root.value("model", "");
    if (model == "pde")
        sc.model = ModelKind::pde;
    else if (model == "pde-linear")
        sc.model = ModelKind::pde_linear;
    else if (model == "ode")
        sc.model = ModelKind::ode;
    else if (model == "hybrid")
        sc.model = ModelKind::hybrid;
    else
        throw ConfigError("scenario: 'model' must be pde | pde-linear | ode | hybrid");

    if (!root.contains("grid")) throw ConfigError("scenario: missing 'grid'");
    require_keys(root["grid"], "grid", {"a_max", "n_cells"});
    sc.grid = AgeGrid(require_number(root["grid"], "grid", "a_max"),
                      static_cast<std::size_t>(require_number(root["grid"], "grid", "n_cells")));

    if (!root.contains("rates")) throw ConfigError("scenario: missing 'rates'");
    const json& rates = root["rates"];
    require_keys(rates, "rates", {"b", "btilde", "k", "d"});
    for (const char* key : {"b", "btilde", "k", "d"})
        if (!rates.contains(key)) throw ConfigError(std::string("scenario: missing 'rates.") + key + "'");
    sc.b = parse_profile(rates["b"], "rates.b");
    sc.btilde = parse_profile(rates["btilde"], "rates.btilde");
    sc.k = parse_profile(rates["k"], "rates.k");
    sc.d = parse_profile(rates["d"], "rates.d");

    if (!root.contains("competition")) throw ConfigError("scenario: missing 'competition'");
    const json& comp = root["competition"];
    require_keys(comp, "competition", {"eta1", "eta2", "c1", "c2", "ctilde1", "ctilde2"});
    auto coeff = [&](const char* key) {
        const double v = comp.value(key, 0.0);
        if (v < 0.0) throw ConfigError(std::string("scenario: negative 'competition.") + key + "'");
        return v;
    };
    sc.eta1 = coeff("eta1");
    sc.eta2 = coeff("eta2");
    sc.c1 = coeff("c1");
    sc.c2 = coeff("c2");
    sc.ctilde1 = coeff("ctilde1");
    sc.ctilde2 = coeff("ctilde2");

    sc.psi1.kind = ProfileSpec::Kind::constant;
    sc.psi1.value = 1.0;
    sc.psi2 = sc.psi1;
    if (root.contains("kernels")) {
        require_keys(root["kernels"], "kernels", {"psi1", "psi2"});
        if (root["kernels"].contains("psi1"))
            sc.psi1 = parse_profile(root["kernels"]["psi1"], "kernels.psi1");
        if (root["kernels"].contains("psi2"))
            sc.psi2 = parse_profile(root["kernels"]["psi2"], "kernels.psi2");
    }

    if (!root.contains("init")) throw ConfigError("scenario: missing 'init'");
    const json& init = root["init"];
    if (sc.model == ModelKind::ode) {
        require_keys(init, "init", {"N1", "N2"});
        sc.init_N1 = require_number(init, "init", "N1");
        sc.init_N2 = require_number(init, "init", "N2");
        if (sc.init_N1 < 0.0 || sc.init_N2 < 0.0)
            throw ConfigError("scenario: 'init' populations must be >= 0");
    } else if (sc.model == ModelKind::hybrid) {
        require_keys(init, "init", {"n1", "N2"});
        if (!init.contains("n1")) throw ConfigError("scenario: hybrid init requires 'init.n1'");
        sc.init_n1 = parse_profile(init["n1"], "init.n1");
        sc.init_N2 = require_number(init, "init", "N2");
        if (sc.init_N2 < 0.0) throw ConfigError("scenario: 'init.N2' must be >= 0");
    } else {
        require_keys(init, "init", {"n1", "n2"});
        if (!init.contains("n1") || !init.contains("n2"))
            throw ConfigError("scenario: pde init requires 'init.n1' and 'init.n2'");
        sc.init_n1 = parse_profile(init["n1"], "init.n1");
        sc.init_n2 = parse_profile(init["n2"], "init.n2");
    }

    if (root.contains("solver")) {
        require_keys(root["solver"], "solver", {"t_end", "record_every", "dt"});
        sc.t_end = root["solver"].value("t_end", 10.0);
        sc.record_every = root["solver"].value("record_every", 1L);
        if (root["solver"].contains("dt")) {
            const double dt = root["solver"]["dt"].get<double>();
            if (std::abs(dt - sc.grid.da()) > 1e-15 * sc.grid.da())
                throw ConfigError("scenario: solver.dt must equal the grid step a_max/n_cells");
        }
    }
    if (root.contains("s_table")) {
        if (sc.model != ModelKind::pde_linear)
            throw ConfigError("scenario: 's_table' only applies to model pde-linear");
        require_keys(root["s_table"], "s_table", {"t", "S1", "S2"});
        sc.s_table.t = root["s_table"]["t"].get<std::vector<double>>();
        sc.s_table.S1 = root["s_table"]["S1"].get<std::vector<double>>();
        sc.s_table.S2 = root["s_table"]["S2"].get<std::vector<double>>();
        if (sc.s_table.t.size() != sc.s_table.S1.size() ||
            sc.s_table.t.size() != sc.s_table.S2.size())
            throw ConfigError("scenario: 's_table' columns must have equal length");
    }
    sc.truncation_tol = root.value("truncation_tol", kTruncationTol);
    if (root.contains("verify")) {
        require_keys(root["verify"], "verify", {"checks"});
        if (root["verify"].contains("checks"))
            sc.verify_only = root["verify"]["checks"].get<std::vector<std::string>>();
    }

    // model-specific constraints
    if (sc.model == ModelKind::hybrid) {
        const bool bt_zero = (sc.btilde.is_constant() && sc.btilde.value == 0.0);
        if (!bt_zero)
            throw ConfigError("scenario: hybrid model requires btilde identically zero");
        if (!sc.d.is_constant())
            throw ConfigError("scenario: hybrid model requires a constant death rate d");
    }
    if (sc.model == ModelKind::ode && !sc.rates_constant())
        throw ConfigError("scenario: ode model requires constant rates");

    try {
        sc.assumptions = check_assumptions(sc.params(), sc.truncation_tol);
    } catch (const DomainError& e) {
        throw ConfigError("scenario '" + sc.name + "': " + e.what());
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scenario: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return load_scenario_json(buf.str(), path.filename().string());
}

}  // namespace agepde
