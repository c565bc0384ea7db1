// Command-line front end: scenario ingestion, simulation drivers, steady
// state and stability reports, the verify suite, and parameter sweeps.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "agepde/hybrid.hpp"
#include "agepde/io.hpp"
#include "agepde/ode.hpp"
#include "agepde/pde.hpp"
#include "agepde/scenario.hpp"
#include "agepde/spectral.hpp"
#include "agepde/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct GlobalOpts {
    long dt_cells = 0;  // override n_cells when > 0
    std::uint64_t seed = 12345;
    double t_end = -1.0;
    std::string out_dir;
    bool as_json = false;
};

double tol_scale_from_env() {
    if (const char* env = std::getenv("AGEPDE_TOL_SCALE")) {
        const double v = std::atof(env);
        if (v > 0.0) return v;
    }
    return 1.0;
}

agepde::Scenario load(const std::string& path, const GlobalOpts& g) {
    auto sc = agepde::load_scenario(fs::path(path));
    if (g.dt_cells > 0) {
        sc.grid = agepde::AgeGrid(sc.grid.a_max, static_cast<std::size_t>(g.dt_cells));
        sc.assumptions = agepde::check_assumptions(sc.params(), sc.truncation_tol);
    }
    if (g.t_end > 0.0) sc.t_end = g.t_end;
    return sc;
}

fs::path ensure_out(const GlobalOpts& g) {
    fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
    fs::create_directories(dir);
    return dir;
}

int cmd_eigen(const std::string& path, const GlobalOpts& g) {
    const auto sc = load(path, g);
    const auto params = sc.params();
    const auto lam = agepde::spectral::solve_lambda0(params);
    ordered_json j;
    j["scenario"] = sc.name;
    j["R0"] = sc.assumptions.R0;
    j["lambda0"] = lam.lambda0;
    j["degenerate"] = lam.degenerate;
    if (lam.lambda0 > 0.0) {
        const auto eig = agepde::spectral::eigenfunctions(params, lam.lambda0);
        j["m0_normalizer"] = eig.m0_normalizer;
        j["phi1_upper_bound"] = eig.phi1_upper;
        j["phi2_upper_bound"] = eig.phi2_upper;
        const fs::path dir = ensure_out(g);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < sc.grid.n_nodes(); ++i)
            rows.push_back({sc.grid.node(i), eig.n1_0[i], eig.n2_0[i], eig.phi1_0[i], eig.phi2_0[i]});
        agepde::io::write_csv(dir / "eigenfunctions.csv", {"a", "n1_0", "n2_0", "phi1_0", "phi2_0"},
                              rows);
        j["eigenfunctions_csv"] = (dir / "eigenfunctions.csv").string();
    }
    if (g.as_json)
        std::cout << j.dump(2) << "\n";
    else
        for (const auto& [k, v] : j.items()) std::cout << k << " = " << v.dump() << "\n";
    return 0;
}

int cmd_simulate_pde(const std::string& path, const GlobalOpts& g) {
    const auto sc = load(path, g);
    const auto params = sc.params();
    agepde::PopulationState init(0.0, sc.init_n1.materialize(sc.grid),
                                 sc.init_n2.materialize(sc.grid), params);
    agepde::pde::SolverConfig cfg;
    cfg.t_end = sc.t_end;
    cfg.record_every = sc.record_every;
    cfg.mode = sc.model == agepde::ModelKind::pde_linear ? agepde::pde::SimMode::linear_prescribed
                                                         : agepde::pde::SimMode::nonlinear;
    cfg.s_table = sc.s_table;
    const auto traj = agepde::pde::simulate(params, init, cfg);

    const fs::path dir = ensure_out(g);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        rows.push_back({traj.times[i], traj.N1[i], traj.N2[i], traj.S1[i], traj.S2[i],
                        traj.boundary1[i], traj.boundary2[i]});
    agepde::io::write_csv(dir / "summary.csv", {"t", "N1", "N2", "S1", "S2", "n1_at_0", "n2_at_0"},
                          rows);
    std::vector<std::vector<double>> snap;
    for (std::size_t s = 0; s < traj.states.size(); ++s)
        for (std::size_t i = 0; i < sc.grid.n_nodes(); ++i)
            snap.push_back({traj.record_times[s], sc.grid.node(i), traj.states[s].n1[i],
                            traj.states[s].n2[i]});
    agepde::io::write_csv(dir / "snapshots.csv", {"t", "a", "n1", "n2"}, snap);
    agepde::io::write_summary_plot_script(dir);
    std::cout << "wrote " << (dir / "summary.csv").string() << " (" << traj.times.size()
              << " steps, " << traj.states.size() << " snapshots)\n";
    return 0;
}

int cmd_ode_steady(const std::string& path, const GlobalOpts& g) {
    const auto sc = load(path, g);
    const auto p = sc.ode_params();
    const auto rc = agepde::ode::resultant_coefficients(p);
    ordered_json j;
    j["scenario"] = sc.name;
    j["cubic"] = {{"A3", rc.A3}, {"A2", rc.A2}, {"A1", rc.A1}, {"A0", rc.A0}};
    try {
        const auto ss = agepde::ode::steady_state_ode(p);
        j["N1"] = ss.N1s;
        j["N2"] = ss.N2s;
        j["residuals"] = {ss.residual1, ss.residual2};
        j["cubic_root_index"] = ss.cubic_root_index;
        j["status"] = "unique";
    } catch (const agepde::ode::AmbiguousSteadyState& e) {
        j["status"] = "ambiguous";
        auto arr = ordered_json::array();
        for (const auto& c : e.candidates) arr.push_back({{"N1", c.N1s}, {"N2", c.N2s}});
        j["candidates"] = arr;
    } catch (const agepde::ode::NoSteadyState&) {
        j["status"] = "none";
    }
    std::cout << (g.as_json ? j.dump(2) : j.dump(2)) << "\n";
    return j["status"] == "unique" ? 0 : 3;
}

int cmd_ode_run(const std::string& path, const GlobalOpts& g) {
    const auto sc = load(path, g);
    const auto traj = agepde::ode::integrate_ode(sc.ode_params(), sc.init_N1, sc.init_N2,
                                                 sc.t_end, 0.01);
    const fs::path dir = ensure_out(g);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        rows.push_back({traj.times[i], traj.N1[i], traj.N2[i]});
    agepde::io::write_csv(dir / "ode_run.csv", {"t", "N1", "N2"}, rows);
    std::cout << "wrote " << (dir / "ode_run.csv").string()
              << " clip_events=" << traj.clip_events << "\n";
    return 0;
}

ordered_json hybrid_steady_json(const agepde::hybrid::HybridSteadyState& ss) {
    ordered_json j;
    j["lambda0"] = ss.lambda0;
    j["I"] = ss.I;
    j["kappa0"] = ss.kappa0;
    j["A"] = ss.A;
    j["B"] = ss.B;
    j["C"] = ss.C;
    j["Delta"] = ss.Delta;
    switch (ss.case_tag) {
        case agepde::hybrid::CaseTag::A_positive_two_roots: j["case"] = "A_positive_two_roots"; break;
        case agepde::hybrid::CaseTag::A_nonpositive_one_root: j["case"] = "A_nonpositive_one_root"; break;
        case agepde::hybrid::CaseTag::c2tot_zero: j["case"] = "c2tot_zero"; break;
    }
    j["N1"] = ss.N1s;
    j["N2"] = ss.N2s;
    return j;
}

int cmd_hybrid(const std::string& sub, const std::string& path, const GlobalOpts& g) {
    const auto sc = load(path, g);
    const auto params = sc.params();
    if (sub == "run") {
        agepde::hybrid::HybridConfig cfg{sc.t_end, sc.record_every};
        const auto traj =
            agepde::hybrid::simulate_hybrid(params, sc.init_n1.materialize(sc.grid), sc.init_N2, cfg);
        const fs::path dir = ensure_out(g);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            rows.push_back({traj.times[i], traj.N1[i], traj.N2[i]});
        agepde::io::write_csv(dir / "summary.csv", {"t", "N1", "N2"}, rows);
        std::vector<std::vector<double>> prof;
        for (std::size_t s = 0; s < traj.profiles.size(); ++s)
            for (std::size_t i = 0; i < sc.grid.n_nodes(); ++i)
                prof.push_back({traj.record_times[s], sc.grid.node(i), traj.profiles[s][i]});
        agepde::io::write_csv(dir / "profiles.csv", {"t", "a", "n1"}, prof);
        agepde::io::write_summary_plot_script(dir);
        std::cout << "wrote " << (dir / "summary.csv").string() << "\n";
        return 0;
    }
    if (sub == "verify") {
        agepde::verify::VerifyOptions vo;
        vo.seed = g.seed;
        vo.tol_scale = tol_scale_from_env();
        const auto rep = agepde::verify::run_verify(sc, vo);
        if (g.as_json)
            std::cout << rep.to_json();
        else
            std::cout << rep.to_text();
        if (!g.out_dir.empty())
            agepde::io::write_text(ensure_out(g) / "verify_report.json", rep.to_json());
        return rep.all_pass() ? 0 : 1;
    }

    const auto ss = agepde::hybrid::steady_state_hybrid(params);
    ordered_json j = hybrid_steady_json(ss);
    if (sub == "steady") {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (sub == "stability") {
        const auto rep = agepde::hybrid::stability_verdict(params, ss);
        ordered_json js;
        js["stable"] = rep.stable;
        js["b2_direct"] = rep.b2_direct;
        js["b2_identity"] = rep.b2_identity;
        js["b3_direct"] = rep.b3_direct;
        js["b3_identity"] = rep.b3_identity;
        js["coeff_linear"] = rep.coeff_linear;
        js["coeff_const"] = rep.coeff_const;
        js["det_crosscheck_residual"] = rep.det_crosscheck_residual;
        std::cout << js.dump(2) << "\n";
        return 0;
    }
    if (sub == "compare") {
        const auto rep = agepde::hybrid::one_phase_and_comparisons(params);
        ordered_json jc;
        jc["N_star"] = rep.N_star;
        jc["N1"] = rep.N1s;
        jc["N2"] = rep.N2s;
        jc["N1_no_eta"] = rep.N1ss;
        jc["N2_no_eta"] = rep.N2ss;
        jc["sum_ge"] = rep.sum_ge_applicable ? (rep.sum_ge ? "true" : "false") : "not guaranteed";
        jc["n1_order"] = rep.n1_order;
        jc["n2_order"] = rep.n2_order;
        jc["total_order_iff"] = rep.total_order_iff;
        std::cout << jc.dump(2) << "\n";
        return 0;
    }
    std::cerr << "unknown hybrid subcommand: " << sub << "\n";
    return 2;
}

int cmd_verify(const std::string& path, const GlobalOpts& g) {
    const auto sc = load(path, g);
    agepde::verify::VerifyOptions vo;
    vo.seed = g.seed;
    vo.tol_scale = tol_scale_from_env();
    const auto rep = agepde::verify::run_verify(sc, vo);
    if (g.as_json)
        std::cout << rep.to_json();
    else
        std::cout << rep.to_text();
    if (!g.out_dir.empty())
        agepde::io::write_text(ensure_out(g) / "verify_report.json", rep.to_json());
    return rep.all_pass() ? 0 : 1;
}

int cmd_sweep(const std::string& path, const std::string& param, const std::string& values_csv,
              int workers, const GlobalOpts& g) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << "\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string base_text = buf.str();

    std::vector<double> values;
    std::stringstream vs(values_csv);
    std::string tok;
    while (std::getline(vs, tok, ',')) values.push_back(std::stod(tok));
    if (values.empty()) {
        std::cerr << "sweep: no values\n";
        return 2;
    }
    std::string pointer = "/" + param;
    for (auto& ch : pointer)
        if (ch == '.') ch = '/';

    struct Row {
        double value;
        double out1, out2, out3;
        bool ok;
        std::string note;
    };
    std::vector<Row> rows(values.size());

#ifdef _OPENMP
    if (workers > 0) omp_set_num_threads(workers);
#pragma omp parallel for schedule(dynamic)
#endif
    for (long idx = 0; idx < static_cast<long>(values.size()); ++idx) {
        Row row{values[static_cast<std::size_t>(idx)], 0, 0, 0, true, ""};
        try {
            nlohmann::json mod = nlohmann::json::parse(base_text);
            mod[nlohmann::json::json_pointer(pointer)] = row.value;
            auto sc = agepde::load_scenario_json(mod.dump(), path);
            if (g.dt_cells > 0) sc.grid = agepde::AgeGrid(sc.grid.a_max, static_cast<std::size_t>(g.dt_cells));
            if (g.t_end > 0.0) sc.t_end = g.t_end;
            switch (sc.model) {
                case agepde::ModelKind::ode: {
                    const auto ss = agepde::ode::steady_state_ode(sc.ode_params());
                    row.out1 = ss.N1s;
                    row.out2 = ss.N2s;
                    row.out3 = std::max(ss.residual1, ss.residual2);
                    break;
                }
                case agepde::ModelKind::hybrid: {
                    const auto ss = agepde::hybrid::steady_state_hybrid(sc.params());
                    row.out1 = ss.N1s;
                    row.out2 = ss.N2s;
                    row.out3 = ss.lambda0;
                    break;
                }
                default: {
                    const auto params = sc.params();
                    agepde::PopulationState init(0.0, sc.init_n1.materialize(sc.grid),
                                                 sc.init_n2.materialize(sc.grid), params);
                    agepde::pde::SolverConfig cfg;
                    cfg.t_end = sc.t_end;
                    cfg.record_every = 1 << 30;
                    cfg.mode = sc.model == agepde::ModelKind::pde_linear
                                   ? agepde::pde::SimMode::linear_prescribed
                                   : agepde::pde::SimMode::nonlinear;
                    cfg.s_table = sc.s_table;
                    const auto traj = agepde::pde::simulate(params, init, cfg);
                    row.out1 = traj.N1.back();
                    row.out2 = traj.N2.back();
                    row.out3 = traj.times.back();
                    break;
                }
            }
        } catch (const std::exception& e) {
            row.ok = false;
            row.note = e.what();
        }
        rows[static_cast<std::size_t>(idx)] = row;
    }

    const fs::path dir = ensure_out(g);
    std::vector<std::vector<double>> csv;
    for (const auto& row : rows)
        csv.push_back({row.value, row.out1, row.out2, row.out3, row.ok ? 1.0 : 0.0});
    agepde::io::write_csv(dir / "sweep.csv", {param, "out1", "out2", "out3", "ok"}, csv);
    std::cout << "wrote " << (dir / "sweep.csv").string() << "\n";
    for (const auto& row : rows)
        if (!row.ok) std::cout << "value " << row.value << ": " << row.note << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"agepde: two-phase age-structured population laboratory"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--dt-cells", g.dt_cells, "override the grid cell count (coarse smoke runs)");
    app.add_option("--seed", g.seed, "seed for randomized property suites");

    std::string scenario_path, sweep_param, sweep_values;
    int sweep_workers = 0;

    auto add_common = [&](CLI::App* cmd, bool with_out = true) {
        cmd->add_option("scenario", scenario_path, "scenario file")->required();
        if (with_out) cmd->add_option("--out", g.out_dir, "output directory");
        cmd->add_option("--t-end", g.t_end, "override the time horizon");
        cmd->add_flag("--json", g.as_json, "JSON output");
    };

    auto* eigen = app.add_subcommand("eigen", "growth rate and eigenfunctions");
    add_common(eigen);
    auto* simulate = app.add_subcommand("simulate-pde", "integrate the full system");
    add_common(simulate);
    auto* ode = app.add_subcommand("ode", "constant-rate reduction");
    auto* ode_steady = ode->add_subcommand("steady", "resultant-based steady state");
    add_common(ode_steady);
    auto* ode_run = ode->add_subcommand("run", "RK4 trajectory");
    add_common(ode_run);
    auto* hybrid = app.add_subcommand("hybrid", "age-structured phase 1 + scalar phase 2");
    std::vector<CLI::App*> hybrid_subs;
    for (const char* sub : {"steady", "stability", "compare", "run", "verify"}) {
        auto* cmd = hybrid->add_subcommand(sub);
        add_common(cmd);
        hybrid_subs.push_back(cmd);
    }
    auto* verify = app.add_subcommand("verify", "run every applicable check");
    add_common(verify);
    auto* sweep = app.add_subcommand("sweep", "parameter sweep");
    add_common(sweep);
    sweep->add_option("--param", sweep_param, "scenario key to vary, dotted path")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep->add_option("--workers", sweep_workers, "worker threads (default: all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (eigen->parsed()) return cmd_eigen(scenario_path, g);
        if (simulate->parsed()) return cmd_simulate_pde(scenario_path, g);
        if (ode_steady->parsed()) return cmd_ode_steady(scenario_path, g);
        if (ode_run->parsed()) return cmd_ode_run(scenario_path, g);
        if (hybrid->parsed()) {
            const char* names[] = {"steady", "stability", "compare", "run", "verify"};
            for (std::size_t i = 0; i < hybrid_subs.size(); ++i)
                if (hybrid_subs[i]->parsed()) return cmd_hybrid(names[i], scenario_path, g);
        }
        if (verify->parsed()) return cmd_verify(scenario_path, g);
        if (sweep->parsed()) return cmd_sweep(scenario_path, sweep_param, sweep_values,
                                              sweep_workers, g);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
