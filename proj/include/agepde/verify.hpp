// The `verify` runner: every acceptance-suite check, instantiated for one
// scenario and gated on its hypotheses (unmet hypotheses skip, never fail).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agepde/scenario.hpp"

namespace agepde::verify {

enum class Status { pass, fail, skipped };

struct Check {
    std::string name;
    Status status = Status::skipped;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string note;
};

struct VerifyReport {
    int schema = 1;
    std::string scenario;
    std::vector<Check> checks;

    bool all_pass() const;
    std::string to_json() const;   // stable field order
    std::string to_text() const;   // one line per check
};

struct VerifyOptions {
    std::uint64_t seed = 12345;
    double tol_scale = 1.0;  // AGEPDE_TOL_SCALE
};

VerifyReport run_verify(const Scenario& sc, const VerifyOptions& opts = {});

// Helper shared with the CLI and tests: a finer grid with the same a_max.
AgeGrid analysis_grid(const AgeGrid& base, double target_da, std::size_t max_cells = 2000000);

}  // namespace agepde::verify
