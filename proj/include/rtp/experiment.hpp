#pragma once
// Configuration-driven experiment runner: JSON config in, JSON report plus
// CSV tables (byte-reproducible under a fixed config) out.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rtp/coeffgen.hpp"

namespace rtp {

// Config or model JSON violating the schema; path names the offending field
// ("seed", "model.kernel", "params.delta", ...).
class SchemaError : public std::runtime_error {
public:
    SchemaError(std::string where, const std::string& msg)
        : std::runtime_error(where + ": " + msg), path(std::move(where)) {}

    std::string path;
};

struct ExperimentConfig {
    // expect-zeros | clt | small-ball | tv-bound | spectral | sinc-oracle
    std::string kind;
    nlohmann::json model;      // model block; absent for sinc-oracle
    std::vector<int> n;        // degrees (grid sizes for spectral / sinc-oracle)
    int reps = 0;              // required for Monte Carlo kinds
    std::uint64_t seed = 0;    // always required: runs never seed themselves
    std::string out_dir = ".";
    int threads = 0;           // 0: hardware concurrency
    nlohmann::json params;     // kind-specific block
    nlohmann::json tolerances; // overrides of the documented defaults
    nlohmann::json echo;       // original document, embedded in the report
};

// Strict parse: unknown keys, missing required fields, or wrong types throw
// SchemaError with the field path.
ExperimentConfig parse_config(const nlohmann::json& doc);

// Model block schema:
//   {"type": "iid",  "family": "gaussian"|"rademacher"|"uniform"}
//   {"type": "iid",  "family": "two-point", "p": 0.9}
//   {"type": "ma",   "kernel": [...], "family": ..., ["p": ...]}
//   {"type": "gfun", "rho_g": [1, ...] | "closed_form": "bargmann-fock"|"exponential",
//    ["functional": "sign" | {"hermite": [c1, c2, ...]}], ["order": 41],
//    ["eta": 1.0]}
CoefficientModel model_from_json(const nlohmann::json& j,
                                 const std::string& path = "model");

struct ExperimentReport {
    nlohmann::ordered_json document;
    bool all_pass = true;
    bool reliability_warning = false;
    std::vector<std::string> files_written;
};

// Runs the configured experiment and writes report.json, the result table
// CSV, and a plot-data CSV (x,y,yerr) into cfg.out_dir.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// The %.17g formatting shared by every CSV cell (shortest exact form).
std::string format_g17(double v);

} // namespace rtp
