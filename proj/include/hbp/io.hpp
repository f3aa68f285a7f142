#pragma once

// JSON encodings for configs, summaries and run manifests; CSV for trials
// and sweeps. Numbers are written locale-independently.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "hbp/montecarlo.hpp"

namespace hbp::io {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.3.0";

/// Shortest round-trip decimal form with '.' as separator.
std::string format_double(double x);

json to_json(const Subtorus& v);
Subtorus subtorus_from_json(const Dimensions& dims, const json& j);

/// Keys: d, n, j, a, p, theta, trials, seed, mode, record_dims,
/// conditional_open, family_cap, timings. Missing keys keep defaults.
json to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const json& j);

json to_json(const Estimate& e);
json to_json(const Summary& s);

struct RunManifest {
    std::string tool_version = kToolVersion;
    ExperimentConfig config;
    std::string started_at;   ///< ISO 8601 UTC
    std::string finished_at;  ///< ISO 8601 UTC
    std::uint64_t master_seed = 0;
    std::int64_t trials = 0;
    int workers = 1;

    bool operator==(const RunManifest&) const = default;
};

json to_json(const RunManifest& m);
RunManifest manifest_from_json(const json& j);

std::string utc_timestamp();

/// Columns: trial_index,m,Y_exact,Y_maximal,I_<2j>,C_<2j>,I_<d>,max_dim,truncated,ms.
/// Y_exact is blank when not available, ms is blank unless timings were recorded.
void write_trials_csv(std::ostream& out, const ExperimentConfig& cfg,
                      const std::vector<TrialResult>& trials);

std::vector<std::string> sweep_csv_columns();
void write_sweep_csv(std::ostream& out, const ExperimentConfig& cfg, SweepParameter parameter,
                     const std::vector<SweepCell>& cells);

}  // namespace hbp::io
