#include "hbp/io.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <ostream>
#include <set>
#include <stdexcept>

namespace hbp::io {

namespace {

const std::set<std::string> kConfigKeys = {"d",    "n",           "j",
                                           "a",    "p",           "theta",
                                           "trials", "seed",      "mode",
                                           "record_dims", "conditional_open", "family_cap",
                                           "timings"};

template <class T>
void read_if(const json& j, const char* key, T& target) {
    if (j.contains(key) && !j.at(key).is_null()) target = j.at(key).get<T>();
}

std::string mode_name(CountMode mode) { return mode == CountMode::exact ? "exact" : "maximal"; }

CountMode parse_mode(const std::string& s) {
    if (s == "exact") return CountMode::exact;
    if (s == "maximal") return CountMode::maximal;
    throw std::invalid_argument("mode must be exact or maximal, got '" + s + "'");
}

std::string optional_double(const std::optional<double>& x) { return x ? format_double(*x) : ""; }

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, result.ptr);
}

json to_json(const Subtorus& v) {
    json fixed = json::array();
    for (auto [l, a] : v.fixed()) fixed.push_back({l, a});
    return fixed;
}

Subtorus subtorus_from_json(const Dimensions& dims, const json& j) {
    if (!j.is_array()) throw std::invalid_argument("subtorus must be an array of [index, value] pairs");
    std::vector<std::pair<int, Coord>> fixed;
    for (const auto& entry : j) {
        if (!entry.is_array() || entry.size() != 2) {
            throw std::invalid_argument("subtorus entries must be [index, value] pairs");
        }
        fixed.emplace_back(entry[0].get<int>(), entry[1].get<Coord>());
    }
    return Subtorus(dims, fixed);
}

json to_json(const ExperimentConfig& cfg) {
    json j;
    j["d"] = cfg.dims.d();
    j["n"] = cfg.dims.n();
    j["j"] = cfg.j;
    j["a"] = cfg.amplitude ? json(*cfg.amplitude) : json(nullptr);
    j["p"] = cfg.p_override ? json(*cfg.p_override) : json(nullptr);
    j["theta"] = cfg.theta;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.master_seed;
    j["mode"] = mode_name(cfg.mode);
    j["record_dims"] = cfg.record_dims;
    j["conditional_open"] = cfg.conditional_open ? to_json(*cfg.conditional_open) : json(nullptr);
    j["family_cap"] = cfg.family_cap;
    j["timings"] = cfg.record_timings;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (!kConfigKeys.contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
    }
    try {
        ExperimentConfig cfg;
        int d = cfg.dims.d();
        int n = cfg.dims.n();
        read_if(j, "d", d);
        read_if(j, "n", n);
        cfg.dims = Dimensions(d, n);
        read_if(j, "j", cfg.j);
        if (j.contains("a")) {
            cfg.amplitude = j.at("a").is_null() ? std::nullopt : std::optional(j.at("a").get<double>());
        }
        if (j.contains("p")) {
            cfg.p_override = j.at("p").is_null() ? std::nullopt : std::optional(j.at("p").get<double>());
        }
        read_if(j, "theta", cfg.theta);
        read_if(j, "trials", cfg.trials);
        read_if(j, "seed", cfg.master_seed);
        if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
        read_if(j, "record_dims", cfg.record_dims);
        if (j.contains("conditional_open") && !j.at("conditional_open").is_null()) {
            cfg.conditional_open = subtorus_from_json(cfg.dims, j.at("conditional_open"));
        }
        read_if(j, "family_cap", cfg.family_cap);
        read_if(j, "timings", cfg.record_timings);
        return cfg;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed config: ") + e.what());
    }
}

json to_json(const Estimate& e) {
    return {{"event", e.event},           {"successes", e.successes},
            {"trials", e.trials},         {"estimate", e.estimate},
            {"std_error", e.std_error},   {"wilson_low", e.wilson_low},
            {"wilson_high", e.wilson_high}};
}

json to_json(const Summary& s) {
    json events = json::array();
    for (const auto& e : s.events) events.push_back(to_json(e));
    return {{"p", s.p},
            {"seed_count_law", s.seed_count_law},
            {"le_cam_bound", s.le_cam_bound},
            {"trials", s.trials},
            {"events", events},
            {"y_dim", s.y_dim},
            {"y_histogram", s.y_histogram},
            {"lambda_theory", s.lambda_theory},
            {"predicted_I_limit", s.predicted_I_limit},
            {"lambda_hat", s.lambda_hat},
            {"lambda_hat_se", s.lambda_hat_se},
            {"tv_Y_vs_poisson", s.tv_y_vs_poisson},
            {"tv_se", s.tv_se},
            {"truncated_trials", s.truncated_trials},
            {"exact_vs_maximal_mismatches", s.exact_vs_maximal_mismatches},
            {"mean_seed_count", s.mean_seed_count}};
}

json to_json(const RunManifest& m) {
    return {{"tool_version", m.tool_version}, {"config", to_json(m.config)},
            {"started_at", m.started_at},     {"finished_at", m.finished_at},
            {"master_seed", m.master_seed},   {"trials", m.trials},
            {"workers", m.workers}};
}

RunManifest manifest_from_json(const json& j) {
    try {
        RunManifest m;
        m.tool_version = j.at("tool_version").get<std::string>();
        m.config = config_from_json(j.at("config"));
        m.started_at = j.at("started_at").get<std::string>();
        m.finished_at = j.at("finished_at").get<std::string>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.trials = j.at("trials").get<std::int64_t>();
        m.workers = j.at("workers").get<int>();
        return m;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed manifest: ") + e.what());
    }
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_trials_csv(std::ostream& out, const ExperimentConfig& cfg,
                      const std::vector<TrialResult>& trials) {
    const int two_j = 2 * cfg.j;
    const int d = cfg.dims.d();
    const auto y = static_cast<std::size_t>(two_j);
    out << "trial_index,m,Y_exact,Y_maximal,I_" << two_j << ",C_" << two_j << ",I_" << d
        << ",max_dim,truncated,ms\n";
    for (const auto& t : trials) {
        out << t.trial_index << ',' << t.seed_count << ',';
        if (!t.y_exact.empty()) out << t.y_exact[y];
        out << ',' << t.y_maximal[y] << ',' << int(t.event_I[y]) << ',' << int(t.event_C[y]) << ','
            << int(t.event_I[static_cast<std::size_t>(d)]) << ',' << t.max_dim << ','
            << int(t.truncated) << ',';
        if (cfg.record_timings) out << format_double(t.wall_ms);
        out << '\n';
    }
}

std::vector<std::string> sweep_csv_columns() {
    return {"parameter",     "value",     "status",        "p",           "trials",
            "P_I",           "P_I_low",   "P_I_high",      "P_C",         "P_C_low",
            "P_C_high",      "P_C_not_I", "P_I_not_Id",    "lambda_theory", "lambda_hat",
            "lambda_hat_se", "tv_Y_vs_poisson", "tv_se",   "truncated_trials"};
}

void write_sweep_csv(std::ostream& out, const ExperimentConfig& cfg, SweepParameter parameter,
                     const std::vector<SweepCell>& cells) {
    const auto columns = sweep_csv_columns();
    for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k];
    out << '\n';
    const std::string two_j = std::to_string(2 * cfg.j);
    const std::string d = std::to_string(cfg.dims.d());
    for (const auto& cell : cells) {
        // Status text may contain commas; quote it.
        std::string status = cell.status;
        for (std::size_t pos = 0; (pos = status.find('"', pos)) != std::string::npos; pos += 2) {
            status.insert(pos, "\"");
        }
        out << (parameter == SweepParameter::n ? "n" : "a") << ',' << format_double(cell.value) << ",\""
            << status << '"';
        if (!cell.summary) {
            out << std::string(columns.size() - 3, ',') << '\n';
            continue;
        }
        const Summary& s = *cell.summary;
        auto estimate = [&](const std::string& name) {
            const Estimate* e = s.find(name);
            return e ? std::optional(*e) : std::nullopt;
        };
        const auto I = estimate("I_" + two_j);
        const auto C = estimate("C_" + two_j);
        const auto c_not_i = estimate("C_" + two_j + "\\I_" + two_j);
        const auto i_not_d = estimate("I_" + two_j + "\\I_" + d);
        out << ',' << format_double(s.p) << ',' << s.trials << ','
            << optional_double(I ? std::optional(I->estimate) : std::nullopt) << ','
            << optional_double(I ? std::optional(I->wilson_low) : std::nullopt) << ','
            << optional_double(I ? std::optional(I->wilson_high) : std::nullopt) << ','
            << optional_double(C ? std::optional(C->estimate) : std::nullopt) << ','
            << optional_double(C ? std::optional(C->wilson_low) : std::nullopt) << ','
            << optional_double(C ? std::optional(C->wilson_high) : std::nullopt) << ','
            << optional_double(c_not_i ? std::optional(c_not_i->estimate) : std::nullopt) << ','
            << optional_double(i_not_d ? std::optional(i_not_d->estimate) : std::nullopt) << ','
            << format_double(s.lambda_theory) << ',' << format_double(s.lambda_hat) << ','
            << format_double(s.lambda_hat_se) << ',' << format_double(s.tv_y_vs_poisson) << ','
            << format_double(s.tv_se) << ',' << s.truncated_trials << '\n';
    }
}

}  // namespace hbp::io
