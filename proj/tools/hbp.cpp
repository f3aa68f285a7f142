// hbp: threshold-2 bootstrap percolation experiments on the Hamming torus.
//
// Exit codes: 0 success, 1 validation or I/O error, 2 budget exceeded,
// 3 verification failure.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "hbp/io.hpp"
#include "hbp/montecarlo.hpp"
#include "hbp/theory.hpp"
#include "hbp/verify.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitBudget = 2;
constexpr int kExitVerification = 3;

struct ExperimentFlags {
    std::string config_file;
    int d = 3;
    int n = 3;
    int j = 1;
    double a = 1.0;
    double p = 0.0;
    int theta = 2;
    std::int64_t trials = 1;
    std::uint64_t seed = 0;
    std::string mode = "exact";
    std::vector<int> record_dims;
    std::string conditional_open;
    std::size_t family_cap = hbp::kDefaultFamilyCap;
    bool timings = false;
    std::string out;
    int workers = 1;

    std::map<std::string, CLI::Option*> options;
};

void add_experiment_flags(CLI::App& cmd, ExperimentFlags& f) {
    f.options["config"] = cmd.add_option("--config", f.config_file, "JSON config file; flags override it");
    f.options["d"] = cmd.add_option("--d", f.d, "torus dimension");
    f.options["n"] = cmd.add_option("--n", f.n, "side length");
    f.options["j"] = cmd.add_option("--j", f.j, "half-dimension index of the spanned subtori");
    f.options["a"] = cmd.add_option("--a", f.a, "amplitude: p = a n^-(d/(j+1)+j)");
    f.options["p"] = cmd.add_option("--p", f.p, "explicit p, overrides --a");
    f.options["theta"] = cmd.add_option("--theta", f.theta, "threshold");
    f.options["trials"] = cmd.add_option("--trials", f.trials, "number of trials");
    f.options["seed"] = cmd.add_option("--seed", f.seed, "master seed (required)");
    f.options["mode"] = cmd.add_option("--mode", f.mode, "exact|maximal")
                            ->check(CLI::IsMember({"exact", "maximal"}));
    f.options["record_dims"] = cmd.add_option("--record-dims", f.record_dims, "dimensions whose I_i/C_i are recorded")
                                   ->delimiter(',');
    f.options["conditional_open"] =
        cmd.add_option("--conditional-open", f.conditional_open,
                       "subtorus opened before the run, as index:value pairs, e.g. 1:0,2:0");
    f.options["family_cap"] = cmd.add_option("--family-cap", f.family_cap, "cap on the generated family size");
    f.options["timings"] = cmd.add_flag("--timings", f.timings, "record per-trial wall time (nondeterministic)");
    cmd.add_option("--out", f.out, "output prefix");
    cmd.add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
}

bool given(const ExperimentFlags& f, const std::string& name) { return f.options.at(name)->count() > 0; }

hbp::Subtorus parse_subtorus(const hbp::Dimensions& dims, const std::string& text) {
    std::vector<std::pair<int, hbp::Coord>> fixed;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("expected index:value, got '" + item + "'");
        fixed.emplace_back(std::stoi(item.substr(0, colon)),
                           static_cast<hbp::Coord>(std::stoul(item.substr(colon + 1))));
    }
    return hbp::Subtorus(dims, fixed);
}

hbp::ExperimentConfig build_config(const ExperimentFlags& f) {
    hbp::ExperimentConfig cfg;
    bool seeded = false;
    if (!f.config_file.empty()) {
        std::ifstream in(f.config_file);
        if (!in) throw std::invalid_argument("cannot read config file " + f.config_file);
        hbp::io::json j;
        try {
            in >> j;
        } catch (const hbp::io::json::exception& e) {
            throw std::invalid_argument("config file is not valid JSON: " + std::string(e.what()));
        }
        cfg = hbp::io::config_from_json(j);
        seeded = j.contains("seed") && !j.at("seed").is_null();
    }
    cfg.dims = hbp::Dimensions(given(f, "d") ? f.d : cfg.dims.d(), given(f, "n") ? f.n : cfg.dims.n());
    if (given(f, "j")) cfg.j = f.j;
    if (given(f, "a")) {
        cfg.amplitude = f.a;
        cfg.p_override.reset();
    }
    if (given(f, "p")) cfg.p_override = f.p;
    if (given(f, "theta")) cfg.theta = f.theta;
    if (given(f, "trials")) cfg.trials = f.trials;
    if (given(f, "seed")) {
        cfg.master_seed = f.seed;
        seeded = true;
    }
    if (given(f, "mode")) cfg.mode = f.mode == "exact" ? hbp::CountMode::exact : hbp::CountMode::maximal;
    if (given(f, "record_dims")) cfg.record_dims = f.record_dims;
    if (given(f, "conditional_open")) {
        cfg.conditional_open = parse_subtorus(cfg.dims, f.conditional_open);
    } else if (cfg.conditional_open && cfg.conditional_open->dims() != cfg.dims) {
        cfg.conditional_open = hbp::Subtorus(cfg.dims, cfg.conditional_open->fixed());
    }
    if (given(f, "family_cap")) cfg.family_cap = f.family_cap;
    if (given(f, "timings")) cfg.record_timings = f.timings;
    if (!seeded) throw std::invalid_argument("a master seed is required (--seed or \"seed\" in the config)");
    cfg.validate();
    return cfg;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path);
}

int cmd_theory(int d, int j, double a) {
    const hbp::theory::CriticalScaling scaling(j, d, a);
    const auto prediction = hbp::theory::poisson_prediction(j, d, a);
    const auto exponent = scaling.exponent();
    std::cout << std::setprecision(12);
    std::cout << "d                  " << d << '\n';
    if (d > 2) {
        std::cout << "J_d                " << hbp::theory::J_of(d) << '\n';
    } else {
        std::cout << "J_d                undefined (d <= 2)\n";
    }
    std::cout << "j                  " << j << '\n'
              << "a                  " << a << '\n'
              << "lambda             " << prediction.lambda << '\n'
              << "critical_exponent  " << exponent.num << '/' << exponent.den << " = " << exponent.value() << '\n'
              << "limit_P_I_" << 2 * j << "        " << prediction.limit_prob << '\n';
    if (d > 2 && j > hbp::theory::J_of(d)) {
        std::cout << "note: j > J_d, outside the range with a distinct critical exponent\n";
    }
    return 0;
}

int cmd_simulate(const ExperimentFlags& f) {
    const auto cfg = build_config(f);
    hbp::io::RunManifest manifest;
    manifest.config = cfg;
    manifest.master_seed = cfg.master_seed;
    manifest.trials = cfg.trials;
    manifest.workers = f.workers;
    manifest.started_at = hbp::io::utc_timestamp();
    const auto result = hbp::run_experiment(cfg, f.workers);
    manifest.finished_at = hbp::io::utc_timestamp();

    const hbp::io::json summary = {{"config", hbp::io::to_json(cfg)},
                                   {"summary", hbp::io::to_json(result.summary)}};
    if (f.out.empty()) {
        std::cout << summary.dump(2) << '\n';
        return 0;
    }
    std::ostringstream trials;
    hbp::io::write_trials_csv(trials, cfg, result.trials);
    write_file(f.out + ".manifest.json", hbp::io::to_json(manifest).dump(2) + "\n");
    write_file(f.out + ".summary.json", summary.dump(2) + "\n");
    write_file(f.out + ".trials.csv", trials.str());
    const auto* I = result.summary.find("I_" + std::to_string(2 * cfg.j));
    std::cout << "P(I_" << 2 * cfg.j << ") = " << I->estimate << "  [" << I->wilson_low << ", "
              << I->wilson_high << "]  predicted limit " << result.summary.predicted_I_limit << '\n'
              << "wrote " << f.out << ".{manifest.json,summary.json,trials.csv}\n";
    return 0;
}

int cmd_sweep(const ExperimentFlags& f, const std::string& parameter, const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("--values must list at least one value");
    const auto cfg = build_config(f);
    const auto which = parameter == "n" ? hbp::SweepParameter::n : hbp::SweepParameter::a;
    const auto cells = hbp::sweep(cfg, which, values, f.workers);
    std::ostringstream csv;
    hbp::io::write_sweep_csv(csv, cfg, which, cells);
    if (f.out.empty()) {
        std::cout << csv.str();
    } else {
        write_file(f.out + ".sweep.csv", csv.str());
        std::cout << "wrote " << f.out << ".sweep.csv\n";
    }
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::int64_t cases) {
    bool passed = false;
    if (suite == "oracle") {
        hbp::OracleSuite oracle_suite;
        oracle_suite.random_cases = cases;
        const auto report = hbp::verify_oracle(oracle_suite, seed);
        std::cout << "oracle: " << report.cases << " cases, " << report.mismatches.size() << " mismatches\n";
        for (const auto& m : report.mismatches) {
            std::cout << "  mismatch " << hbp::to_string(m.dims) << ": " << m.detail << "; reproducer:";
            for (const auto& u : m.seeds) std::cout << ' ' << hbp::to_string(u);
            std::cout << '\n';
        }
        passed = report.passed();
    } else {
        const auto report = suite == "properties" ? hbp::verify_properties(cases, seed) : hbp::verify_perfect();
        std::cout << suite << ": " << report.checks << " checks, " << report.failures.size() << " failures\n";
        for (const auto& note : report.notes) std::cout << "  ok    " << note << '\n';
        for (const auto& failure : report.failures) std::cout << "  FAIL  " << failure << '\n';
        passed = report.passed();
    }
    std::cout << (passed ? "PASS" : "FAIL") << '\n';
    return passed ? 0 : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Threshold-2 bootstrap percolation on the Hamming torus"};
    app.require_subcommand(1);

    auto* theory = app.add_subcommand("theory", "closed-form predictions for (d, j, a)");
    int t_d = 3;
    int t_j = 1;
    double t_a = 1.0;
    theory->add_option("--d", t_d)->required();
    theory->add_option("--j", t_j)->required();
    theory->add_option("--a", t_a)->required();

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the spanning events");
    ExperimentFlags sim_flags;
    add_experiment_flags(*simulate, sim_flags);

    auto* sweep = app.add_subcommand("sweep", "one experiment per value of n or a, as a CSV trend table");
    ExperimentFlags sweep_flags;
    add_experiment_flags(*sweep, sweep_flags);
    std::string parameter = "n";
    std::vector<double> values;
    sweep->add_option("--parameter", parameter)->check(CLI::IsMember({"n", "a"}));
    sweep->add_option("--values", values, "comma-separated values")->delimiter(',');

    auto* verify = app.add_subcommand("verify", "self-check suites");
    std::string suite;
    std::uint64_t v_seed = 1;
    std::int64_t v_cases = 1000;
    verify->add_option("suite", suite)->required()->check(CLI::IsMember({"oracle", "properties", "perfect"}));
    verify->add_option("--seed", v_seed);
    verify->add_option("--cases", v_cases, "randomized cases");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (*theory) return cmd_theory(t_d, t_j, t_a);
        if (*simulate) return cmd_simulate(sim_flags);
        if (*sweep) return cmd_sweep(sweep_flags, parameter, values);
        if (*verify) return cmd_verify(suite, v_seed, v_cases);
    } catch (const hbp::BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return 0;
}
