// admitctl: experiment driver for the admission-control library.
//
// Subcommands:
//   run       one configuration -> regret CSV (stdout or --out file)
//   sweep     multi-section config file -> one CSV per section + manifest.csv
//   oracle    closed-form reference values for a parameter set
//   estimate  rate estimates from a trajectory dump
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "admission/config_file.hpp"
#include "admission/estimators.hpp"
#include "admission/harness.hpp"
#include "admission/oracles.hpp"
#include "admission/params.hpp"
#include "admission/simulator.hpp"

namespace {

std::string format_value(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

// Quote a manifest field only when it would break the row (RFC 4180 style).
std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

// Section names become file names; keep only portable characters.
std::string file_safe(const std::string& name) {
    std::string safe;
    for (char c : name) {
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
        safe += ok ? c : '_';
    }
    return safe.empty() ? std::string("entry") : safe;
}

// Every value-taking flag funnels its raw text into the same key-value map the
// config-file reader produces, so one code path (build_run_config) interprets
// both sources and flags override file values by construction.
void register_config_flags(CLI::App* cmd, std::map<std::string, std::string>* overrides,
                           bool with_out) {
    auto capture = [overrides](const char* key) {
        std::string name = key;
        return [overrides, name](const std::string& value) { (*overrides)[name] = value; };
    };
    cmd->add_option_function<std::string>("--lambda", capture("lambda"), "arrival rate");
    cmd->add_option_function<std::string>("--mu", capture("mu"), "service rate");
    cmd->add_option_function<std::string>("--servers", capture("servers"), "number of servers");
    cmd->add_option_function<std::string>("--reward", capture("reward"), "admission reward");
    cmd->add_option_function<std::string>("--cost", capture("cost"),
                                          "cost per unit of service time");
    cmd->add_option_function<std::string>("--horizon", capture("horizon"),
                                          "arrivals per replication");
    cmd->add_option_function<std::string>("--runs", capture("runs"), "number of replications");
    cmd->add_option_function<std::string>("--seed", capture("seed"), "base seed");
    cmd->add_option_function<std::string>(
        "--policy", capture("policy"),
        "alg1|alg2|sampled|thompson|rlearning|oracle|always-admit|never-admit");
    cmd->add_option_function<std::string>(
        "--schedule", capture("schedule"),
        "poly-power|exp-power|exp-linear|exp-power-decaying");
    cmd->add_option_function<std::string>("--epsilon", capture("epsilon"),
                                          "exp-power schedule shape");
    cmd->add_option_function<std::string>("--epsilon-bar", capture("epsilon-bar"),
                                          "exp-power-decaying schedule shape");
    cmd->add_option_function<std::string>("--poly-power", capture("poly-power"),
                                          "poly-power schedule exponent");
    cmd->add_option_function<std::string>("--sample-interval", capture("sample-interval"),
                                          "inspection spacing for the sampled policy (inf = none)");
    cmd->add_option_function<std::string>("--sim-mode", capture("sim-mode"), "event|thinning");
    cmd->add_option_function<std::string>("--checkpoints", capture("checkpoints"),
                                          "comma-separated arrival indices");
    if (with_out)
        cmd->add_option_function<std::string>("--out", capture("out"), "output CSV path");
}

std::vector<admission::ConfigSection> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return admission::read_config_sections(in);
}

int do_run(const std::map<std::string, std::string>& overrides, const std::string& config_path,
           const std::string& dump_path) {
    std::map<std::string, std::string> merged;
    if (!config_path.empty()) merged = read_config_file(config_path).front().values;
    for (const auto& kv : overrides) merged[kv.first] = kv.second;
    admission::BuiltConfig built = admission::build_run_config(merged);

    if (!dump_path.empty()) {
        std::vector<admission::ArrivalRecord> records = admission::trace_trajectory(built.config);
        std::ofstream out(dump_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + dump_path + " for writing");
        admission::write_trajectory_csv(out, records);
        if (!out) throw std::runtime_error("write failed: " + dump_path);
    }

    admission::RegretTrace trace = admission::measure_regret(built.config);
    if (built.out.empty())
        std::cout << admission::emit_csv(trace);
    else
        admission::write_csv(trace, built.out);
    return 0;
}

int do_sweep(const std::map<std::string, std::string>& overrides, const std::string& config_path,
             const std::string& out_dir) {
    std::vector<admission::SweepEntry> entries =
        admission::sweep_entries_from_sections(read_config_file(config_path), overrides);
    std::vector<admission::SweepResult> results = admission::sweep(entries);

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::string manifest = "name,file,axis_hint,error\n";
    bool failed = false;
    for (const admission::SweepResult& result : results) {
        std::string file;
        if (result.error.empty()) {
            file = file_safe(result.name) + ".csv";
            admission::write_csv(result.trace, (fs::path(out_dir) / file).string());
        } else {
            failed = true;
        }
        manifest += csv_field(result.name) + "," + csv_field(file) + "," +
                    csv_field(result.axis_hint) + "," + csv_field(result.error) + "\n";
    }
    fs::path manifest_path = fs::path(out_dir) / "manifest.csv";
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + manifest_path.string() + " for writing");
    out << manifest;
    if (!out) throw std::runtime_error("write failed: " + manifest_path.string());
    if (failed) {
        for (const admission::SweepResult& result : results)
            if (!result.error.empty())
                std::cerr << "sweep entry '" << result.name << "' failed: " << result.error << "\n";
        return 2;
    }
    return 0;
}

int do_oracle(double lambda, double mu, int servers, double reward, double cost) {
    admission::ModelParams params = admission::validate_params(lambda, mu, servers, reward, cost);
    double theta = params.break_even_rate();
    std::cout << "break_even_rate=" << format_value(theta) << "\n";
    std::cout << "action=" << (mu > theta ? "admit" : "block") << "\n";
    std::cout << "single_server_drift="
              << format_value(admission::single_server_drift(lambda, mu, theta)) << "\n";
    std::cout << "score_drift_limit="
              << format_value(admission::score_drift_limit(lambda, mu, theta)) << "\n";
    std::cout << "erlang_b=" << format_value(admission::erlang_b(params.offered_load(), servers))
              << "\n";
    return 0;
}

int do_estimate(const std::string& input_path) {
    std::ifstream in(input_path);
    if (!in) throw std::invalid_argument("cannot open trajectory file: " + input_path);
    std::vector<admission::ArrivalRecord> records = admission::read_trajectory_csv(in);

    // The dump format opens with a zero row for arrival 0 (nothing was
    // observed before it); zero-length intervals carry no information.
    std::vector<admission::ArrivalRecord> usable;
    for (const admission::ArrivalRecord& record : records)
        if (record.inter_arrival > 0) usable.push_back(record);
    if (usable.empty()) throw std::runtime_error("no usable records in " + input_path);

    admission::ServiceRateEstimate service = admission::solve_service_rate(usable);
    const char* kind = service.kind == admission::RateEstimateKind::zero       ? "zero"
                       : service.kind == admission::RateEstimateKind::infinite ? "infinite"
                                                                               : "finite";
    std::cout << "records=" << usable.size() << "\n";
    std::cout << "arrival_rate=" << format_value(admission::arrival_rate_estimate(usable)) << "\n";
    std::cout << "service_rate_kind=" << kind << "\n";
    std::cout << "service_rate=" << format_value(service.value) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"admitctl: loss-system admission-control experiments"};
    app.require_subcommand(1);

    std::map<std::string, std::string> run_overrides;
    std::string run_config_path;
    std::string run_dump_path;
    CLI::App* run_cmd = app.add_subcommand("run", "measure regret for one configuration");
    register_config_flags(run_cmd, &run_overrides, /*with_out=*/true);
    run_cmd->add_option("--config", run_config_path,
                        "config file; its global section seeds the flags");
    run_cmd->add_option("--dump-trajectory", run_dump_path,
                        "also write one solo trajectory to this path");

    std::map<std::string, std::string> sweep_overrides;
    std::string sweep_config_path;
    std::string sweep_out_dir;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run every section of a config file");
    register_config_flags(sweep_cmd, &sweep_overrides, /*with_out=*/false);
    sweep_cmd->add_option("--config", sweep_config_path, "config file with one section per curve")
        ->required();
    sweep_cmd->add_option("--out", sweep_out_dir, "output directory")->required();

    double oracle_lambda = 0;
    double oracle_mu = 0;
    int oracle_servers = 1;
    double oracle_reward = 1;
    double oracle_cost = 1;
    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "print closed-form reference values as key=value lines");
    oracle_cmd->add_option("--lambda", oracle_lambda, "arrival rate")->required();
    oracle_cmd->add_option("--mu", oracle_mu, "service rate")->required();
    oracle_cmd->add_option("--servers", oracle_servers, "number of servers");
    oracle_cmd->add_option("--reward", oracle_reward, "admission reward");
    oracle_cmd->add_option("--cost", oracle_cost, "cost per unit of service time");

    std::string estimate_input;
    CLI::App* estimate_cmd =
        app.add_subcommand("estimate", "estimate rates from a trajectory dump");
    estimate_cmd->add_option("input", estimate_input, "trajectory CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed()) return do_run(run_overrides, run_config_path, run_dump_path);
        if (sweep_cmd->parsed()) return do_sweep(sweep_overrides, sweep_config_path, sweep_out_dir);
        if (oracle_cmd->parsed())
            return do_oracle(oracle_lambda, oracle_mu, oracle_servers, oracle_reward, oracle_cost);
        if (estimate_cmd->parsed()) return do_estimate(estimate_input);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
