#include "admission/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace admission {

namespace {

std::string trim(const std::string& text) {
    size_t begin = 0;
    size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse '" + text + "' as a number for " + key);
    }
}

int64_t parse_int(const std::string& key, const std::string& text) {
    try {
        size_t used = 0;
        int64_t value = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse '" + text + "' as an integer for " + key);
    }
}

uint64_t parse_uint(const std::string& key, const std::string& text) {
    try {
        size_t used = 0;
        uint64_t value = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse '" + text + "' as a seed for " + key);
    }
}

std::vector<int64_t> parse_checkpoints(const std::string& text) {
    std::vector<int64_t> values;
    std::stringstream stream(text);
    std::string piece;
    while (std::getline(stream, piece, ',')) {
        piece = trim(piece);
        if (piece.empty()) continue;
        values.push_back(parse_int("checkpoints", piece));
    }
    return values;
}

}  // namespace

std::vector<ConfigSection> read_config_sections(std::istream& in) {
    std::vector<ConfigSection> sections;
    sections.push_back(ConfigSection{});  // global
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": unterminated section header");
            std::string name = trim(text.substr(1, text.size() - 2));
            if (name.empty())
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": empty section name");
            sections.push_back(ConfigSection{name, {}});
            continue;
        }
        size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected key = value");
        std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key");
        ConfigSection& section = sections.back();
        if (section.values.count(key))
            throw std::invalid_argument("line " + std::to_string(line_no) + ": duplicate key '" +
                                        key + "'");
        section.values[key] = value;
    }
    return sections;
}

PolicyKind parse_policy_kind(const std::string& text) {
    if (text == "alg1") return PolicyKind::alg1;
    if (text == "alg2") return PolicyKind::alg2;
    if (text == "sampled") return PolicyKind::sampled;
    if (text == "thompson") return PolicyKind::thompson;
    if (text == "rlearning") return PolicyKind::rlearning;
    if (text == "oracle") return PolicyKind::oracle;
    if (text == "always-admit") return PolicyKind::always_admit;
    if (text == "never-admit") return PolicyKind::never_admit;
    throw std::invalid_argument("unknown policy '" + text + "'");
}

ScheduleKind parse_schedule_kind(const std::string& text) {
    if (text == "poly-power") return ScheduleKind::poly_power;
    if (text == "exp-power") return ScheduleKind::exp_power;
    if (text == "exp-linear") return ScheduleKind::exp_linear;
    if (text == "exp-power-decaying") return ScheduleKind::exp_power_decaying;
    throw std::invalid_argument("unknown schedule '" + text + "'");
}

SimMode parse_sim_mode(const std::string& text) {
    if (text == "event") return SimMode::event;
    if (text == "thinning") return SimMode::thinning;
    throw std::invalid_argument("unknown sim-mode '" + text + "'");
}

BuiltConfig build_run_config(const std::map<std::string, std::string>& values) {
    auto get = [&values](const char* key) -> const std::string* {
        auto found = values.find(key);
        return found == values.end() ? nullptr : &found->second;
    };
    static const char* known[] = {
        "lambda",       "mu",       "servers",    "reward",          "cost",
        "horizon",      "runs",     "replications", "seed",          "base_seed",
        "policy",       "schedule", "epsilon",    "epsilon-bar",     "poly-power",
        "sample-interval", "sim-mode", "checkpoints", "out",
    };
    for (const auto& entry : values) {
        bool ok = std::any_of(std::begin(known), std::end(known),
                              [&entry](const char* k) { return entry.first == k; });
        if (!ok) throw std::invalid_argument("unknown config key '" + entry.first + "'");
    }
    const std::string* lambda_text = get("lambda");
    const std::string* mu_text = get("mu");
    if (!lambda_text) throw std::invalid_argument("missing required key 'lambda'");
    if (!mu_text) throw std::invalid_argument("missing required key 'mu'");

    double lambda = parse_double("lambda", *lambda_text);
    double mu = parse_double("mu", *mu_text);
    int servers = 1;
    if (const std::string* v = get("servers"))
        servers = static_cast<int>(parse_int("servers", *v));
    double reward = 1.0;
    if (const std::string* v = get("reward")) reward = parse_double("reward", *v);
    double cost = 1.0;
    if (const std::string* v = get("cost")) cost = parse_double("cost", *v);

    BuiltConfig built{RunConfig(validate_params(lambda, mu, servers, reward, cost)), ""};
    RunConfig& cfg = built.config;

    if (const std::string* v = get("horizon")) cfg.horizon = parse_int("horizon", *v);
    if (const std::string* v = get("runs"))
        cfg.replications = static_cast<int>(parse_int("runs", *v));
    if (const std::string* v = get("replications"))
        cfg.replications = static_cast<int>(parse_int("replications", *v));
    if (const std::string* v = get("seed")) cfg.base_seed = parse_uint("seed", *v);
    if (const std::string* v = get("base_seed")) cfg.base_seed = parse_uint("base_seed", *v);
    if (const std::string* v = get("policy")) cfg.policy = parse_policy_kind(*v);
    if (const std::string* v = get("schedule")) cfg.schedule.kind = parse_schedule_kind(*v);
    if (const std::string* v = get("epsilon"))
        cfg.schedule.epsilon = parse_double("epsilon", *v);
    if (const std::string* v = get("epsilon-bar"))
        cfg.schedule.epsilon_bar = parse_double("epsilon-bar", *v);
    if (const std::string* v = get("poly-power"))
        cfg.schedule.power = parse_double("poly-power", *v);
    if (const std::string* v = get("sample-interval")) {
        cfg.sample_interval = (*v == "inf" || *v == "+inf")
                                  ? std::numeric_limits<double>::infinity()
                                  : parse_double("sample-interval", *v);
    }
    if (const std::string* v = get("sim-mode")) cfg.sim_mode = parse_sim_mode(*v);
    if (const std::string* v = get("checkpoints")) cfg.checkpoints = parse_checkpoints(*v);
    if (const std::string* v = get("out")) built.out = *v;

    cfg.validate();
    return built;
}

std::vector<SweepEntry> sweep_entries_from_sections(
    const std::vector<ConfigSection>& sections,
    const std::map<std::string, std::string>& overrides) {
    if (sections.empty()) throw std::invalid_argument("config document has no sections");
    const std::map<std::string, std::string>& globals = sections.front().values;
    auto overlay = [&overrides, &globals](const std::map<std::string, std::string>& own) {
        std::map<std::string, std::string> merged = globals;
        for (const auto& kv : own) merged[kv.first] = kv.second;
        for (const auto& kv : overrides) merged[kv.first] = kv.second;
        return merged;
    };
    std::vector<SweepEntry> entries;
    for (size_t i = 1; i < sections.size(); ++i) {
        BuiltConfig built = build_run_config(overlay(sections[i].values));
        built.config.config_index = static_cast<int64_t>(entries.size());
        entries.push_back(SweepEntry{sections[i].name, built.config});
    }
    if (entries.empty()) {
        BuiltConfig built = build_run_config(overlay({}));
        entries.push_back(SweepEntry{"run", built.config});
    }
    return entries;
}

}  // namespace admission
