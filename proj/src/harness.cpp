#include "admission/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "admission/policy.hpp"
#include "admission/rng.hpp"

namespace admission {

void RunConfig::validate() const {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    for (size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] < 1 || checkpoints[i] > horizon)
            throw std::invalid_argument("checkpoints must lie in 1..horizon");
        if (i > 0 && checkpoints[i] < checkpoints[i - 1])
            throw std::invalid_argument("checkpoints must be sorted ascending");
    }
    if (policy == PolicyKind::alg1 || policy == PolicyKind::alg2 ||
        policy == PolicyKind::sampled) {
        schedule.validate();
    }
    if (policy == PolicyKind::sampled) {
        if (!(sample_interval > 0.0))
            throw std::invalid_argument("sampled policy needs sample-interval > 0");
        if (sim_mode != SimMode::event)
            throw std::invalid_argument("sampled policy requires event sim-mode");
    }
    if (policy == PolicyKind::rlearning && sim_mode != SimMode::event)
        throw std::invalid_argument("rlearning requires event sim-mode (it observes service times)");
}

std::vector<int64_t> default_checkpoints(int64_t horizon) {
    std::vector<int64_t> grid;
    for (int j = 0;; ++j) {
        double exponent = 2.0 + 0.25 * static_cast<double>(j);
        int64_t value = static_cast<int64_t>(std::llround(std::pow(10.0, exponent)));
        if (value >= horizon) break;
        if (grid.empty() || value != grid.back()) grid.push_back(value);
    }
    grid.push_back(horizon);
    return grid;
}

uint64_t replication_seed(uint64_t base_seed, int64_t config_index, int replication) {
    uint64_t mixed = derive_seed(static_cast<uint64_t>(config_index),
                                 static_cast<uint64_t>(replication));
    return splitmix64(base_seed ^ mixed);
}

namespace {

std::unique_ptr<Dispatcher> make_policy(const RunConfig& cfg, uint64_t rep_seed) {
    uint64_t internal = derive_seed(rep_seed, static_cast<uint64_t>(Stream::internal));
    switch (cfg.policy) {
        case PolicyKind::alg1:
            return std::make_unique<MlePolicy>(cfg.params, cfg.schedule,
                                               UpdateVariant::empty_system);
        case PolicyKind::alg2:
            return std::make_unique<MlePolicy>(cfg.params, cfg.schedule,
                                               UpdateVariant::every_arrival);
        case PolicyKind::sampled:
            return std::make_unique<MlePolicy>(cfg.params, cfg.schedule,
                                               UpdateVariant::empty_system);
        case PolicyKind::thompson:
            return std::make_unique<ThompsonPolicy>(cfg.params, internal);
        case PolicyKind::rlearning:
            return std::make_unique<RLearningPolicy>(cfg.params, cfg.rlearning, internal);
        case PolicyKind::oracle:
            return std::make_unique<StaticPolicy>(cfg.params, StaticPolicyKind::oracle);
        case PolicyKind::always_admit:
            return std::make_unique<StaticPolicy>(cfg.params, StaticPolicyKind::always_admit);
        case PolicyKind::never_admit:
            return std::make_unique<StaticPolicy>(cfg.params, StaticPolicyKind::never_admit);
    }
    throw std::invalid_argument("unknown policy kind");
}

// Signed cumulative (candidate accept - oracle accept) at each checkpoint,
// one coupled replication.
std::vector<double> run_coupled(const RunConfig& cfg, uint64_t rep_seed,
                                const std::vector<int64_t>& checkpoints) {
    RandomStreams streams(rep_seed);
    CoupledSystems pair(cfg.params, rep_seed, cfg.policy != PolicyKind::rlearning);
    std::unique_ptr<Dispatcher> candidate = make_policy(cfg, rep_seed);
    StaticPolicy reference(cfg.params, StaticPolicyKind::oracle);
    std::mt19937_64 coin_engine = streams.engine(Stream::coins);
    bool sampling = cfg.policy == PolicyKind::sampled;

    std::vector<double> at_checkpoints;
    at_checkpoints.reserve(checkpoints.size());
    int64_t diff = 0;
    size_t next_cp = 0;

    int cand_action = candidate->decide(0, coin_engine);
    int ref_action = reference.decide(0, coin_engine);
    pair.apply(cand_action, ref_action);
    if (cand_action == 1) {
        double duration = pair.first_service_duration();
        if (!std::isnan(duration)) candidate->reveal_service(duration);
    }
    diff += cand_action - ref_action;

    for (int64_t i = 1; i < cfg.horizon; ++i) {
        while (next_cp < checkpoints.size() && checkpoints[next_cp] == i) {
            at_checkpoints.push_back(static_cast<double>(diff));
            ++next_cp;
        }
        ArrivalRecord cand_record;
        ArrivalRecord ref_record;
        if (sampling) {
            CoupledSystems::SampledObservation obs = pair.advance_sampled(cfg.sample_interval);
            for (const ArrivalRecord& r : obs.first.intermediate) candidate->observe_sample(r);
            cand_record = obs.first.arrival;
            ref_record = obs.second;
        } else {
            CoupledSystems::Observation obs = pair.advance();
            cand_record = obs.first;
            ref_record = obs.second;
        }
        candidate->observe(cand_record);
        cand_action = candidate->decide(cand_record.busy, coin_engine);
        ref_action = reference.decide(ref_record.busy, coin_engine);
        pair.apply(cand_action, ref_action);
        if (cand_action == 1) {
            double duration = pair.first_service_duration();
            if (!std::isnan(duration)) candidate->reveal_service(duration);
        }
        diff += cand_action - ref_action;
    }
    while (next_cp < checkpoints.size()) {
        at_checkpoints.push_back(static_cast<double>(diff));
        ++next_cp;
    }
    return at_checkpoints;
}

// Candidate acceptance count at each checkpoint, one solo replication.
// Identical to the coupled statistic whenever the oracle admits nothing.
std::vector<double> run_count(const RunConfig& cfg, uint64_t rep_seed,
                              const std::vector<int64_t>& checkpoints) {
    RandomStreams streams(rep_seed);
    LossSystem system(cfg.params, cfg.sim_mode, streams);
    std::unique_ptr<Dispatcher> candidate = make_policy(cfg, rep_seed);
    std::mt19937_64 arrival_engine = streams.engine(Stream::arrivals);
    std::mt19937_64 coin_engine = streams.engine(Stream::coins);
    bool sampling = cfg.policy == PolicyKind::sampled;
    bool reveal = cfg.sim_mode == SimMode::event;

    std::vector<double> at_checkpoints;
    at_checkpoints.reserve(checkpoints.size());
    int64_t accepted = 0;
    size_t next_cp = 0;

    int action = candidate->decide(0, coin_engine);
    if (action == 1) {
        system.admit(0);
        if (reveal) candidate->reveal_service(streams.service_time(0, cfg.params.mu()));
    }
    accepted += action;

    std::exponential_distribution<double> exp_dist(cfg.params.lambda());
    for (int64_t i = 1; i < cfg.horizon; ++i) {
        while (next_cp < checkpoints.size() && checkpoints[next_cp] == i) {
            at_checkpoints.push_back(static_cast<double>(accepted));
            ++next_cp;
        }
        ArrivalRecord record;
        if (sampling) {
            SampleBatch batch = advance_with_sampling(system, arrival_engine,
                                                      cfg.sample_interval, i, action);
            for (const ArrivalRecord& r : batch.intermediate) candidate->observe_sample(r);
            record = batch.arrival;
        } else {
            double gap = exp_dist(arrival_engine);
            int gone = system.advance(gap);
            record = ArrivalRecord{i, gap, system.busy(), action, gone};
        }
        candidate->observe(record);
        action = candidate->decide(record.busy, coin_engine);
        if (action == 1) {
            system.admit(i);
            if (reveal) candidate->reveal_service(streams.service_time(i, cfg.params.mu()));
        }
        accepted += action;
    }
    while (next_cp < checkpoints.size()) {
        at_checkpoints.push_back(static_cast<double>(accepted));
        ++next_cp;
    }
    return at_checkpoints;
}

}  // namespace

RegretTrace measure_regret_path(const RunConfig& cfg, RegretPath path, bool keep_runs) {
    cfg.validate();
    bool oracle_admits = cfg.params.mu() > cfg.params.break_even_rate();
    bool use_coupled = path == RegretPath::automatic ? oracle_admits : path == RegretPath::coupled;
    if (use_coupled && cfg.sim_mode != SimMode::event)
        throw std::invalid_argument("coupled regret measurement requires event sim-mode");

    std::vector<int64_t> checkpoints =
        cfg.checkpoints.empty() ? default_checkpoints(cfg.horizon) : cfg.checkpoints;

    int reps = cfg.replications;
    std::vector<std::vector<double>> per_run(static_cast<size_t>(reps));
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
        for (;;) {
            int r = next.fetch_add(1);
            if (r >= reps) break;
            try {
                uint64_t rep_seed = replication_seed(cfg.base_seed, cfg.config_index, r);
                per_run[static_cast<size_t>(r)] =
                    use_coupled ? run_coupled(cfg, rep_seed, checkpoints)
                                : run_count(cfg, rep_seed, checkpoints);
            } catch (...) {
                std::lock_guard<std::mutex> hold(error_mutex);
                if (!first_error) first_error = std::current_exception();
                break;
            }
        }
    };

    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, static_cast<unsigned>(reps));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    RegretTrace trace;
    trace.checkpoints = checkpoints;
    size_t cols = checkpoints.size();
    trace.mean_regret.resize(cols);
    trace.std_regret.resize(cols);
    for (size_t j = 0; j < cols; ++j) {
        double mean = 0.0;
        for (int r = 0; r < reps; ++r) mean += per_run[static_cast<size_t>(r)][j];
        mean /= static_cast<double>(reps);
        double var = 0.0;
        for (int r = 0; r < reps; ++r) {
            double d = per_run[static_cast<size_t>(r)][j] - mean;
            var += d * d;
        }
        trace.mean_regret[j] = std::fabs(mean);
        trace.std_regret[j] = reps > 1 ? std::sqrt(var / static_cast<double>(reps - 1)) : 0.0;
    }
    if (keep_runs) trace.runs = std::move(per_run);
    return trace;
}

RegretTrace measure_regret(const RunConfig& cfg, bool keep_runs) {
    return measure_regret_path(cfg, RegretPath::automatic, keep_runs);
}

std::vector<ArrivalRecord> trace_trajectory(const RunConfig& cfg) {
    cfg.validate();
    uint64_t rep_seed = replication_seed(cfg.base_seed, cfg.config_index, 0);
    RandomStreams streams(rep_seed);
    LossSystem system(cfg.params, cfg.sim_mode, streams);
    std::unique_ptr<Dispatcher> candidate = make_policy(cfg, rep_seed);
    std::mt19937_64 arrival_engine = streams.engine(Stream::arrivals);
    std::mt19937_64 coin_engine = streams.engine(Stream::coins);
    bool sampling = cfg.policy == PolicyKind::sampled;
    bool reveal = cfg.sim_mode == SimMode::event;

    std::vector<ArrivalRecord> records;
    records.push_back(ArrivalRecord{0, 0.0, 0, 0, 0});

    int action = candidate->decide(0, coin_engine);
    if (action == 1) {
        system.admit(0);
        if (reveal) candidate->reveal_service(streams.service_time(0, cfg.params.mu()));
    }
    std::exponential_distribution<double> exp_dist(cfg.params.lambda());
    for (int64_t i = 1; i < cfg.horizon; ++i) {
        ArrivalRecord record;
        if (sampling) {
            SampleBatch batch = advance_with_sampling(system, arrival_engine,
                                                      cfg.sample_interval, i, action);
            for (const ArrivalRecord& r : batch.intermediate) {
                candidate->observe_sample(r);
                records.push_back(r);
            }
            record = batch.arrival;
        } else {
            double gap = exp_dist(arrival_engine);
            int gone = system.advance(gap);
            record = ArrivalRecord{i, gap, system.busy(), action, gone};
        }
        candidate->observe(record);
        records.push_back(record);
        action = candidate->decide(record.busy, coin_engine);
        if (action == 1) {
            system.admit(i);
            if (reveal) candidate->reveal_service(streams.service_time(i, cfg.params.mu()));
        }
    }
    return records;
}

std::vector<SweepResult> sweep(const std::vector<SweepEntry>& entries) {
    if (entries.empty()) throw std::invalid_argument("sweep needs at least one config");
    std::vector<SweepResult> results;
    results.reserve(entries.size());
    for (const SweepEntry& entry : entries) {
        SweepResult result;
        result.name = entry.name;
        result.axis_hint = axis_hint(entry.config);
        try {
            result.trace = measure_regret(entry.config);
        } catch (const std::exception& e) {
            result.error = e.what();
        }
        results.push_back(std::move(result));
    }
    return results;
}

std::string axis_hint(const RunConfig& cfg) {
    return cfg.params.mu() > cfg.params.break_even_rate() ? "log-x" : "log-log";
}

std::string emit_csv(const RegretTrace& trace) {
    std::string out = "checkpoint,mean_regret,std_regret\n";
    char buffer[96];
    for (size_t j = 0; j < trace.checkpoints.size(); ++j) {
        std::snprintf(buffer, sizeof(buffer), "%lld,%.17g,%.17g\n",
                      static_cast<long long>(trace.checkpoints[j]), trace.mean_regret[j],
                      trace.std_regret[j]);
        out += buffer;
    }
    return out;
}

void write_csv(const RegretTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << emit_csv(trace);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

RegretTrace parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("regret CSV is empty");
    if (line == "checkpoint,mean_regret,std_regret\r") line.pop_back();
    if (line != "checkpoint,mean_regret,std_regret")
        throw std::runtime_error("regret CSV header mismatch: got '" + line + "'");
    RegretTrace trace;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        long long cp = 0;
        double mean = 0;
        double sd = 0;
        if (std::sscanf(line.c_str(), "%lld,%lg,%lg", &cp, &mean, &sd) != 3)
            throw std::runtime_error("malformed regret CSV line " + std::to_string(line_no));
        trace.checkpoints.push_back(cp);
        trace.mean_regret.push_back(mean);
        trace.std_regret.push_back(sd);
    }
    return trace;
}

}  // namespace admission
