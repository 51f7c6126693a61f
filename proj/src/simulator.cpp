#include "admission/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace admission {

LossSystem::LossSystem(const ModelParams& params, SimMode mode, const RandomStreams& streams)
    : params_(params),
      mode_(mode),
      streams_(&streams),
      departure_engine_(streams.engine(Stream::service)) {
    if (mode_ == SimMode::event) jobs_.reserve(static_cast<size_t>(params_.servers()));
}

int thinning_departures(std::mt19937_64& engine, int busy, double mu, double dt) {
    if (busy == 0 || dt <= 0.0) return 0;
    double p = -std::expm1(-mu * dt);
    if (busy <= 32) {
        int count = 0;
        for (int i = 0; i < busy; ++i) {
            if (bits_to_unit(engine()) < p) ++count;
        }
        return count;
    }
    std::binomial_distribution<int> dist(busy, p);
    return dist(engine);
}

int LossSystem::advance(double dt) {
    if (dt < 0.0) throw std::invalid_argument("cannot advance by negative time");
    now_ += dt;
    if (mode_ == SimMode::thinning) {
        int gone = thinning_departures(departure_engine_, busy_count_, params_.mu(), dt);
        busy_count_ -= gone;
        return gone;
    }
    size_t done = 0;
    while (done < jobs_.size() && jobs_[done].completion <= now_) ++done;
    jobs_.erase(jobs_.begin(), jobs_.begin() + static_cast<long>(done));
    return static_cast<int>(done);
}

int LossSystem::busy() const {
    return mode_ == SimMode::event ? static_cast<int>(jobs_.size()) : busy_count_;
}

void LossSystem::admit(int64_t arrival_index) {
    if (busy() >= params_.servers()) throw std::logic_error("admit with all servers busy");
    if (mode_ == SimMode::thinning) {
        ++busy_count_;
        return;
    }
    admit_linked(now_ + streams_->service_time(arrival_index, params_.mu()), arrival_index);
}

void LossSystem::admit_linked(double completion, int64_t id) {
    if (busy() >= params_.servers()) throw std::logic_error("admit with all servers busy");
    if (mode_ != SimMode::event) throw std::logic_error("linked admission needs event mode");
    auto pos = std::upper_bound(jobs_.begin(), jobs_.end(), completion,
                                [](double c, const BusyJob& j) { return c < j.completion; });
    jobs_.insert(pos, BusyJob{completion, id});
}

const std::vector<BusyJob>& LossSystem::jobs() const {
    if (mode_ != SimMode::event) throw std::logic_error("job list only exists in event mode");
    return jobs_;
}

CoupledSystems::CoupledSystems(const ModelParams& params, uint64_t seed, bool link_on_full)
    : params_(params),
      streams_(seed),
      link_on_full_(link_on_full),
      first_(params, SimMode::event, streams_),
      second_(params, SimMode::event, streams_),
      arrival_engine_(streams_.engine(Stream::arrivals)),
      applied_(false) {}

CoupledSystems::Observation CoupledSystems::advance() {
    if (!applied_) throw std::logic_error("previous arrival's decisions not applied yet");
    std::exponential_distribution<double> exp_dist(params_.lambda());
    double gap = exp_dist(arrival_engine_);
    ++index_;
    Observation obs;
    int gone_first = first_.advance(gap);
    obs.first = ArrivalRecord{index_, gap, first_.busy(), prev_first_action_, gone_first};
    int gone_second = second_.advance(gap);
    obs.second = ArrivalRecord{index_, gap, second_.busy(), prev_second_action_, gone_second};
    applied_ = false;
    return obs;
}

void CoupledSystems::apply(int first_action, int second_action) {
    if (applied_) throw std::logic_error("decisions for this arrival already applied");
    first_duration_ = std::numeric_limits<double>::quiet_NaN();
    if (first_action == 1) {
        bool linked = link_on_full_ && second_action == 0 &&
                      second_.busy() == params_.servers();
        if (linked) {
            admit_side(first_, second_);
        } else {
            first_duration_ = streams_.service_time(index_, params_.mu());
            first_.admit(index_);
        }
    }
    if (second_action == 1) {
        if (link_on_full_ && first_action == 0 && first_.busy() == params_.servers()) {
            admit_side(second_, first_);
        } else {
            second_.admit(index_);
        }
    }
    prev_first_action_ = first_action;
    prev_second_action_ = second_action;
    applied_ = true;
}

// Link self's new job to the lowest-id busy server of `other` that none of
// self's jobs is already tied to.  Selection looks only at identities (known
// from the past), never at remaining times, so the linked remaining time
// keeps the memoryless service law.
void CoupledSystems::admit_side(LossSystem& self, LossSystem& other) {
    const BusyJob* donor = nullptr;
    for (const BusyJob& candidate : other.jobs()) {
        bool claimed = false;
        for (const BusyJob& mine : self.jobs()) {
            if (mine.id == candidate.id) {
                claimed = true;
                break;
            }
        }
        if (!claimed && (donor == nullptr || candidate.id < donor->id)) donor = &candidate;
    }
    if (donor == nullptr) {
        // Partner holds no job this side is not already tied to; fall back to
        // the keyed draw.  Unreachable when the partner admits-if-room.
        self.admit(index_);
        return;
    }
    self.admit_linked(donor->completion, donor->id);
}

namespace {

// Shared core of the sampling variants: walk `system` across one inter-arrival
// gap, inspecting every `interval` units.  Sub-interval boundaries only
// partition the advance, so the end state matches a single advance(gap).
SampleBatch sample_over_gap(LossSystem& system, double gap, double interval,
                            int64_t arrival_index, int prev_action) {
    if (system.mode() != SimMode::event)
        throw std::logic_error("periodic sampling requires event mode");
    if (!(interval > 0.0)) throw std::invalid_argument("sampling interval must be > 0");
    SampleBatch batch;
    int64_t sub = 1;
    while (static_cast<double>(sub) * interval < gap) {
        int gone = system.advance(interval);
        int action_before = (sub == 1) ? prev_action : 0;
        batch.intermediate.push_back(
            ArrivalRecord{arrival_index, interval, system.busy(), action_before, gone});
        ++sub;
    }
    // sub == 1 must not touch the interval: 0 * inf is NaN for unbounded ones
    double last = sub == 1 ? gap : gap - static_cast<double>(sub - 1) * interval;
    int gone = system.advance(last);
    int action_before = (sub == 1) ? prev_action : 0;
    batch.arrival = ArrivalRecord{arrival_index, last, system.busy(), action_before, gone};
    return batch;
}

}  // namespace

SampleBatch advance_with_sampling(LossSystem& system, std::mt19937_64& arrival_engine,
                                  double interval, int64_t arrival_index, int prev_action) {
    std::exponential_distribution<double> exp_dist(system.params().lambda());
    double gap = exp_dist(arrival_engine);
    return sample_over_gap(system, gap, interval, arrival_index, prev_action);
}

CoupledSystems::SampledObservation CoupledSystems::advance_sampled(double interval) {
    if (!applied_) throw std::logic_error("previous arrival's decisions not applied yet");
    std::exponential_distribution<double> exp_dist(params_.lambda());
    double gap = exp_dist(arrival_engine_);
    ++index_;
    SampledObservation obs;
    obs.first = sample_over_gap(first_, gap, interval, index_, prev_first_action_);
    int gone_second = second_.advance(gap);
    obs.second = ArrivalRecord{index_, gap, second_.busy(), prev_second_action_, gone_second};
    applied_ = false;
    return obs;
}

void write_trajectory_csv(std::ostream& out, const std::vector<ArrivalRecord>& records) {
    out << "index,T,N,A_prev,M\n";
    char buffer[64];
    for (const ArrivalRecord& r : records) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", r.inter_arrival);
        out << r.index << ',' << buffer << ',' << r.busy << ',' << r.prev_action << ','
            << r.departures << '\n';
    }
}

std::vector<ArrivalRecord> read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trajectory file is empty");
    if (line == "index,T,N,A_prev,M\r") line.pop_back();
    if (line != "index,T,N,A_prev,M")
        throw std::runtime_error("trajectory header mismatch: got '" + line + "'");
    std::vector<ArrivalRecord> records;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ArrivalRecord r;
        char trailing = 0;
        int fields = std::sscanf(line.c_str(), "%ld,%lg,%d,%d,%d%c", &r.index, &r.inter_arrival,
                                 &r.busy, &r.prev_action, &r.departures, &trailing);
        if (fields < 5 || (fields == 6 && trailing != '\r'))
            throw std::runtime_error("malformed trajectory line " + std::to_string(line_no) +
                                     ": '" + line + "'");
        records.push_back(r);
    }
    return records;
}

bool trajectory_consistent(const std::vector<ArrivalRecord>& records, int servers,
                           int initial_busy) {
    int prev_busy = initial_busy;
    for (const ArrivalRecord& r : records) {
        if (r.busy < 0 || r.busy > servers) return false;
        if (r.departures != prev_busy + r.prev_action - r.busy) return false;
        if (r.prev_action != 0 && r.prev_action != 1) return false;
        prev_busy = r.busy;
    }
    return true;
}

}  // namespace admission
