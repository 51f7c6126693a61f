#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "admission/params.hpp"
#include "admission/rng.hpp"
#include "admission/simulator.hpp"

using admission::ArrivalRecord;
using admission::CoupledSystems;
using admission::LossSystem;
using admission::ModelParams;
using admission::RandomStreams;
using admission::SampleBatch;
using admission::SimMode;
using admission::Stream;

TEST_CASE("keyed service draws are reproducible and index-dependent") {
    RandomStreams a(42);
    RandomStreams b(42);
    RandomStreams c(43);
    CHECK(a.service_time(7, 2.0) == b.service_time(7, 2.0));
    CHECK(a.service_time(7, 2.0) != a.service_time(8, 2.0));
    CHECK(a.service_time(7, 2.0) != c.service_time(7, 2.0));
    CHECK(a.service_time(7, 2.0) > 0.0);
    // rate scaling is exact: the draw is an Exp(1) variate divided by mu
    CHECK(a.service_time(7, 2.0) == doctest::Approx(a.service_time(7, 1.0) / 2.0).epsilon(1e-15));
}

TEST_CASE("thinning departures cover the degenerate cases") {
    std::mt19937_64 engine(1);
    CHECK(admission::thinning_departures(engine, 0, 2.0, 1.0) == 0);
    CHECK(admission::thinning_departures(engine, 5, 2.0, 0.0) == 0);
    // enormous interval: every busy server finishes
    CHECK(admission::thinning_departures(engine, 5, 2.0, 1e9) == 5);
}

TEST_CASE("thinning departures have the per-server completion probability") {
    double mu = 0.7;
    double dt = 0.3;
    double p = -std::expm1(-mu * dt);
    for (int busy : {10, 100}) {  // exercises both the Bernoulli and binomial branches
        std::mt19937_64 engine(busy);
        int64_t draws = 20000;
        double sum = 0.0;
        for (int64_t i = 0; i < draws; ++i) {
            int gone = admission::thinning_departures(engine, busy, mu, dt);
            CHECK(gone >= 0);
            CHECK(gone <= busy);
            sum += gone;
        }
        double mean = sum / static_cast<double>(draws);
        double expected = busy * p;
        double standard_error = std::sqrt(busy * p * (1.0 - p) / static_cast<double>(draws));
        CHECK(std::fabs(mean - expected) < 3.0 * standard_error);
    }
}

TEST_CASE("event mode tracks completions explicitly") {
    ModelParams params(1.0, 2.0, 2, 1.0, 1.0);
    RandomStreams streams(7);
    LossSystem system(params, SimMode::event, streams);
    CHECK(system.busy() == 0);
    CHECK(system.now() == 0.0);

    system.admit(0);
    system.admit(1);
    CHECK(system.busy() == 2);
    CHECK_THROWS_AS(system.admit(2), std::logic_error);

    double d0 = streams.service_time(0, params.mu());
    double d1 = streams.service_time(1, params.mu());
    double first = std::min(d0, d1);
    double second = std::max(d0, d1);

    CHECK(system.advance(first * 0.5) == 0);
    CHECK(system.busy() == 2);
    CHECK(system.advance(first) == 1);  // now past the earlier completion only
    CHECK(system.busy() == 1);
    CHECK(system.advance(second) == 1);
    CHECK(system.busy() == 0);
    CHECK_THROWS_AS(system.advance(-0.1), std::invalid_argument);
}

TEST_CASE("event job list stays sorted by completion") {
    ModelParams params(1.0, 0.05, 6, 1.0, 1.0);
    RandomStreams streams(11);
    LossSystem system(params, SimMode::event, streams);
    for (int64_t i = 0; i < 6; ++i) system.admit(i);
    const std::vector<admission::BusyJob>& jobs = system.jobs();
    REQUIRE(jobs.size() == 6);
    for (size_t i = 1; i < jobs.size(); ++i) CHECK(jobs[i - 1].completion <= jobs[i].completion);
}

TEST_CASE("thinning mode respects capacity and conservation") {
    ModelParams params(2.0, 1.0, 3, 1.0, 1.0);
    RandomStreams streams(5);
    LossSystem system(params, SimMode::thinning, streams);
    std::mt19937_64 arrivals(99);
    std::exponential_distribution<double> gap(params.lambda());
    CHECK_THROWS_AS(system.jobs(), std::logic_error);
    for (int i = 0; i < 2000; ++i) {
        int before = system.busy();
        int gone = system.advance(gap(arrivals));
        CHECK(system.busy() == before - gone);
        CHECK(system.busy() >= 0);
        if (system.busy() < params.servers()) system.admit(i);
        CHECK(system.busy() <= params.servers());
    }
}

TEST_CASE("sampling sub-intervals partition the advance") {
    // Walking a gap in inspection steps must land in exactly the state a
    // single advance reaches, and the sub-interval departures must sum to it.
    ModelParams params(1.5, 0.8, 4, 1.0, 1.0);
    RandomStreams streams(1234);
    LossSystem plain(params, SimMode::event, streams);
    LossSystem sampled(params, SimMode::event, streams);
    std::mt19937_64 engine_plain = streams.engine(Stream::arrivals);
    std::mt19937_64 engine_sampled = streams.engine(Stream::arrivals);

    int prev_action = 0;
    for (int64_t i = 1; i <= 500; ++i) {
        std::exponential_distribution<double> gap_dist(params.lambda());
        double gap = gap_dist(engine_plain);
        int gone_plain = plain.advance(gap);

        SampleBatch batch =
            admission::advance_with_sampling(sampled, engine_sampled, 0.37, i, prev_action);
        int gone_sampled = batch.arrival.departures;
        double covered = batch.arrival.inter_arrival;
        for (const ArrivalRecord& r : batch.intermediate) {
            gone_sampled += r.departures;
            covered += r.inter_arrival;
            CHECK(r.index == i);
        }
        CHECK(covered == doctest::Approx(gap).epsilon(1e-12));
        CHECK(gone_sampled == gone_plain);
        CHECK(batch.arrival.busy == plain.busy());
        REQUIRE(sampled.jobs().size() == plain.jobs().size());
        for (size_t j = 0; j < plain.jobs().size(); ++j)
            CHECK(sampled.jobs()[j].id == plain.jobs()[j].id);

        // only the first sub-interval reports the previous arrival's action
        if (!batch.intermediate.empty()) {
            CHECK(batch.intermediate.front().prev_action == prev_action);
            for (size_t j = 1; j < batch.intermediate.size(); ++j)
                CHECK(batch.intermediate[j].prev_action == 0);
            CHECK(batch.arrival.prev_action == 0);
        } else {
            CHECK(batch.arrival.prev_action == prev_action);
        }

        prev_action = 0;
        if (plain.busy() < params.servers()) {
            plain.admit(i);
            sampled.admit(i);
            prev_action = 1;
        }
    }
}

TEST_CASE("an infinite inspection interval reduces to a plain arrival step") {
    ModelParams params(2.0, 1.0, 3, 1.0, 1.0);
    RandomStreams streams(77);
    LossSystem system(params, SimMode::event, streams);
    std::mt19937_64 engine = streams.engine(Stream::arrivals);
    double inf = std::numeric_limits<double>::infinity();
    std::mt19937_64 reference = streams.engine(Stream::arrivals);
    std::exponential_distribution<double> exp_dist(params.lambda());
    for (int64_t i = 1; i <= 50; ++i) {
        SampleBatch batch = admission::advance_with_sampling(system, engine, inf, i, 0);
        CHECK(batch.intermediate.empty());
        CHECK(batch.arrival.index == i);
        CHECK(batch.arrival.inter_arrival == exp_dist(reference));  // the whole gap
    }
}

TEST_CASE("inspection counts per gap match the geometric expectation") {
    // With arrival rate lambda and inspection spacing d, the number of
    // inspections before the arrival is geometric with mean 1/(e^{lambda d}-1).
    double lambda = 2.0;
    double d = 0.1;
    ModelParams params(lambda, 1.0, 1, 1.0, 1.0);
    RandomStreams streams(3);
    LossSystem system(params, SimMode::event, streams);
    std::mt19937_64 engine = streams.engine(Stream::arrivals);
    int64_t arrivals = 20000;
    double total = 0.0;
    for (int64_t i = 1; i <= arrivals; ++i) {
        SampleBatch batch = admission::advance_with_sampling(system, engine, d, i, 0);
        total += static_cast<double>(batch.intermediate.size());
    }
    double mean = total / static_cast<double>(arrivals);
    double expected = 4.516655566126993;  // 1/(e^0.2 - 1)
    double q = std::exp(-lambda * d);
    double variance = q / ((1.0 - q) * (1.0 - q));
    double standard_error = std::sqrt(variance / static_cast<double>(arrivals));
    CHECK(std::fabs(mean - expected) < 3.0 * standard_error);
}

TEST_CASE("sampling rejects bad intervals and thinning mode") {
    ModelParams params(2.0, 1.0, 3, 1.0, 1.0);
    RandomStreams streams(8);
    LossSystem thinned(params, SimMode::thinning, streams);
    std::mt19937_64 engine = streams.engine(Stream::arrivals);
    CHECK_THROWS_AS(admission::advance_with_sampling(thinned, engine, 0.5, 1, 0),
                    std::logic_error);
    LossSystem evented(params, SimMode::event, streams);
    CHECK_THROWS_AS(admission::advance_with_sampling(evented, engine, 0.0, 1, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(admission::advance_with_sampling(evented, engine, -1.0, 1, 0),
                    std::invalid_argument);
}

TEST_CASE("coupled systems with identical decisions stay identical") {
    ModelParams params(3.0, 1.2, 3, 1.0, 1.0);
    CoupledSystems pair(params, 555);
    pair.apply(1, 1);
    for (int64_t i = 1; i <= 500; ++i) {
        CoupledSystems::Observation obs = pair.advance();
        CHECK(obs.first.busy == obs.second.busy);
        CHECK(obs.first.departures == obs.second.departures);
        CHECK(obs.first.inter_arrival == obs.second.inter_arrival);
        int action = obs.first.busy < params.servers() ? 1 : 0;
        pair.apply(action, action);
    }
}

TEST_CASE("the first coupled side replays a solo system exactly") {
    // Shared arrival stream plus arrival-keyed service draws mean the
    // candidate side of a coupled run is byte-for-byte the solo run.
    ModelParams params(3.0, 1.2, 3, 1.0, 1.0);
    uint64_t seed = 4242;

    CoupledSystems pair(params, seed);
    RandomStreams streams(seed);
    LossSystem solo(params, SimMode::event, streams);
    std::mt19937_64 engine = streams.engine(Stream::arrivals);
    std::exponential_distribution<double> gap_dist(params.lambda());

    pair.apply(1, 1);
    solo.admit(0);
    for (int64_t i = 1; i <= 400; ++i) {
        CoupledSystems::Observation obs = pair.advance();
        double gap = gap_dist(engine);
        int gone = solo.advance(gap);
        CHECK(obs.first.inter_arrival == gap);
        CHECK(obs.first.busy == solo.busy());
        CHECK(obs.first.departures == gone);
        int action = solo.busy() < params.servers() ? 1 : 0;
        pair.apply(action, action);
        if (action == 1) solo.admit(i);
    }
}

TEST_CASE("coupling keeps an admit-everything partner pointwise dominant") {
    ModelParams params(3.0, 1.0, 3, 1.0, 1.0);
    CoupledSystems pair(params, 99);
    std::mt19937_64 coin(7);
    pair.apply(0, 1);
    for (int64_t i = 1; i <= 3000; ++i) {
        CoupledSystems::Observation obs = pair.advance();
        CHECK(obs.first.busy <= obs.second.busy);
        int first_action = (obs.first.busy < params.servers() && (coin() & 1)) ? 1 : 0;
        int second_action = obs.second.busy < params.servers() ? 1 : 0;
        pair.apply(first_action, second_action);
    }
}

TEST_CASE("admission against a full partner links to one of its jobs") {
    // Single server, slow service: the partner admits arrival 0 and is still
    // busy at arrival 1, where only this side admits -> the job must be tied
    // to the partner's server, with the duration not separately known.
    ModelParams params(50.0, 0.01, 1, 1.0, 1.0);
    CoupledSystems pair(params, 12);
    pair.apply(0, 1);
    CoupledSystems::Observation obs = pair.advance();
    REQUIRE(obs.second.busy == 1);
    REQUIRE(obs.first.busy == 0);
    pair.apply(1, 0);
    CHECK(std::isnan(pair.first_service_duration()));
    REQUIRE(pair.first().jobs().size() == 1);
    CHECK(pair.first().jobs()[0].id == pair.second().jobs()[0].id);
    CHECK(pair.first().jobs()[0].completion == pair.second().jobs()[0].completion);
}

TEST_CASE("unlinked admissions expose the keyed service duration") {
    ModelParams params(2.0, 1.5, 2, 1.0, 1.0);
    uint64_t seed = 31;
    CoupledSystems pair(params, seed);
    RandomStreams streams(seed);
    pair.apply(1, 1);
    CHECK(pair.first_service_duration() == streams.service_time(0, params.mu()));
    CoupledSystems::Observation obs = pair.advance();
    (void)obs;
    pair.apply(0, 0);
    CHECK(std::isnan(pair.first_service_duration()));
}

TEST_CASE("the coupled handshake rejects out-of-order calls") {
    ModelParams params(2.0, 1.5, 2, 1.0, 1.0);
    CoupledSystems pair(params, 1);
    CHECK_THROWS_AS(pair.advance(), std::logic_error);  // arrival 0 not applied yet
    pair.apply(0, 0);
    CHECK_THROWS_AS(pair.apply(0, 0), std::logic_error);
    CoupledSystems::Observation obs = pair.advance();
    (void)obs;
    CHECK_THROWS_AS(pair.advance(), std::logic_error);
}

TEST_CASE("trajectory CSV round-trips exactly") {
    std::vector<ArrivalRecord> records = {
        {0, 0.0, 0, 0, 0},
        {1, 0.12345678901234567, 1, 1, 0},
        {2, 3.0e-17, 0, 1, 2},
        {3, 7.5, 2, 0, 0},
    };
    std::ostringstream out;
    admission::write_trajectory_csv(out, records);
    std::istringstream in(out.str());
    std::vector<ArrivalRecord> parsed = admission::read_trajectory_csv(in);
    REQUIRE(parsed.size() == records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        CHECK(parsed[i].index == records[i].index);
        CHECK(parsed[i].inter_arrival == records[i].inter_arrival);
        CHECK(parsed[i].busy == records[i].busy);
        CHECK(parsed[i].prev_action == records[i].prev_action);
        CHECK(parsed[i].departures == records[i].departures);
    }
}

TEST_CASE("trajectory reader tolerates CRLF and reports malformed lines") {
    std::string body = "index,T,N,A_prev,M\r\n1,0.5,1,1,0\r\n";
    std::istringstream crlf(body);
    CHECK(admission::read_trajectory_csv(crlf).size() == 1);

    std::istringstream empty("");
    CHECK_THROWS_AS(admission::read_trajectory_csv(empty), std::runtime_error);
    std::istringstream bad_header("a,b,c\n");
    CHECK_THROWS_AS(admission::read_trajectory_csv(bad_header), std::runtime_error);
    std::istringstream truncated("index,T,N,A_prev,M\n1,0.5,1\n");
    try {
        admission::read_trajectory_csv(truncated);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::istringstream trailing("index,T,N,A_prev,M\n1,0.5,1,1,0junk\n");
    CHECK_THROWS_AS(admission::read_trajectory_csv(trailing), std::runtime_error);
}

TEST_CASE("conservation check accepts real trajectories and rejects corrupted ones") {
    std::vector<ArrivalRecord> records = {
        {0, 0.0, 0, 0, 0},
        {1, 0.5, 1, 1, 0},   // admitted at 0, still in service
        {2, 0.2, 1, 1, 1},   // admitted at 1, one departure
        {3, 0.9, 0, 0, 1},   // blocked at 2, last job drained
    };
    CHECK(admission::trajectory_consistent(records, 2));
    records[2].departures = 0;
    CHECK_FALSE(admission::trajectory_consistent(records, 2));
    records[2].departures = 1;
    records[1].busy = 5;  // above capacity
    CHECK_FALSE(admission::trajectory_consistent(records, 2));
    records[1].busy = 1;
    records[1].prev_action = 2;  // not a 0/1 action
    CHECK_FALSE(admission::trajectory_consistent(records, 2));
}
