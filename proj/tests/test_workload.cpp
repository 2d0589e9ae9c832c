#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "hsched/execution.hpp"
#include "hsched/util.hpp"
#include "hsched/workload.hpp"

using namespace hsched;

namespace {

double segment_mean(const Phase& ph) {
    return std::accumulate(ph.segments.begin(), ph.segments.end(), 0.0) / kCurveSegments;
}

Phase flat_phase(double span, double h) {
    Phase ph;
    ph.span_length = span;
    ph.avg_parallelism = h;
    ph.work = h * span;
    ph.curve_params[0] = ph.curve_params[1] = h;
    ph.segments.assign(kCurveSegments, h);
    return ph;
}

}  // namespace

TEST_CASE("log-uniform mean closed form") {
    CHECK(log_uniform_mean(100.0, 10000.0) == doctest::Approx(9900.0 / std::log(100.0)));
    CHECK(log_uniform_mean(100.0, 10000.0) == doctest::Approx(2149.7455).epsilon(1e-4));
    CHECK(log_uniform_mean(5.0, 5.0) == 5.0);
}

TEST_CASE("moldable sampling stays in range with increasing releases") {
    WorkloadConfig cfg;
    cfg.job_count = 200;
    cfg.seed = 5;
    std::mt19937_64 rng(cfg.seed);
    auto specs = sample_moldable_jobs(cfg, rng);
    REQUIRE(specs.size() == 200);
    double prev = 0.0, gap_sum = 0.0;
    for (const auto& s : specs) {
        CHECK(s.release >= prev);
        gap_sum += s.release - prev;
        prev = s.release;
        CHECK(s.avg_parallelism >= 1.0);
        CHECK(s.avg_parallelism <= 256.0);
        CHECK(s.total_work >= 100.0);
        CHECK(s.total_work <= 10000.0);
    }
    double expected_gap = log_uniform_mean(100.0, 10000.0) / (1.0 * 256.0);
    CHECK(gap_sum / 200.0 == doctest::Approx(expected_gap).epsilon(0.35));
}

TEST_CASE("sampled jobs respect the span ceiling") {
    WorkloadConfig cfg;
    cfg.job_count = 500;
    cfg.seed = 11;
    std::mt19937_64 rng(cfg.seed);
    auto specs = sample_moldable_jobs(cfg, rng);
    double longest = 0.0;
    for (const auto& s : specs) {
        double span = s.total_work / s.avg_parallelism;
        CHECK(span <= cfg.max_span * (1.0 + 1e-12));
        longest = std::max(longest, span);
    }
    CHECK(longest > cfg.max_span / 4.0);  // the ceiling shapes, it does not flatten

    cfg.max_span = 20.0;  // below work_max / parallelism_max = 39.06
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("phase decomposition splits span into fixed lengths plus remainder") {
    WorkloadConfig cfg;
    std::mt19937_64 rng(1);

    MalleableJob even = synthesize_phases({0, 0.0, 600.0, 6.0}, cfg, rng);  // span 100
    CHECK(even.phases.size() == 10);
    for (const Phase& ph : even.phases) CHECK(ph.span_length == doctest::Approx(10.0));
    CHECK(even.total_span() == doctest::Approx(100.0));
    CHECK(even.total_work() == doctest::Approx(600.0));

    MalleableJob ragged = synthesize_phases({1, 0.0, 570.0, 6.0}, cfg, rng);  // span 95
    CHECK(ragged.phases.size() == 10);
    CHECK(ragged.phases.back().span_length == doctest::Approx(5.0));

    MalleableJob tiny = synthesize_phases({2, 0.0, 30.0, 6.0}, cfg, rng);  // span 5
    CHECK(tiny.phases.size() == 1);
    CHECK(tiny.phases[0].span_length == doctest::Approx(5.0));
}

TEST_CASE("ramp segments follow the linear closed form") {
    Phase ph;
    ph.family = CurveFamily::Ramp;
    ph.direction = CurveDirection::Increasing;
    ph.span_length = 10.0;
    ph.avg_parallelism = 6.0;
    ph.work = 60.0;
    ph.curve_params[0] = 2.0;
    ph.curve_params[1] = 10.0;
    for (int j = 0; j < kCurveSegments; ++j)
        ph.segments.push_back(2.0 + 8.0 * (j + 0.5) / kCurveSegments);
    MalleableJob job;
    job.id = 0;
    job.phases.push_back(ph);

    CHECK(segment_mean(ph) == doctest::Approx(6.0));
    CHECK(parallelism_at(job, 5.0) == doctest::Approx(6.04));   // segment 50
    CHECK(parallelism_at(job, 0.0) == doctest::Approx(2.04));   // segment 0
    CHECK(parallelism_at(job, 9.999) == doctest::Approx(9.96));
}

TEST_CASE("generated curves keep exact means, floors, caps and pairing") {
    WorkloadConfig cfg;
    cfg.job_count = 60;
    cfg.seed = 7;
    auto jobs = generate_workload(cfg);
    REQUIRE(!jobs.empty());
    bool saw_monotone = false, saw_impulse = false;
    for (const MalleableJob& job : jobs) {
        ConsistencyReport rep = check_phase_consistency(job, 1e-6);
        CHECK_MESSAGE(rep.pass, rep.message);
        for (size_t i = 0; i < job.phases.size(); ++i) {
            const Phase& ph = job.phases[i];
            double A = ph.avg_parallelism;
            double cap = ph.family == CurveFamily::Impulse ? std::min(10.0 * A, 256.0)
                                                           : std::min(2.0 * A - 1.0, 256.0);
            for (double h : ph.segments) {
                CHECK(h >= 1.0 - 1e-9);
                CHECK(h <= cap + 1e-9);
            }
            if (ph.direction == CurveDirection::Increasing) {
                saw_monotone = true;
                if (i + 1 < job.phases.size()) {
                    const Phase& next = job.phases[i + 1];
                    CHECK(next.direction == CurveDirection::Decreasing);
                    CHECK(next.family == ph.family);
                    CHECK(next.curve_params[0] == ph.curve_params[0]);
                    CHECK(next.curve_params[1] == ph.curve_params[1]);
                }
            }
            if (ph.direction == CurveDirection::Decreasing) {
                REQUIRE(i > 0);
                CHECK(job.phases[i - 1].direction == CurveDirection::Increasing);
            }
            if (ph.family == CurveFamily::Impulse) saw_impulse = true;
        }
    }
    CHECK(saw_monotone);
    CHECK(saw_impulse);
}

TEST_CASE("impulse spike height and baseline") {
    WorkloadConfig cfg;
    MalleableJob job;
    bool found = false;
    for (std::uint64_t s = 0; s < 64 && !found; ++s) {
        std::mt19937_64 rng(s);
        job = synthesize_phases({0, 0.0, 60.0, 6.0}, cfg, rng);  // one phase, span 10
        REQUIRE(job.phases.size() == 1);
        found = job.phases[0].family == CurveFamily::Impulse;
    }
    REQUIRE(found);
    const Phase& ph = job.phases[0];
    CHECK(ph.curve_params[0] == doctest::Approx(60.0));        // min(10A, P, 20A-19)
    CHECK(ph.curve_params[1] == doctest::Approx(3.0 / 0.95));  // keeps the mean at 6
    CHECK(segment_mean(ph) == doctest::Approx(6.0));
    int spikes = (int)std::count(ph.segments.begin(), ph.segments.end(), ph.curve_params[0]);
    CHECK(spikes == 5);
}

TEST_CASE("consistency report names the corrupted phase") {
    WorkloadConfig cfg;
    std::mt19937_64 rng(3);
    MalleableJob job = synthesize_phases({0, 0.0, 600.0, 6.0}, cfg, rng);

    MalleableJob bent = job;
    for (double& h : bent.phases[4].segments) h *= 1.2;
    ConsistencyReport rep = check_phase_consistency(bent);
    CHECK(!rep.pass);
    CHECK(rep.message.find("phase 4") != std::string::npos);
    CHECK(!rep.phases[4].pass);
    CHECK(rep.phases[3].pass);

    MalleableJob heavy = job;
    heavy.phases[2].work *= 1.01;
    rep = check_phase_consistency(heavy);
    CHECK(!rep.pass);
    CHECK(rep.message.find("phase 2") != std::string::npos);
}

TEST_CASE("workload files round trip exactly") {
    WorkloadConfig cfg;
    cfg.job_count = 12;
    cfg.seed = 99;
    auto jobs = generate_workload(cfg);
    std::stringstream buf;
    save_workload(buf, jobs);
    auto loaded = load_workload(buf);
    REQUIRE(loaded.size() == jobs.size());
    for (size_t i = 0; i < jobs.size(); ++i) {
        CHECK(loaded[i].id == jobs[i].id);
        CHECK(loaded[i].release == jobs[i].release);
        REQUIRE(loaded[i].phases.size() == jobs[i].phases.size());
        for (size_t p = 0; p < jobs[i].phases.size(); ++p) {
            const Phase& a = jobs[i].phases[p];
            const Phase& b = loaded[i].phases[p];
            CHECK(a.span_length == b.span_length);
            CHECK(a.work == b.work);
            CHECK(a.avg_parallelism == b.avg_parallelism);
            CHECK(a.family == b.family);
            CHECK(a.direction == b.direction);
            CHECK(a.segments == b.segments);
        }
    }
    std::stringstream bogus("{\"format\":\"something-else\",\"jobs\":[]}");
    CHECK_THROWS_AS(load_workload(bogus), std::invalid_argument);
}

TEST_CASE("workload config validation names the violated bound") {
    WorkloadConfig cfg;
    cfg.parallelism_max = 1000.0;
    CHECK_THROWS_WITH_AS(
        cfg.validate(),
        "workload config: need 1 <= parallelism_min <= parallelism_max <= total_processors",
        std::invalid_argument);
    cfg = WorkloadConfig{};
    cfg.offered_load = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = WorkloadConfig{};
    cfg.work_min = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = WorkloadConfig{};
    cfg.job_count = 0;
    CHECK(generate_workload(cfg).empty());
    cfg.job_count = -1;
    cfg.offered_load = 1.0;
    CHECK(cfg.resolved_job_count() == 160);
}

TEST_CASE("flat phase helper sanity") {
    Phase ph = flat_phase(4.0, 4.0);
    MalleableJob job;
    job.phases.push_back(ph);
    CHECK(job.total_work() == 16.0);
    CHECK(job.total_span() == 4.0);
    CHECK(check_phase_consistency(job).pass);
}
