#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hsched {

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Equal-share allocation against the closed-form water-filling reference on
// randomized desire sets; elementwise tolerance 1e-9.
SuiteResult deq_oracle_suite(int instances, std::uint64_t seed);

// Serial wall time equals total work and fully fed wall time equals total
// span on randomized jobs; relative tolerance 1e-6.
SuiteResult kinematics_suite(int jobs, std::uint64_t seed);

// Feedback runs across tree depths stay inside the satisfied-time, allocated
// area and makespan envelopes derived from the measured transition factor.
SuiteResult bounds_suite(const std::vector<int>& levels, int seeds_per_level, int jobs_n,
                         std::uint64_t master);

// Splicing pass-through nodes above every leaf leaves per-job completions
// and the makespan unchanged (tolerance 1e-9), for both feedback policies.
SuiteResult passthrough_suite(int seeds, int extra_levels, int jobs_n, std::uint64_t master);

// The default set run by the verify command.
std::vector<SuiteResult> builtin_suites();

}  // namespace hsched
