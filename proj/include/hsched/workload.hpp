#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace hsched {

// Number of piecewise-constant segments a phase's parallelism curve is
// discretized into. Segment k covers span fraction [k/N, (k+1)/N).
inline constexpr int kCurveSegments = 100;

enum class CurveFamily { Step, Log, PolyII, Ramp, PolyI, Exp, Impulse };
enum class CurveDirection { Flat, Increasing, Decreasing };

const char* curve_family_name(CurveFamily f);
CurveFamily curve_family_from_name(const std::string& name);

// One phase of a malleable job: a span length, the work done over it, the
// target mean parallelism, and the discretized parallelism curve. The curve
// is built so that its numeric mean equals avg_parallelism and work equals
// avg_parallelism * span_length.
struct Phase {
    double span_length = 0.0;
    double work = 0.0;
    double avg_parallelism = 1.0;
    CurveFamily family = CurveFamily::Step;
    CurveDirection direction = CurveDirection::Flat;
    double curve_params[2] = {0.0, 0.0};  // monotone: lo/hi endpoints; impulse: spike/baseline
    std::vector<double> segments;         // kCurveSegments values, each >= 1
};

struct MalleableJob {
    int id = 0;
    double release = 0.0;
    std::vector<Phase> phases;

    double total_work() const;
    double total_span() const;
};

// A job before phase decomposition: total work, mean parallelism, release.
struct MoldableJobSpec {
    int id = 0;
    double release = 0.0;
    double total_work = 0.0;
    double avg_parallelism = 1.0;
};

struct WorkloadConfig {
    int total_processors = 256;
    double offered_load = 1.0;       // rho; Poisson interarrival mean = E[w] / (rho * P)
    int job_count = -1;              // negative: use round(160 * offered_load)
    double parallelism_min = 1.0;    // log-uniform mean parallelism range
    double parallelism_max = 256.0;
    double work_min = 100.0;         // log-uniform total work range
    double work_max = 10000.0;
    double max_span = 300.0;         // ceiling on w/A; big jobs draw proportionally more parallelism
    double phase_span_length = 10.0; // span carved into phases of this length
    double impulse_width = 0.05;     // fraction of a phase spent at the spike
    std::uint64_t seed = 0;

    void validate() const;
    int resolved_job_count() const;
};

std::vector<MoldableJobSpec> sample_moldable_jobs(const WorkloadConfig& cfg, std::mt19937_64& rng);

// Decompose one moldable spec into phases with drawn parallelism curves.
// Non-flat curve families come in increasing/decreasing pairs sharing
// endpoints so each job's phase mix stays balanced.
MalleableJob synthesize_phases(const MoldableJobSpec& spec, const WorkloadConfig& cfg,
                               std::mt19937_64& rng);

std::vector<MalleableJob> generate_workload(const WorkloadConfig& cfg);

struct PhaseCheck {
    int phase_index = -1;
    double mean_error = 0.0;  // |numeric mean - avg_parallelism| / avg_parallelism
    double work_error = 0.0;  // |work - avg_parallelism * span_length| / work
    bool pass = true;
    std::string message;
};

struct ConsistencyReport {
    std::vector<PhaseCheck> phases;
    double tolerance = 1e-3;
    bool pass = true;
    std::string message;  // first failure, if any
};

// Checks every phase of the job: curve mean against avg_parallelism, stored
// work against the constant-curve baseline, and curve floor/cap violations.
ConsistencyReport check_phase_consistency(const MalleableJob& job, double tolerance = 1e-3);

void save_workload(std::ostream& out, const std::vector<MalleableJob>& jobs);
std::vector<MalleableJob> load_workload(std::istream& in);
void save_workload_file(const std::string& path, const std::vector<MalleableJob>& jobs);
std::vector<MalleableJob> load_workload_file(const std::string& path);

}  // namespace hsched
