#include "hsched/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "hsched/util.hpp"
#include "json.hpp"

namespace hsched {

namespace {

// Unit shapes g: [0,1] -> [0,1], increasing, g(0)=0, g(1)=1. A monotone curve
// is h(u) = lo + (hi - lo) * g(u) (mirrored in u for decreasing phases).
// Segment values are exact averages of h over the segment, computed from the
// antiderivative, so the discrete curve mean telescopes to
// lo + (hi - lo) * I(1), machine-exact against the target parallelism.
double shape_integral(CurveFamily f, double u) {
    switch (f) {
        case CurveFamily::Ramp:
            return 0.5 * u * u;
        case CurveFamily::PolyI:
            return u * u * u / 3.0;
        case CurveFamily::PolyII:
            return u * u - u * u * u / 3.0;
        case CurveFamily::Exp: {
            // g(u) = (e^{ku} - 1) / (e^k - 1), k = ln 10
            const double k = std::log(10.0);
            return ((std::exp(k * u) - 1.0) / k - u) / 9.0;
        }
        case CurveFamily::Log: {
            // g(u) = ln(1 + 9u) / ln 10
            const double x = 1.0 + 9.0 * u;
            return (x * (std::log(x) - 1.0) + 1.0) / (9.0 * std::log(10.0));
        }
        default:
            throw std::logic_error("shape_integral: family has no unit shape");
    }
}

double shape_mean(CurveFamily f) { return shape_integral(f, 1.0); }

void fill_monotone_segments(Phase& ph) {
    const double lo = ph.curve_params[0];
    const double hi = ph.curve_params[1];
    ph.segments.assign(kCurveSegments, ph.avg_parallelism);
    if (hi <= lo) return;  // degenerate: flat at the mean
    const double n = kCurveSegments;
    for (int j = 0; j < kCurveSegments; ++j) {
        double a = j / n, b = (j + 1) / n;
        double avg_g;
        if (ph.direction == CurveDirection::Decreasing)
            avg_g = (shape_integral(ph.family, 1.0 - a) - shape_integral(ph.family, 1.0 - b)) * n;
        else
            avg_g = (shape_integral(ph.family, b) - shape_integral(ph.family, a)) * n;
        ph.segments[j] = lo + (hi - lo) * avg_g;
    }
}

// Pick monotone-curve endpoints with mean exactly A. The high endpoint is
// capped at min(2A - 1, P) so the curve never exceeds twice its mean and the
// low endpoint never falls under 1.
void draw_monotone_endpoints(Phase& ph, double A, double processors, std::mt19937_64& rng) {
    const double cap = std::min(2.0 * A - 1.0, processors);
    const double g = shape_mean(ph.family);
    double lo_min = std::max(1.0, (A - g * cap) / (1.0 - g));
    if (lo_min >= A) {
        ph.curve_params[0] = ph.curve_params[1] = A;
        return;
    }
    double lo = uniform_in(rng, lo_min, A);
    double hi = lo + (A - lo) / g;
    ph.curve_params[0] = lo;
    ph.curve_params[1] = hi;
}

void fill_impulse_segments(Phase& ph, double A, double processors, double width,
                           std::mt19937_64& rng) {
    int spike = std::max(1, (int)std::lround(width * kCurveSegments));
    spike = std::min(spike, kCurveSegments);
    const double eps = (double)spike / kCurveSegments;
    double spike_h = std::min({10.0 * A, processors, (A - (1.0 - eps)) / eps});
    double base = (A - eps * spike_h) / (1.0 - eps);
    ph.curve_params[0] = spike_h;
    ph.curve_params[1] = base;
    ph.segments.assign(kCurveSegments, base);
    int start = (int)bounded(rng, (std::uint64_t)(kCurveSegments - spike + 1));
    for (int j = start; j < start + spike; ++j) ph.segments[j] = spike_h;
}

Phase make_phase(CurveFamily family, CurveDirection dir, double span, double A,
                 const WorkloadConfig& cfg, std::mt19937_64& rng, const Phase* paired) {
    Phase ph;
    ph.family = family;
    ph.direction = dir;
    ph.span_length = span;
    ph.avg_parallelism = A;
    ph.work = A * span;
    switch (family) {
        case CurveFamily::Step:
            ph.direction = CurveDirection::Flat;
            ph.curve_params[0] = ph.curve_params[1] = A;
            ph.segments.assign(kCurveSegments, A);
            break;
        case CurveFamily::Impulse:
            ph.direction = CurveDirection::Flat;
            fill_impulse_segments(ph, A, cfg.total_processors, cfg.impulse_width, rng);
            break;
        default:
            if (paired) {
                ph.curve_params[0] = paired->curve_params[0];
                ph.curve_params[1] = paired->curve_params[1];
            } else {
                draw_monotone_endpoints(ph, A, cfg.total_processors, rng);
            }
            fill_monotone_segments(ph);
            break;
    }
    return ph;
}

const CurveFamily kAllFamilies[7] = {
    CurveFamily::Step,  CurveFamily::Log, CurveFamily::PolyII, CurveFamily::Ramp,
    CurveFamily::PolyI, CurveFamily::Exp, CurveFamily::Impulse};

}  // namespace

const char* curve_family_name(CurveFamily f) {
    switch (f) {
        case CurveFamily::Step: return "step";
        case CurveFamily::Log: return "log";
        case CurveFamily::PolyII: return "poly2";
        case CurveFamily::Ramp: return "ramp";
        case CurveFamily::PolyI: return "poly1";
        case CurveFamily::Exp: return "exp";
        case CurveFamily::Impulse: return "impulse";
    }
    return "?";
}

CurveFamily curve_family_from_name(const std::string& name) {
    for (CurveFamily f : kAllFamilies)
        if (name == curve_family_name(f)) return f;
    throw std::invalid_argument("unknown curve family: " + name);
}

double MalleableJob::total_work() const {
    double s = 0.0;
    for (const Phase& p : phases) s += p.work;
    return s;
}

double MalleableJob::total_span() const {
    double s = 0.0;
    for (const Phase& p : phases) s += p.span_length;
    return s;
}

void WorkloadConfig::validate() const {
    if (total_processors < 1)
        throw std::invalid_argument("workload config: total_processors must be >= 1");
    if (!(offered_load > 0.0))
        throw std::invalid_argument("workload config: offered_load must be > 0");
    if (!(parallelism_min >= 1.0 && parallelism_min <= parallelism_max &&
          parallelism_max <= (double)total_processors))
        throw std::invalid_argument(
            "workload config: need 1 <= parallelism_min <= parallelism_max <= total_processors");
    if (!(work_min > 0.0 && work_min <= work_max))
        throw std::invalid_argument("workload config: need 0 < work_min <= work_max");
    if (!(max_span >= work_max / parallelism_max))
        throw std::invalid_argument(
            "workload config: max_span must be >= work_max / parallelism_max");
    if (!(phase_span_length > 0.0))
        throw std::invalid_argument("workload config: phase_span_length must be > 0");
    if (!(impulse_width > 0.0 && impulse_width < 1.0))
        throw std::invalid_argument("workload config: impulse_width must be in (0, 1)");
}

int WorkloadConfig::resolved_job_count() const {
    if (job_count >= 0) return job_count;
    return (int)std::lround(160.0 * offered_load);
}

std::vector<MoldableJobSpec> sample_moldable_jobs(const WorkloadConfig& cfg,
                                                  std::mt19937_64& rng) {
    cfg.validate();
    const int n = cfg.resolved_job_count();
    const double mean_w = log_uniform_mean(cfg.work_min, cfg.work_max);
    const double mean_gap = mean_w / (cfg.offered_load * cfg.total_processors);
    std::vector<MoldableJobSpec> specs;
    specs.reserve(n);
    double t = 0.0;
    for (int i = 0; i < n; ++i) {
        t += exponential(rng, mean_gap);
        MoldableJobSpec s;
        s.id = i;
        s.release = t;
        s.total_work = log_uniform(rng, cfg.work_min, cfg.work_max);
        // Parallelism scales with job size so no single job's span dominates
        // the schedule: the floor keeps w/A at or below max_span.
        double floor = std::max(cfg.parallelism_min, s.total_work / cfg.max_span);
        s.avg_parallelism = log_uniform(rng, floor, cfg.parallelism_max);
        specs.push_back(s);
    }
    return specs;
}

MalleableJob synthesize_phases(const MoldableJobSpec& spec, const WorkloadConfig& cfg,
                               std::mt19937_64& rng) {
    cfg.validate();
    if (!(spec.total_work > 0.0) || !(spec.avg_parallelism >= 1.0))
        throw std::invalid_argument("synthesize_phases: need total_work > 0 and avg_parallelism >= 1");

    MalleableJob job;
    job.id = spec.id;
    job.release = spec.release;

    const double span = spec.total_work / spec.avg_parallelism;
    const double psl = cfg.phase_span_length;
    // Split span into phases of length psl plus a remainder; a span shorter
    // than one phase becomes a single short phase.
    int full = (int)std::floor(span / psl + 1e-9);
    double rem = span - full * psl;
    std::vector<double> lengths;
    for (int i = 0; i < full; ++i) lengths.push_back(psl);
    if (rem > 1e-9 * std::max(1.0, psl)) lengths.push_back(rem);
    if (lengths.empty()) lengths.push_back(span);

    const int nph = (int)lengths.size();
    job.phases.reserve(nph);
    int i = 0;
    while (i < nph) {
        CurveFamily f = kAllFamilies[bounded(rng, 7)];
        if (f == CurveFamily::Step || f == CurveFamily::Impulse) {
            job.phases.push_back(make_phase(f, CurveDirection::Flat, lengths[i],
                                            spec.avg_parallelism, cfg, rng, nullptr));
            ++i;
        } else {
            Phase inc = make_phase(f, CurveDirection::Increasing, lengths[i],
                                   spec.avg_parallelism, cfg, rng, nullptr);
            job.phases.push_back(inc);
            ++i;
            if (i < nph) {
                job.phases.push_back(make_phase(f, CurveDirection::Decreasing, lengths[i],
                                                spec.avg_parallelism, cfg, rng,
                                                &job.phases.back()));
                ++i;
            }
        }
    }
    return job;
}

std::vector<MalleableJob> generate_workload(const WorkloadConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    auto specs = sample_moldable_jobs(cfg, rng);
    std::vector<MalleableJob> jobs;
    jobs.reserve(specs.size());
    for (const auto& s : specs) jobs.push_back(synthesize_phases(s, cfg, rng));
    return jobs;
}

ConsistencyReport check_phase_consistency(const MalleableJob& job, double tolerance) {
    ConsistencyReport rep;
    rep.tolerance = tolerance;
    for (int i = 0; i < (int)job.phases.size(); ++i) {
        const Phase& ph = job.phases[i];
        PhaseCheck chk;
        chk.phase_index = i;
        if (ph.segments.size() != kCurveSegments || !(ph.avg_parallelism >= 1.0) ||
            !(ph.span_length > 0.0)) {
            chk.pass = false;
            chk.message = "phase " + std::to_string(i) + ": malformed";
        } else {
            double mean = std::accumulate(ph.segments.begin(), ph.segments.end(), 0.0) /
                          (double)kCurveSegments;
            chk.mean_error = std::abs(mean - ph.avg_parallelism) / ph.avg_parallelism;
            double baseline = ph.avg_parallelism * ph.span_length;
            chk.work_error = std::abs(ph.work - baseline) / baseline;
            double mn = *std::min_element(ph.segments.begin(), ph.segments.end());
            if (chk.mean_error > tolerance)
                chk.message = "phase " + std::to_string(i) + ": curve mean off by " +
                              format_double(chk.mean_error);
            else if (chk.work_error > tolerance)
                chk.message = "phase " + std::to_string(i) + ": work off constant baseline by " +
                              format_double(chk.work_error);
            else if (mn < 1.0 - 1e-9)
                chk.message = "phase " + std::to_string(i) + ": curve dips under 1";
            chk.pass = chk.message.empty();
        }
        if (!chk.pass && rep.pass) {
            rep.pass = false;
            rep.message = chk.message;
        }
        rep.phases.push_back(chk);
    }
    return rep;
}

namespace {

using nlohmann::json;

json phase_to_json(const Phase& ph) {
    json j;
    j["span_length"] = ph.span_length;
    j["work"] = ph.work;
    j["avg_parallelism"] = ph.avg_parallelism;
    j["family"] = curve_family_name(ph.family);
    j["direction"] = ph.direction == CurveDirection::Flat
                         ? "flat"
                         : (ph.direction == CurveDirection::Increasing ? "inc" : "dec");
    j["params"] = {ph.curve_params[0], ph.curve_params[1]};
    j["segments"] = ph.segments;
    return j;
}

Phase phase_from_json(const json& j) {
    Phase ph;
    ph.span_length = j.at("span_length").get<double>();
    ph.work = j.at("work").get<double>();
    ph.avg_parallelism = j.at("avg_parallelism").get<double>();
    ph.family = curve_family_from_name(j.at("family").get<std::string>());
    std::string d = j.at("direction").get<std::string>();
    if (d == "flat") ph.direction = CurveDirection::Flat;
    else if (d == "inc") ph.direction = CurveDirection::Increasing;
    else if (d == "dec") ph.direction = CurveDirection::Decreasing;
    else throw std::invalid_argument("workload file: bad phase direction '" + d + "'");
    auto params = j.at("params");
    ph.curve_params[0] = params.at(0).get<double>();
    ph.curve_params[1] = params.at(1).get<double>();
    ph.segments = j.at("segments").get<std::vector<double>>();
    if (ph.segments.size() != kCurveSegments)
        throw std::invalid_argument("workload file: phase must carry " +
                                    std::to_string(kCurveSegments) + " segments");
    return ph;
}

}  // namespace

void save_workload(std::ostream& out, const std::vector<MalleableJob>& jobs) {
    json j;
    j["format"] = "hsched-workload";
    j["version"] = 1;
    json arr = json::array();
    for (const auto& job : jobs) {
        json ji;
        ji["id"] = job.id;
        ji["release"] = job.release;
        json phases = json::array();
        for (const auto& ph : job.phases) phases.push_back(phase_to_json(ph));
        ji["phases"] = std::move(phases);
        arr.push_back(std::move(ji));
    }
    j["jobs"] = std::move(arr);
    out << j.dump(2) << "\n";
}

std::vector<MalleableJob> load_workload(std::istream& in) {
    json j = json::parse(in);
    if (j.value("format", "") != "hsched-workload")
        throw std::invalid_argument("workload file: missing hsched-workload format tag");
    std::vector<MalleableJob> jobs;
    for (const auto& ji : j.at("jobs")) {
        MalleableJob job;
        job.id = ji.at("id").get<int>();
        job.release = ji.at("release").get<double>();
        for (const auto& jp : ji.at("phases")) job.phases.push_back(phase_from_json(jp));
        jobs.push_back(std::move(job));
    }
    return jobs;
}

void save_workload_file(const std::string& path, const std::vector<MalleableJob>& jobs) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open for writing: " + path);
    save_workload(out, jobs);
}

std::vector<MalleableJob> load_workload_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open workload file: " + path);
    return load_workload(in);
}

}  // namespace hsched
