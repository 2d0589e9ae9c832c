#include "hsched/execution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hsched {

JobExecState make_exec_state(const MalleableJob& job) {
    JobExecState st;
    st.job_id = job.id;
    st.initial_work = job.total_work();
    st.remaining_work = st.initial_work;
    if (job.phases.empty() || !(st.initial_work > 0.0))
        throw std::invalid_argument("make_exec_state: job has no work");
    return st;
}

double parallelism_at(const MalleableJob& job, double s) {
    if (s < 0.0) throw std::domain_error("parallelism_at: negative span offset");
    for (const Phase& ph : job.phases) {
        if (s < ph.span_length) {
            double seg_w = ph.span_length / kCurveSegments;
            int k = std::min((int)(s / seg_w), kCurveSegments - 1);
            return ph.segments[k];
        }
        s -= ph.span_length;
    }
    throw std::domain_error("parallelism_at: offset past total span");
}

ExecDelta advance(JobExecState& st, const MalleableJob& job, double a, double dt) {
    if (a < 0.0) throw std::domain_error("advance: negative allocation");
    if (!(dt > 0.0)) throw std::domain_error("advance: non-positive time slice");
    if (st.complete() || st.remaining_work <= 0.0)
        throw std::logic_error("advance: job already complete");

    ExecDelta d;
    const double work_eps = 1e-9 * st.initial_work;
    const int nph = (int)job.phases.size();
    double left = dt;
    int guard = nph * (kCurveSegments + 2) + 64;

    while (left > 0.0) {
        if (--guard <= 0) throw std::logic_error("advance: segment walk failed to make progress");
        if (st.remaining_work <= work_eps || st.phase_index >= nph) {
            st.remaining_work = 0.0;
            d.completed = true;
            break;
        }
        const Phase& ph = job.phases[st.phase_index];
        // Snap across phase/segment boundaries before integrating so float
        // residue at an edge cannot stall the walk.
        if (st.span_progress >= ph.span_length - 1e-12 * ph.span_length) {
            ++st.phase_index;
            st.span_progress = 0.0;
            continue;
        }
        const double seg_w = ph.span_length / kCurveSegments;
        int k = std::min((int)(st.span_progress / seg_w), kCurveSegments - 1);
        double seg_end = (k + 1) * seg_w;
        if (seg_end - st.span_progress <= 1e-12 * ph.span_length) {
            // Within float residue of the segment edge: step into the next
            // segment by index so the walk cannot stall on a fixed point.
            if (k + 1 >= kCurveSegments) {
                st.span_progress = ph.span_length;
                continue;
            }
            ++k;
            seg_end = (k + 1) * seg_w;
        }
        double span_left = seg_end - st.span_progress;
        const double h = ph.segments[k];
        const double rate = std::min(a, h);
        if (rate <= 0.0) {  // starved: time passes, nothing moves
            d.wall_time += left;
            left = 0.0;
            break;
        }
        const double span_rate = rate / h;
        double t = left;
        double t_seg = span_left / span_rate;
        double t_work = st.remaining_work / rate;
        int binding = 0;
        if (t_seg < t) { t = t_seg; binding = 1; }
        if (t_work < t) { t = t_work; binding = 2; }

        d.work_done += rate * t;
        d.span_done += span_rate * t;
        d.wall_time += t;
        st.remaining_work -= rate * t;
        left -= t;
        if (binding == 1)
            st.span_progress = seg_end;
        else
            st.span_progress += span_rate * t;
        if (binding == 2) st.remaining_work = 0.0;
        if (st.remaining_work <= work_eps) {
            st.remaining_work = 0.0;
            d.completed = true;
            break;
        }
    }
    return d;
}

QuantumStats quantum_stats(const std::vector<ExecDelta>& deltas, double desire_held) {
    QuantumStats q;
    for (const ExecDelta& d : deltas) {
        q.work += d.work_done;
        q.span += d.span_done;
    }
    q.avg_parallelism = q.span > 0.0 ? q.work / q.span : desire_held;
    return q;
}

}  // namespace hsched
