#include "lasmud/detector.hpp"

#include <cmath>
#include <stdexcept>

namespace lasmud {

namespace {

/// Flip decisions for one step, taken against the pre-step gradient.
/// Strict inequalities: a gradient exactly at the threshold never flips.
void decide_flips(const DetectorState& state, const std::vector<int>& L,
                  const std::vector<double>& thresholds, std::vector<int>& out) {
    out.clear();
    for (std::size_t i = 0; i < L.size(); ++i) {
        const int k = L[i];
        const double g = state.g[k];
        if (state.b[k] == -1 ? g > thresholds[i] : g < -thresholds[i]) out.push_back(k);
    }
}

/// Batched commit: one gradient update with pre-flip bits, then the flips.
void apply_flips(DetectorState& state, const Channel& ch, const std::vector<int>& flipped) {
    for (int k : flipped) state.g += (2.0 * state.b[k]) * ch.H.col(k);
    for (int k : flipped) state.b[k] = -state.b[k];
    state.step += 1;
    state.flips += static_cast<long>(flipped.size());
}

}  // namespace

DetectorState init_state(const Channel& ch, const Observation& obs, const BitVector& b0) {
    DetectorState st;
    st.b = b0;
    st.g = gradient(ch, obs, b0);
    return st;
}

int las_step(DetectorState& state, const Channel& ch, const std::vector<int>& L,
             const std::vector<double>& thresholds, std::vector<int>* flipped_out) {
    if (thresholds.size() != L.size())
        throw std::invalid_argument("thresholds must align with the candidate set");
    std::vector<int> local;
    std::vector<int>& flipped = flipped_out ? *flipped_out : local;
    decide_flips(state, L, thresholds, flipped);
    apply_flips(state, ch, flipped);
    return static_cast<int>(flipped.size());
}

int las_step(DetectorState& state, const Channel& ch, const std::vector<int>& L) {
    return las_step(state, ch, L, thresholds_for_set(ch, L));
}

double likelihood_delta(const Channel& ch, const DetectorState& state,
                        const std::vector<int>& flipped) {
    // df = db^T (g + z/2), db = -2 sum_i b_i e_i, z = -H db; expands to
    // -2 sum_i b_i g_i - 2 sum_{i,j} b_i H_ij b_j over the flipped set.
    double lin = 0.0, quad = 0.0;
    for (int i : flipped) {
        lin += state.b[i] * state.g[i];
        for (int j : flipped) quad += state.b[i] * ch.H(i, j) * state.b[j];
    }
    return -2.0 * lin - 2.0 * quad;
}

DetectionResult run_las(const Channel& ch, const Observation& obs, const Schedule& sched,
                        const BitVector& b0, const RunOptions& opts) {
    if (sched.K != ch.K) throw std::invalid_argument("schedule/channel user count mismatch");
    const long max_periods = opts.max_periods > 0 ? opts.max_periods : 64L * ch.K;

    std::vector<std::vector<double>> slot_thresholds;
    slot_thresholds.reserve(sched.period.size());
    for (const auto& L : sched.period) slot_thresholds.push_back(thresholds_for_set(ch, L));

    DetectorState state = init_state(ch, obs, b0);
    DetectionResult res;
    double f = 0.0;
    if (opts.retain_trace) {
        f = likelihood(ch, obs, b0);
        res.likelihood_trace.push_back(f);
    }

    std::vector<int> flipped;
    bool converged = false;
    for (long period = 0; period < max_periods && !converged; ++period) {
        long flips_in_period = 0;
        for (std::size_t s = 0; s < sched.period.size(); ++s) {
            decide_flips(state, sched.period[s], slot_thresholds[s], flipped);
            if (opts.retain_trace) {
                f += likelihood_delta(ch, state, flipped);
                apply_flips(state, ch, flipped);
                res.likelihood_trace.push_back(f);
            } else {
                apply_flips(state, ch, flipped);
            }
            flips_in_period += static_cast<long>(flipped.size());

            if (opts.gradient_check_every > 0 &&
                state.step % opts.gradient_check_every == 0) {
                const Eigen::VectorXd exact = gradient(ch, obs, state.b);
                res.gradient_drift = std::max(
                    res.gradient_drift, (state.g - exact).cwiseAbs().maxCoeff());
            }
        }
        converged = flips_in_period == 0;
    }

    if (opts.gradient_check_every > 0) {
        const Eigen::VectorXd exact = gradient(ch, obs, state.b);
        res.gradient_drift =
            std::max(res.gradient_drift, (state.g - exact).cwiseAbs().maxCoeff());
    }

    res.fixed_point = state.b;
    res.steps = state.step;
    res.flips = state.flips;
    res.bfr_contribution = static_cast<double>(state.flips) / ch.K;
    res.converged = converged;
    return res;
}

bool fixed_point_region_check(const Channel& ch, const Observation& obs, const BitVector& b,
                              const ThresholdVector& t) {
    const Eigen::VectorXd g =
        ch.A.cwiseProduct(obs.y) - ch.H * b.cast<double>();
    for (int k = 0; k < ch.K; ++k)
        if (b[k] * g[k] < -t.t[k]) return false;
    return true;
}

bool wslas_region_check(const Channel& ch, const Observation& obs, const BitVector& b) {
    const Eigen::VectorXd q =
        obs.y - (ch.R - Eigen::MatrixXd::Identity(ch.K, ch.K)) *
                    ch.A.cwiseProduct(b.cast<double>());
    for (int k = 0; k < ch.K; ++k)
        if (b[k] * q[k] < 0.0) return false;
    return true;
}

bool unique_fixed_point_check(const Channel& ch, const Observation& obs,
                              const ThresholdVector& t) {
    for (int k = 0; k < ch.K; ++k) {
        const double row = ch.H.row(k).cwiseAbs().sum();
        if (!(std::abs(ch.A[k] * obs.y[k]) > row + t.t[k] - 2.0 * ch.H(k, k)))
            return false;
    }
    return true;
}

}  // namespace lasmud
