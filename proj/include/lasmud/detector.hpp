#pragma once

#include <vector>

#include "lasmud/channel.hpp"
#include "lasmud/schedule.hpp"

namespace lasmud {

/// Running state of a search: current bits, the incrementally maintained
/// gradient g = -H b + A y, the step index and the running flip count.
struct DetectorState {
    BitVector b;
    Eigen::VectorXd g;
    long step = 0;
    long flips = 0;
};

DetectorState init_state(const Channel& ch, const Observation& obs, const BitVector& b0);

struct RunOptions {
    long max_periods = 0;          // 0 -> 64 * K
    bool retain_trace = false;     // keep per-step likelihood values
    int gradient_check_every = 0;  // 0 = off; else recompute g every n steps
};

struct DetectionResult {
    BitVector fixed_point;
    long steps = 0;
    long flips = 0;                       // M
    double bfr_contribution = 0.0;        // M / K
    std::vector<double> likelihood_trace;  // f(b(0)), then f after each step
    bool converged = false;
    double gradient_drift = 0.0;  // max |g - (A y - H b)| seen at checkpoints
};

/// One synchronous update of all candidates in L: every flip decision uses
/// the pre-step gradient, strict inequalities against the set's thresholds,
/// then one batched gradient update. `thresholds` must align with L.
/// Returns the number of flips performed; `flipped_out`, when given,
/// receives the flipped indices.
int las_step(DetectorState& state, const Channel& ch, const std::vector<int>& L,
             const std::vector<double>& thresholds,
             std::vector<int>* flipped_out = nullptr);

/// Convenience overload computing the thresholds from the set.
int las_step(DetectorState& state, const Channel& ch, const std::vector<int>& L);

/// Iterates the schedule until a full period passes with zero flips, or
/// max_periods is exhausted (converged=false; the caller decides whether
/// that is fatal -- finite convergence is guaranteed, so it flags a defect).
DetectionResult run_las(const Channel& ch, const Observation& obs, const Schedule& sched,
                        const BitVector& b0, const RunOptions& opts = {});

/// Likelihood change of flipping `flipped` from `state`, evaluated from the
/// gradient alone: df = db^T (g + z/2) with db = -2 sum b_i e_i, z = -H db.
double likelihood_delta(const Channel& ch, const DetectorState& state,
                        const std::vector<int>& flipped);

/// b (x) (A y - H b) >= -t elementwise.
bool fixed_point_region_check(const Channel& ch, const Observation& obs, const BitVector& b,
                              const ThresholdVector& t);

/// The t = A^2 specialization in its b (x) (y - (R - I) A b) >= 0 form;
/// also the one-flip local-maximum region.
bool wslas_region_check(const Channel& ch, const Observation& obs, const BitVector& b);

/// |A_k y_k| > sum_j |H_kj| + t_k - 2 H_kk for all k. When true the only
/// fixed point is sgn(y).
bool unique_fixed_point_check(const Channel& ch, const Observation& obs,
                              const ThresholdVector& t);

}  // namespace lasmud
