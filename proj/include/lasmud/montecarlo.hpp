#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lasmud/baselines.hpp"
#include "lasmud/detector.hpp"
#include "lasmud/schedule.hpp"

namespace lasmud {

enum class BaselineKind { Mf, Decorrelator, Mmse, Gml };
enum class InitialKind { AllPlus, Random, Mf, Decorrelator, Mmse, UserSupplied };

std::string to_string(BaselineKind k);
std::string to_string(InitialKind k);

/// Either a baseline detector or a LAS run (schedule + initial).
struct DetectorSpec {
    std::string label;
    std::optional<BaselineKind> baseline;
    std::optional<Schedule> schedule;
    InitialKind initial = InitialKind::Mf;
    BitVector b0;  // for InitialKind::UserSupplied
    long max_periods = 0;

    static DetectorSpec make_baseline(BaselineKind k);
    static DetectorSpec make_las(Schedule sched, InitialKind init, std::string label = "");
};

struct SimConfig {
    long trials = 0;         // exactly one of trials / target_errors is set
    long target_errors = 0;  // stop after this many vector errors per detector
    long max_trials = 0;     // cap in target_errors mode; 0 -> 2^26
    std::uint64_t seed = 0;
    double sigma = -1.0;
    std::vector<DetectorSpec> detectors;
    bool common_randomness = true;
    int threads = 0;  // worker cap; results are identical for any value
};

struct UserStat {
    int user = 0;  // 0-based
    double snr_db = 0.0;
    long bit_errors = 0;
    double ber = 0.0;
    double se = 0.0;
};

struct SimResult {
    std::string label;
    long trials = 0;
    std::vector<UserStat> per_user;
    long vector_errors = 0;
    double ver = 0.0;
    double ver_se = 0.0;
    double bfr = 0.0;  // mean flips per bit, c = E(M)/K
    double mean_steps = 0.0;
    long convergence_failures = 0;
};

/// Monte Carlo BER/VER estimation. Per-trial randomness is a pure function
/// of (seed, trial), accumulation is in integer counts, and target_errors
/// stops on fixed-size chunk boundaries, so the result is bit-identical for
/// any thread count. Convergence failures are counted, never fatal.
std::vector<SimResult> estimate(const Channel& ch, const SimConfig& cfg);

/// Straight-loop reference implementation; must match estimate() bit for bit.
std::vector<SimResult> estimate_serial(const Channel& ch, const SimConfig& cfg);

struct AuditConfig {
    long samples = 10000;
    std::uint64_t seed = 1;
    double sigma = 0.5;  // used by suites that fix the noise level
    int threads = 0;
};

struct AuditReport {
    std::string suite;
    long checks = 0;
    long violations = 0;
    std::vector<std::string> details;  // first few violation descriptions
};

/// Randomized runs with trace retention: counts likelihood-descent events
/// (df < -1e-9 max(1,|f|)), non-strict ascent on flip steps, gradient drift
/// beyond 1e-9, and convergence failures.
AuditReport audit_ascent(const Channel& ch, const AuditConfig& cfg);

/// K <= 4 only: per sampled y enumerates all 2^K initials for SLAS and PLAS
/// and checks the fixed-point-set dualities, region membership of every
/// returned fixed point, and the unique-fixed-point condition.
AuditReport audit_regions(const Channel& ch, const AuditConfig& cfg);

/// Randomized (b, eps, y) sweeps with y rejection-sampled inside the region
/// of b - 2 eps: region membership must imply the half-space inequality,
/// and for decomposable admissible eps some indecomposable sub-vector found
/// by brute-force split search must satisfy it too.
AuditReport audit_containment(const Channel& ch, const AuditConfig& cfg);

/// Common-randomness comparison: the vector error rate of a SLAS run is at
/// most its initial detector's, up to 3 pooled standard errors. Checked for
/// MF, decorrelator and random initials.
AuditReport audit_error_monotonicity(const Channel& ch, const AuditConfig& cfg);

}  // namespace lasmud
