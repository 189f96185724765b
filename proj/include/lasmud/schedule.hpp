#pragma once

#include <string>
#include <vector>

#include "lasmud/channel.hpp"

namespace lasmud {

enum class ScheduleKind { SlasCircular, SlasOrdered, Wslas, Gplas, Plas, Custom };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& s);

/// A periodic sequence of candidate index sets L(0..P-1). Every user index
/// must appear in at least one set per period. Indices are 0-based in
/// memory, 1-based in serialized form.
struct Schedule {
    ScheduleKind kind = ScheduleKind::Custom;
    int K = 0;
    std::vector<std::vector<int>> period;

    int period_length() const { return static_cast<int>(period.size()); }
};

Schedule make_slas_circular(int K);
Schedule make_slas_ordered(const std::vector<int>& order);        // a permutation of 0..K-1
Schedule make_wslas(int K, const std::vector<int>& order);        // singletons, repeats allowed
Schedule make_gplas(int K, const std::vector<std::vector<int>>& groups);  // a partition
Schedule make_plas(int K);
Schedule make_custom(int K, const std::vector<std::vector<int>>& sets);

enum class ThresholdRegime { ExactTimeInvariant, ConservativePeriodMax };

/// Per-user thresholds t_k, together with how they were obtained. For
/// time-invariant schedules these are the exact update-rule thresholds;
/// otherwise the per-user period maximum, which over-covers the region and
/// keeps every derived bound a valid upper bound.
struct ThresholdVector {
    Eigen::VectorXd t;
    ThresholdRegime regime = ThresholdRegime::ExactTimeInvariant;
};

/// t_k = sum_{j in L} |H_kj| for each k in L (the j = k term contributes
/// A_k^2). Returned in the order of L.
std::vector<double> thresholds_for_set(const Channel& ch, const std::vector<int>& L);

/// Effective per-user thresholds of a schedule. Exact when every user sees
/// a single distinct candidate-set shape per period (SLAS/WSLAS/GPLAS/PLAS);
/// conservative per-user maximum otherwise.
ThresholdVector effective_thresholds(const Channel& ch, const Schedule& sched);

}  // namespace lasmud
