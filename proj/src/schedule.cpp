#include "lasmud/schedule.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace lasmud {

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::SlasCircular: return "slas-circular";
        case ScheduleKind::SlasOrdered: return "slas-ordered";
        case ScheduleKind::Wslas: return "wslas";
        case ScheduleKind::Gplas: return "gplas";
        case ScheduleKind::Plas: return "plas";
        case ScheduleKind::Custom: return "custom";
    }
    return "custom";
}

ScheduleKind schedule_kind_from_string(const std::string& s) {
    if (s == "slas-circular") return ScheduleKind::SlasCircular;
    if (s == "slas-ordered") return ScheduleKind::SlasOrdered;
    if (s == "wslas") return ScheduleKind::Wslas;
    if (s == "gplas") return ScheduleKind::Gplas;
    if (s == "plas") return ScheduleKind::Plas;
    if (s == "custom") return ScheduleKind::Custom;
    throw std::invalid_argument("unknown schedule kind '" + s + "'");
}

namespace {

void validate_schedule(const Schedule& s) {
    if (s.K < 1) throw std::invalid_argument("schedule needs K >= 1");
    if (s.period.empty()) throw std::invalid_argument("schedule period is empty");
    std::vector<char> seen(s.K, 0);
    for (const auto& L : s.period) {
        if (L.empty()) throw std::invalid_argument("candidate sets must be nonempty");
        std::set<int> uniq;
        for (int k : L) {
            if (k < 0 || k >= s.K) throw std::invalid_argument("user index out of range");
            if (!uniq.insert(k).second)
                throw std::invalid_argument("duplicate index inside a candidate set");
            seen[k] = 1;
        }
    }
    for (int k = 0; k < s.K; ++k)
        if (!seen[k])
            throw std::invalid_argument("user " + std::to_string(k + 1) +
                                        " never scheduled in the period");

    const bool all_singletons = std::all_of(s.period.begin(), s.period.end(),
                                            [](const auto& L) { return L.size() == 1; });
    switch (s.kind) {
        case ScheduleKind::SlasCircular:
        case ScheduleKind::SlasOrdered:
        case ScheduleKind::Wslas:
            if (!all_singletons)
                throw std::invalid_argument("sequential schedules must use singleton sets");
            break;
        case ScheduleKind::Plas:
            if (s.period.size() != 1 || static_cast<int>(s.period[0].size()) != s.K)
                throw std::invalid_argument("parallel schedule must be the single full set");
            break;
        case ScheduleKind::Gplas: {
            std::vector<char> hits(s.K, 0);
            for (const auto& L : s.period)
                for (int k : L) {
                    if (hits[k]) throw std::invalid_argument("groups must partition the users");
                    hits[k] = 1;
                }
            break;
        }
        case ScheduleKind::Custom:
            break;
    }
}

}  // namespace

Schedule make_slas_circular(int K) {
    Schedule s;
    s.kind = ScheduleKind::SlasCircular;
    s.K = K;
    for (int k = 0; k < K; ++k) s.period.push_back({k});
    validate_schedule(s);
    return s;
}

Schedule make_slas_ordered(const std::vector<int>& order) {
    Schedule s;
    s.kind = ScheduleKind::SlasOrdered;
    s.K = static_cast<int>(order.size());
    std::vector<char> seen(s.K, 0);
    for (int k : order) {
        if (k < 0 || k >= s.K || seen[k])
            throw std::invalid_argument("order must be a permutation of the users");
        seen[k] = 1;
        s.period.push_back({k});
    }
    validate_schedule(s);
    return s;
}

Schedule make_wslas(int K, const std::vector<int>& order) {
    Schedule s;
    s.kind = ScheduleKind::Wslas;
    s.K = K;
    for (int k : order) s.period.push_back({k});
    validate_schedule(s);
    return s;
}

Schedule make_gplas(int K, const std::vector<std::vector<int>>& groups) {
    Schedule s;
    s.kind = ScheduleKind::Gplas;
    s.K = K;
    s.period = groups;
    validate_schedule(s);
    return s;
}

Schedule make_plas(int K) {
    Schedule s;
    s.kind = ScheduleKind::Plas;
    s.K = K;
    s.period.emplace_back();
    for (int k = 0; k < K; ++k) s.period[0].push_back(k);
    validate_schedule(s);
    return s;
}

Schedule make_custom(int K, const std::vector<std::vector<int>>& sets) {
    Schedule s;
    s.kind = ScheduleKind::Custom;
    s.K = K;
    s.period = sets;
    validate_schedule(s);
    return s;
}

std::vector<double> thresholds_for_set(const Channel& ch, const std::vector<int>& L) {
    if (L.empty()) throw std::invalid_argument("candidate set is empty");
    std::vector<double> t(L.size(), 0.0);
    for (std::size_t i = 0; i < L.size(); ++i) {
        double sum = 0.0;
        for (int j : L) sum += std::abs(ch.H(L[i], j));
        t[i] = sum;
    }
    return t;
}

ThresholdVector effective_thresholds(const Channel& ch, const Schedule& sched) {
    validate_schedule(sched);
    ThresholdVector tv;
    tv.t = Eigen::VectorXd::Zero(sched.K);
    std::vector<std::set<std::vector<int>>> shapes(sched.K);

    for (const auto& L : sched.period) {
        std::vector<int> sorted = L;
        std::sort(sorted.begin(), sorted.end());
        const auto t = thresholds_for_set(ch, L);
        for (std::size_t i = 0; i < L.size(); ++i) {
            const int k = L[i];
            tv.t[k] = std::max(tv.t[k], t[i]);
            shapes[k].insert(sorted);
        }
    }
    const bool time_invariant =
        std::all_of(shapes.begin(), shapes.end(),
                    [](const auto& s) { return s.size() == 1; });
    tv.regime = time_invariant ? ThresholdRegime::ExactTimeInvariant
                               : ThresholdRegime::ConservativePeriodMax;
    return tv;
}

}  // namespace lasmud
