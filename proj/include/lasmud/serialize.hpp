#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "lasmud/bounds.hpp"
#include "lasmud/channel.hpp"
#include "lasmud/error_vectors.hpp"
#include "lasmud/montecarlo.hpp"
#include "lasmud/schedule.hpp"

namespace lasmud {

inline constexpr const char* kVersion = "0.1.0";

/// {K, A: [..], R: [[..]] row-major, sigma?, S?: {N, columns}}
nlohmann::json channel_to_json(const Channel& ch, std::optional<double> sigma = {});
Channel channel_from_json(const nlohmann::json& j);

/// {kind, groups?: [[1-based indices]], order?: [1-based indices]}
nlohmann::json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(const nlohmann::json& j, int K);

/// {fingerprint, K, count, max_count, vectors: [{support, signs}], by_user}
nlohmann::json indecomposable_to_json(const IndecomposableSet& F);
/// Rejects a fingerprint that does not match `ch`.
IndecomposableSet indecomposable_from_json(const nlohmann::json& j, const Channel& ch);

nlohmann::json bound_report_to_json(const BoundReport& r);
nlohmann::json ame_report_to_json(const std::vector<UserAme>& r, DetectorTag tag);
nlohmann::json sim_results_to_json(const std::vector<SimResult>& results);

/// Full-precision scientific notation used in every CSV cell.
std::string format_double(double v);

}  // namespace lasmud
