#pragma once

#include <string>

#include <json.hpp>

#include "votelab/bounds.hpp"
#include "votelab/extrapolate.hpp"
#include "votelab/stats.hpp"

namespace votelab {

using Json = nlohmann::ordered_json;

// Undefined (NaN) fields serialize as null.
Json to_json(const EnsembleStats& stats);
Json to_json(const BoundReport& report);
Json to_json(const SubsampleStats& sub);
Json to_json(const GrowthCurve& curve);
Json to_json(const CltCheck& check);

EnsembleStats stats_from_json(const Json& j);

/// Aligned plain-text table, one bound per line.
std::string bounds_table(const BoundReport& report);

/// Columns N,pred_conj,pred_meas,pred_disg,actual_mv; missing actual_mv is
/// an empty cell.
std::string growth_curve_csv(const GrowthCurve& curve);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

}  // namespace votelab
