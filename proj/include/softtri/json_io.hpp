#pragma once

// JSON forms shared by the session store, the HTTP service and the CLI.

#include "softtri/aggregation.hpp"
#include "softtri/distributions.hpp"
#include "softtri/grid.hpp"
#include "softtri/risk_product.hpp"
#include "softtri/session_store.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace softtri::json_io {

using nlohmann::json;

// {"low", "median", "high", "phi"}
json to_json(const SoftTriangleParams& p);
SoftTriangleParams params_from_json(const json& j);

// {"expert_id", "params", "weight", "variant_choice"}; question_id is not
// part of an estimate and is ignored when present.
json to_json(const ExpertEstimate& e);
ExpertEstimate estimate_from_json(const json& j);

json to_json(const Question& q);
Question question_from_json(const json& j);

json to_json(const Session& s);
Session session_from_json(const json& j);

/// Canonical serialized session; keys sorted, estimates ordered by
/// (question_id, expert_id).
std::string dump_session(const Session& s);

/// A factor for gridding. Accepted forms:
///   {"low", "median", "high", "phi"}              soft triangle
///   {"kind": "soft", "low", "median", "high", "phi"}
///   {"kind": "triangular", "low", "mode", "high"}
///   {"kind": "beta", "a", "b"}
///   {"kind": "grid", "lo", "hi", "values": [...]}
/// with an optional "support": [lo, hi] override for the analytic kinds.
GriddedDensity factor_from_json(const json& j, std::size_t n_points);

/// {"x": [...], "density": [...]}
json grid_to_json(const GriddedDensity& g);

json pooled_to_json(const PooledDensity& pooled);
json product_to_json(const ProductResult& r);

/// Parses text, mapping syntax errors to Error(InvalidRequest).
json parse(std::string_view text);

} // namespace softtri::json_io
