#include "softtri/json_io.hpp"

#include "softtri/error.hpp"

namespace softtri::json_io {

namespace {

const json& member(const json& j, const char* key)
{
    if (!j.is_object()) {
        throw Error(ErrorCode::InvalidRequest, std::string("expected a JSON object holding \"") + key + "\"");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw Error(ErrorCode::InvalidRequest, std::string("missing field \"") + key + "\"");
    }
    return *it;
}

double number(const json& j, const char* key)
{
    const json& v = member(j, key);
    if (!v.is_number()) {
        throw Error(ErrorCode::InvalidRequest, std::string("field \"") + key + "\" must be a number");
    }
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback)
{
    return j.contains(key) ? number(j, key) : fallback;
}

std::string text(const json& j, const char* key)
{
    const json& v = member(j, key);
    if (!v.is_string()) {
        throw Error(ErrorCode::InvalidRequest, std::string("field \"") + key + "\" must be a string");
    }
    return v.get<std::string>();
}

std::string_view variant_name(VariantChoice v)
{
    return v == VariantChoice::sharp ? "sharp" : "wide";
}

VariantChoice variant_from(const std::string& s)
{
    if (s == "sharp") {
        return VariantChoice::sharp;
    }
    if (s == "wide") {
        return VariantChoice::wide;
    }
    throw Error(ErrorCode::InvalidRequest, "variant_choice must be \"sharp\" or \"wide\"");
}

std::pair<double, double> support_pair(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error(ErrorCode::InvalidRequest, "support/bounds must be a [lo, hi] pair of numbers");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

json to_json(const SoftTriangleParams& p)
{
    return json{{"low", p.low()}, {"median", p.median()}, {"high", p.high()}, {"phi", p.phi()}};
}

SoftTriangleParams params_from_json(const json& j)
{
    return validate_params(number(j, "low"), number(j, "median"), number(j, "high"), number(j, "phi"));
}

json to_json(const ExpertEstimate& e)
{
    return json{{"expert_id", e.expert_id},
                {"params", to_json(e.params)},
                {"weight", e.weight},
                {"variant_choice", variant_name(e.variant_choice)}};
}

ExpertEstimate estimate_from_json(const json& j)
{
    const VariantChoice variant = j.contains("variant_choice") ? variant_from(text(j, "variant_choice"))
                                                               : VariantChoice::wide;
    const json& raw = member(j, "params");
    // A sharp choice pins phi to 1, so phi may be omitted.
    const double phi = (variant == VariantChoice::sharp && !raw.contains("phi")) ? 1.0 : number(raw, "phi");
    const auto params = validate_params(number(raw, "low"), number(raw, "median"), number(raw, "high"), phi);
    return make_estimate(text(j, "expert_id"), params, number_or(j, "weight", 1.0), variant);
}

json to_json(const Question& q)
{
    return json{{"question_id", q.question_id},
                {"prompt", q.prompt},
                {"domain_kind", q.domain_kind == DomainKind::probability ? "probability" : "utility"},
                {"bounds", json::array({q.lo, q.hi})},
                {"scenario_label", q.scenario_label ? json(*q.scenario_label) : json(nullptr)}};
}

Question question_from_json(const json& j)
{
    Question q;
    q.question_id = j.contains("question_id") ? text(j, "question_id") : std::string();
    q.prompt = j.contains("prompt") ? text(j, "prompt") : std::string();
    const std::string kind = j.contains("domain_kind") ? text(j, "domain_kind") : "probability";
    if (kind == "probability") {
        q.domain_kind = DomainKind::probability;
    } else if (kind == "utility") {
        q.domain_kind = DomainKind::utility;
    } else {
        throw Error(ErrorCode::InvalidQuestion, "domain_kind must be \"probability\" or \"utility\"");
    }
    if (j.contains("bounds")) {
        std::tie(q.lo, q.hi) = support_pair(j.at("bounds"));
    } else if (q.domain_kind == DomainKind::utility) {
        throw Error(ErrorCode::InvalidQuestion, "utility questions need bounds");
    }
    if (j.contains("scenario_label") && !j.at("scenario_label").is_null()) {
        q.scenario_label = text(j, "scenario_label");
    }
    return q;
}

json to_json(const Session& s)
{
    json questions = json::array();
    for (const auto& q : s.questions) {
        questions.push_back(to_json(q));
    }
    json estimates = json::array();
    for (const auto& [key, e] : s.estimates) {
        json row = to_json(e);
        row["question_id"] = key.first;
        estimates.push_back(std::move(row));
    }
    return json{{"session_id", s.session_id},
                {"status", s.status == SessionStatus::open ? "open" : "closed"},
                {"created_at", s.created_at},
                {"questions", std::move(questions)},
                {"estimates", std::move(estimates)}};
}

Session session_from_json(const json& j)
{
    std::vector<Question> questions;
    const json& qs = member(j, "questions");
    if (!qs.is_array()) {
        throw Error(ErrorCode::InvalidRequest, "questions must be an array");
    }
    for (const auto& q : qs) {
        questions.push_back(question_from_json(q));
    }
    Session s = make_session(std::move(questions), text(j, "session_id"), text(j, "created_at"));
    const json& es = member(j, "estimates");
    if (!es.is_array()) {
        throw Error(ErrorCode::InvalidRequest, "estimates must be an array");
    }
    for (const auto& row : es) {
        apply_estimate(s, text(row, "question_id"), estimate_from_json(row));
    }
    const std::string status = text(j, "status");
    if (status == "closed") {
        s.status = SessionStatus::closed;
    } else if (status != "open") {
        throw Error(ErrorCode::InvalidRequest, "status must be \"open\" or \"closed\"");
    }
    return s;
}

std::string dump_session(const Session& s)
{
    return to_json(s).dump(2) + "\n";
}

GriddedDensity factor_from_json(const json& j, std::size_t n_points)
{
    if (!j.is_object()) {
        throw Error(ErrorCode::InvalidRequest, "factor must be a JSON object");
    }
    std::string kind = j.contains("kind") ? text(j, "kind") : "soft";
    if (kind == "grid") {
        const json& vals = member(j, "values");
        if (!vals.is_array()) {
            throw Error(ErrorCode::InvalidRequest, "grid values must be an array");
        }
        std::vector<double> values;
        values.reserve(vals.size());
        for (const auto& v : vals) {
            if (!v.is_number()) {
                throw Error(ErrorCode::InvalidRequest, "grid values must be numbers");
            }
            values.push_back(v.get<double>());
        }
        return GriddedDensity(number(j, "lo"), number(j, "hi"), std::move(values));
    }
    std::optional<std::pair<double, double>> support;
    if (j.contains("support")) {
        support = support_pair(j.at("support"));
    }
    if (kind == "soft") {
        return to_grid(params_from_json(j), n_points, support);
    }
    if (kind == "triangular") {
        return to_grid(TriangularParams::validate(number(j, "low"), number(j, "mode"), number(j, "high")),
                       n_points, support);
    }
    if (kind == "beta") {
        return to_grid(BetaParams::validate(number(j, "a"), number(j, "b")), n_points, support);
    }
    throw Error(ErrorCode::InvalidRequest, "unknown factor kind \"" + kind + "\"");
}

json grid_to_json(const GriddedDensity& g)
{
    json xs = json::array();
    json ds = json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        xs.push_back(g.x(i));
        ds.push_back(g[i]);
    }
    return json{{"x", std::move(xs)}, {"density", std::move(ds)}};
}

json pooled_to_json(const PooledDensity& pooled)
{
    json out = grid_to_json(pooled.grid);
    out["contributors"] = pooled.contributor_ids;
    out["modes"] = pooled.mode_locations;
    return out;
}

json product_to_json(const ProductResult& r)
{
    json ts = json::array();
    json cs = json::array();
    json ds = json::array();
    for (std::size_t i = 0; i < r.cdf.size(); ++i) {
        ts.push_back(r.cdf[i].t);
        cs.push_back(r.cdf[i].cdf);
        ds.push_back(r.density[i]);
    }
    return json{{"t", std::move(ts)}, {"cdf", std::move(cs)}, {"density", std::move(ds)},
                {"raw_mass", r.raw_mass}};
}

json parse(std::string_view text)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidRequest, std::string("malformed JSON: ") + e.what());
    }
}

} // namespace softtri::json_io
