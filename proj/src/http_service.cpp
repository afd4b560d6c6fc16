#include "softtri/http_service.hpp"

#include "softtri/distributions.hpp"
#include "softtri/json_io.hpp"
#include "softtri/risk_product.hpp"

#include <httplib.h>

#include <cerrno>
#include <cstdlib>
#include <functional>
#include <map>

namespace softtri {

using json_io::json;

namespace {

constexpr const char* kJson = "application/json";
constexpr std::size_t kMaxGridPoints = 200001;

double query_number(const httplib::Request& req, const char* key)
{
    if (!req.has_param(key)) {
        throw Error(ErrorCode::InvalidRequest, std::string("missing query parameter ") + key);
    }
    const std::string raw = req.get_param_value(key);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(raw.c_str(), &end);
    if (raw.empty() || end != raw.c_str() + raw.size() || errno == ERANGE) {
        throw Error(ErrorCode::InvalidRequest, std::string("query parameter ") + key + " is not a number");
    }
    return v;
}

std::size_t query_points(const httplib::Request& req, std::size_t fallback)
{
    if (!req.has_param("n")) {
        return fallback;
    }
    const double v = query_number(req, "n");
    if (v != static_cast<double>(static_cast<long long>(v)) || v < 0) {
        throw Error(ErrorCode::InvalidRequest, "n must be a non-negative integer");
    }
    if (v < static_cast<double>(kMinGridPoints)) {
        throw Error(ErrorCode::GridTooCoarse, "grid needs at least 64 points");
    }
    if (v > static_cast<double>(kMaxGridPoints)) {
        throw Error(ErrorCode::InvalidRequest, "n is too large");
    }
    return static_cast<std::size_t>(v);
}

bool query_flag(const httplib::Request& req, const char* key)
{
    if (!req.has_param(key)) {
        return false;
    }
    const std::string v = req.get_param_value(key);
    if (v == "true" || v == "1") {
        return true;
    }
    if (v == "false" || v == "0") {
        return false;
    }
    throw Error(ErrorCode::InvalidRequest, std::string("query parameter ") + key + " must be true or false");
}

void reply(httplib::Response& res, int status, const json& body)
{
    res.status = status;
    res.set_content(body.dump(), kJson);
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

// Maps every failure onto an ApiError body.
Handler guarded(Handler inner)
{
    return [inner = std::move(inner)](const httplib::Request& req, httplib::Response& res) {
        try {
            inner(req, res);
        } catch (const Error& e) {
            res.status = http_status(e.code());
            res.set_content(api_error_body(e.code(), e.what()), kJson);
        } catch (const json::exception& e) {
            res.status = 400;
            res.set_content(api_error_body(ErrorCode::InvalidRequest, e.what()), kJson);
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(api_error_body(ErrorCode::Internal, e.what()), kJson);
        }
    };
}

json estimate_summary(const Session& s, const std::string& question_id, const std::string& expert_id)
{
    std::map<std::string, int> counts;
    for (const auto& q : s.questions) {
        counts[q.question_id] = 0;
    }
    for (const auto& [key, e] : s.estimates) {
        ++counts[key.first];
    }
    return json{{"session_id", s.session_id},
                {"status", s.status == SessionStatus::open ? "open" : "closed"},
                {"question_id", question_id},
                {"expert_id", expert_id},
                {"estimate_counts", counts},
                {"experts", s.experts()}};
}

} // namespace

int http_status(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownQuestion:
        return 404;
    case ErrorCode::SessionClosed:
    case ErrorCode::NoEstimates:
        return 409;
    case ErrorCode::IoError:
    case ErrorCode::Internal:
        return 500;
    default:
        return 400;
    }
}

std::string api_error_body(ErrorCode code, const std::string& message)
{
    return json{{"code", to_string(code)}, {"message", message}, {"details", nullptr}}.dump();
}

HttpService::HttpService(SessionStore& store, ServiceConfig config)
    : store_(store), config_(std::move(config)), server_(std::make_unique<httplib::Server>())
{
    install_routes();
}

HttpService::~HttpService()
{
    stop();
}

void HttpService::install_routes()
{
    auto& srv = *server_;
    const std::string session = R"(/api/v1/sessions/([A-Za-z0-9_-]+))";
    const std::string question = session + R"(/questions/([^/]+))";

    srv.Post("/api/v1/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const json body = json_io::parse(req.body);
        if (!body.is_object() || !body.contains("questions") || !body.at("questions").is_array()) {
            throw Error(ErrorCode::InvalidRequest, "body must be {\"questions\": [...]}");
        }
        std::vector<Question> questions;
        for (const auto& q : body.at("questions")) {
            questions.push_back(json_io::question_from_json(q));
        }
        reply(res, 201, json_io::to_json(store_.create_session(std::move(questions))));
    }));

    srv.Get(session, guarded([this](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, json_io::to_json(store_.get_session(req.matches[1])));
    }));

    srv.Post(session + "/estimates", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const std::string id = req.matches[1];
        // Unknown ids are reported before body problems.
        store_.get_session(id);
        const json body = json_io::parse(req.body);
        if (!body.is_object() || !body.contains("question_id") || !body.at("question_id").is_string()) {
            throw Error(ErrorCode::InvalidRequest, "estimate needs a string question_id");
        }
        const std::string qid = body.at("question_id").get<std::string>();
        const ExpertEstimate estimate = json_io::estimate_from_json(body);
        const Session updated = store_.submit_estimate(id, qid, estimate);
        reply(res, 200, estimate_summary(updated, qid, estimate.expert_id));
    }));

    srv.Post(session + "/close", guarded([this](const httplib::Request& req, httplib::Response& res) {
        reply(res, 200, json_io::to_json(store_.close_session(req.matches[1])));
    }));

    srv.Get(question + "/aggregate", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const bool weighted = query_flag(req, "weighted");
        const std::size_t n = query_points(req, kDefaultGridPoints);
        reply(res, 200, json_io::pooled_to_json(store_.get_aggregate(req.matches[1], req.matches[2], weighted, n)));
    }));

    // Stateless: reads the question bounds and evaluates the density there.
    srv.Get(question + "/preview", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const Session s = store_.get_session(req.matches[1]);
        const Question* q = s.find_question(std::string(req.matches[2]));
        if (q == nullptr) {
            throw Error(ErrorCode::UnknownQuestion, "unknown question " + std::string(req.matches[2]));
        }
        const auto params = validate_params(query_number(req, "low"), query_number(req, "median"),
                                            query_number(req, "high"), query_number(req, "phi"));
        const std::size_t n = query_points(req, kPreviewGridPoints);
        const std::vector<double> xs = uniform_points(q->lo, q->hi, n);
        json density = json::array();
        for (double x : xs) {
            density.push_back(pdf_soft(params, x));
        }
        reply(res, 200, json{{"x", xs}, {"density", std::move(density)}});
    }));

    srv.Post("/api/v1/risk/product", guarded([](const httplib::Request& req, httplib::Response& res) {
        const json body = json_io::parse(req.body);
        if (!body.is_object()) {
            throw Error(ErrorCode::InvalidRequest, "body must be a JSON object");
        }
        std::size_t n = kProductGridPoints;
        if (body.contains("n")) {
            if (!body.at("n").is_number_unsigned()) {
                throw Error(ErrorCode::InvalidRequest, "n must be a positive integer");
            }
            n = body.at("n").get<std::size_t>();
            if (n > kMaxGridPoints) {
                throw Error(ErrorCode::InvalidRequest, "n is too large");
            }
        }
        auto factor = [&](const char* key) {
            if (!body.contains(key)) {
                throw Error(ErrorCode::InvalidRequest, std::string("missing factor ") + key);
            }
            return json_io::factor_from_json(body.at(key), n);
        };
        RiskSpec spec{factor("c"), factor("v"), factor("t")};
        reply(res, 200, json_io::product_to_json(risk_triple(spec, n)));
    }));

    if (config_.assets_dir && std::filesystem::is_directory(*config_.assets_dir)) {
        srv.set_mount_point("/", config_.assets_dir->string());
    }
}

bool HttpService::listen(const std::string& host, int port)
{
    return server_->listen(host, port);
}

int HttpService::bind_any_port(const std::string& host)
{
    return server_->bind_to_any_port(host);
}

bool HttpService::serve()
{
    return server_->listen_after_bind();
}

void HttpService::stop()
{
    if (server_) {
        server_->stop();
    }
}

bool HttpService::is_running() const
{
    return server_->is_running();
}

} // namespace softtri
