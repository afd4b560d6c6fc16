#include "softtri/session_store.hpp"

#include "softtri/error.hpp"
#include "softtri/json_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace softtri {

namespace fs = std::filesystem;

namespace {

std::string random_hex(std::size_t length)
{
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s(length, '0');
    for (char& c : s) {
        c = kDigits[rng() & 0xF];
    }
    return s;
}

std::string utc_now()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool valid_session_id(std::string_view id)
{
    return !id.empty() && id.size() <= 64 && std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    });
}

} // namespace

Question normalize_question(Question q)
{
    if (q.domain_kind == DomainKind::probability) {
        q.lo = 0.0;
        q.hi = 1.0;
        return q;
    }
    if (!std::isfinite(q.lo) || !std::isfinite(q.hi) || !(q.lo < q.hi)) {
        throw Error(ErrorCode::InvalidQuestion, "question bounds must satisfy lo < hi");
    }
    return q;
}

const Question* Session::find_question(std::string_view question_id) const noexcept
{
    auto it = std::find_if(questions.begin(), questions.end(),
                           [&](const Question& q) { return q.question_id == question_id; });
    return it == questions.end() ? nullptr : &*it;
}

std::vector<std::string> Session::experts() const
{
    std::set<std::string> ids;
    for (const auto& [key, e] : estimates) {
        ids.insert(key.second);
    }
    return {ids.begin(), ids.end()};
}

std::vector<ExpertEstimate> Session::estimates_for(std::string_view question_id) const
{
    std::vector<ExpertEstimate> out;
    for (const auto& [key, e] : estimates) {
        if (key.first == question_id) {
            out.push_back(e);
        }
    }
    return out;
}

Session make_session(std::vector<Question> questions, std::string session_id, std::string created_at)
{
    if (questions.empty()) {
        throw Error(ErrorCode::NoQuestions, "a session needs at least one question");
    }
    if (!valid_session_id(session_id)) {
        throw Error(ErrorCode::InvalidRequest, "session ids use [A-Za-z0-9_-], at most 64 characters");
    }
    Session s;
    s.session_id = std::move(session_id);
    s.created_at = std::move(created_at);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        Question q = normalize_question(std::move(questions[i]));
        if (q.question_id.empty()) {
            q.question_id = "q" + std::to_string(i + 1);
        }
        if (!seen.insert(q.question_id).second) {
            throw Error(ErrorCode::InvalidQuestion, "duplicate question id " + q.question_id);
        }
        s.questions.push_back(std::move(q));
    }
    return s;
}

void apply_estimate(Session& session, std::string_view question_id, const ExpertEstimate& estimate)
{
    if (session.status != SessionStatus::open) {
        throw Error(ErrorCode::SessionClosed, "session " + session.session_id + " is closed");
    }
    const Question* q = session.find_question(question_id);
    if (q == nullptr) {
        throw Error(ErrorCode::UnknownQuestion, "unknown question " + std::string(question_id));
    }
    if (estimate.expert_id.empty()) {
        throw Error(ErrorCode::InvalidRequest, "expert_id must not be empty");
    }
    // Re-run the estimate rules so callers cannot bypass them.
    ExpertEstimate e = make_estimate(estimate.expert_id, estimate.params, estimate.weight, estimate.variant_choice);
    if (e.params.low() < q->lo || e.params.high() > q->hi) {
        std::ostringstream msg;
        msg << "estimate [" << e.params.low() << ", " << e.params.high() << "] leaves question bounds ["
            << q->lo << ", " << q->hi << "]";
        throw Error(ErrorCode::BoundsViolation, msg.str());
    }
    session.estimates.insert_or_assign({std::string(question_id), e.expert_id}, std::move(e));
}

SessionStore::SessionStore(fs::path data_dir) : data_dir_(std::move(data_dir))
{
    std::error_code ec;
    fs::create_directories(data_dir_, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create data directory " + data_dir_.string() + ": " + ec.message());
    }
    for (const auto& entry : fs::directory_iterator(data_dir_)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") {
            continue;
        }
        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        Session s;
        try {
            s = json_io::session_from_json(json_io::parse(buf.str()));
        } catch (const Error& e) {
            throw Error(ErrorCode::IoError, "corrupt session file " + entry.path().string() + ": " + e.what());
        }
        auto slot = std::make_shared<Entry>();
        slot->session = std::move(s);
        sessions_.emplace(slot->session.session_id, std::move(slot));
    }
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& session_id) const
{
    std::shared_lock lock(map_mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) {
        throw Error(ErrorCode::UnknownSession, "unknown session " + session_id);
    }
    return it->second;
}

void SessionStore::persist(const Session& session) const
{
    const fs::path target = data_dir_ / (session.session_id + ".json");
    const fs::path temp = data_dir_ / (session.session_id + ".json.tmp-" + random_hex(8));
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        out << json_io::dump_session(session);
        out.flush();
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot write " + temp.string());
        }
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        fs::remove(temp, ec);
        throw Error(ErrorCode::IoError, "cannot replace " + target.string());
    }
}

Session SessionStore::create_session(std::vector<Question> questions)
{
    auto slot = std::make_shared<Entry>();
    std::unique_lock lock(map_mutex_);
    std::string id;
    do {
        id = random_hex(16);
    } while (sessions_.count(id) != 0);
    slot->session = make_session(std::move(questions), id, utc_now());
    persist(slot->session);
    sessions_.emplace(id, slot);
    return slot->session;
}

Session SessionStore::submit_estimate(const std::string& session_id,
                                      const std::string& question_id,
                                      const ExpertEstimate& estimate)
{
    auto slot = find(session_id);
    std::lock_guard lock(slot->mutex);
    Session updated = slot->session;
    apply_estimate(updated, question_id, estimate);
    persist(updated);
    slot->session = std::move(updated);
    return slot->session;
}

Session SessionStore::close_session(const std::string& session_id)
{
    auto slot = find(session_id);
    std::lock_guard lock(slot->mutex);
    if (slot->session.status == SessionStatus::closed) {
        throw Error(ErrorCode::SessionClosed, "session " + session_id + " is already closed");
    }
    Session updated = slot->session;
    updated.status = SessionStatus::closed;
    persist(updated);
    slot->session = std::move(updated);
    return slot->session;
}

Session SessionStore::get_session(const std::string& session_id) const
{
    auto slot = find(session_id);
    std::lock_guard lock(slot->mutex);
    return slot->session;
}

std::vector<std::string> SessionStore::session_ids() const
{
    std::shared_lock lock(map_mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, slot] : sessions_) {
        ids.push_back(id);
    }
    return ids;
}

PooledDensity SessionStore::get_aggregate(const std::string& session_id,
                                          const std::string& question_id,
                                          bool weighted,
                                          std::size_t n_points) const
{
    const Session s = get_session(session_id);
    if (s.find_question(question_id) == nullptr) {
        throw Error(ErrorCode::UnknownQuestion, "unknown question " + question_id);
    }
    const auto estimates = s.estimates_for(question_id);
    if (estimates.empty()) {
        throw Error(ErrorCode::NoEstimates, "question " + question_id + " has no estimates yet");
    }
    return aggregate(estimates, weighted, n_points);
}

std::string SessionStore::export_session(const std::string& session_id) const
{
    return json_io::dump_session(get_session(session_id));
}

Session SessionStore::import_session(std::string_view document)
{
    Session s = json_io::session_from_json(json_io::parse(document));
    std::unique_lock lock(map_mutex_);
    auto& slot = sessions_[s.session_id];
    if (!slot) {
        slot = std::make_shared<Entry>();
    }
    std::lock_guard entry_lock(slot->mutex);
    persist(s);
    slot->session = s;
    return s;
}

} // namespace softtri
