#pragma once

// Elicitation sessions: questions, per-expert estimates, and their durable
// storage as one key-sorted JSON document per session.

#include "softtri/aggregation.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace softtri {

enum class DomainKind { probability, utility };

struct Question {
    std::string question_id;
    std::string prompt;
    DomainKind domain_kind = DomainKind::probability;
    double lo = 0.0;
    double hi = 1.0;
    std::optional<std::string> scenario_label;  // countermeasure context
};

/// Forces probability bounds to [0, 1]; requires finite lo < hi otherwise.
/// Throws Error(InvalidQuestion).
Question normalize_question(Question q);

enum class SessionStatus { open, closed };

struct Session {
    std::string session_id;
    std::vector<Question> questions;
    // Keyed by (question_id, expert_id).
    std::map<std::pair<std::string, std::string>, ExpertEstimate> estimates;
    SessionStatus status = SessionStatus::open;
    std::string created_at;  // ISO-8601 UTC

    const Question* find_question(std::string_view question_id) const noexcept;
    std::vector<std::string> experts() const;
    std::vector<ExpertEstimate> estimates_for(std::string_view question_id) const;
};

/// Builds a session in memory without persisting it. Fills in missing
/// question ids as q1, q2, ... Throws NoQuestions or InvalidQuestion.
Session make_session(std::vector<Question> questions, std::string session_id, std::string created_at);

/// Applies one estimate with the store's validation and replacement rules.
/// Throws SessionClosed, UnknownQuestion or BoundsViolation.
void apply_estimate(Session& session, std::string_view question_id, const ExpertEstimate& estimate);

class SessionStore {
public:
    /// Opens (creating if needed) the data directory and loads every
    /// `<id>.json` document in it.
    explicit SessionStore(std::filesystem::path data_dir);

    SessionStore(const SessionStore&) = delete;
    SessionStore& operator=(const SessionStore&) = delete;

    Session create_session(std::vector<Question> questions);
    Session submit_estimate(const std::string& session_id,
                            const std::string& question_id,
                            const ExpertEstimate& estimate);
    Session close_session(const std::string& session_id);

    Session get_session(const std::string& session_id) const;
    std::vector<std::string> session_ids() const;

    PooledDensity get_aggregate(const std::string& session_id,
                                const std::string& question_id,
                                bool weighted,
                                std::size_t n_points = kDefaultGridPoints) const;

    /// Canonical key-sorted JSON document of the session.
    std::string export_session(const std::string& session_id) const;

    /// Stores a previously exported document (replacing a session with the
    /// same id) and returns it.
    Session import_session(std::string_view document);

    const std::filesystem::path& data_dir() const noexcept { return data_dir_; }

private:
    struct Entry {
        mutable std::mutex mutex;
        Session session;
    };

    std::shared_ptr<Entry> find(const std::string& session_id) const;
    void persist(const Session& session) const;

    std::filesystem::path data_dir_;
    mutable std::shared_mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

} // namespace softtri
