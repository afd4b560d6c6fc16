#pragma once

// JSON-over-HTTP facade for the session store, pooling and risk products.
// All routes live under /api/v1.

#include "softtri/error.hpp"
#include "softtri/session_store.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace softtri {

inline constexpr int kDefaultPort = 8080;
inline constexpr std::size_t kPreviewGridPoints = 257;

/// HTTP status for a module error code.
int http_status(ErrorCode code) noexcept;

/// {"code", "message", "details"}
std::string api_error_body(ErrorCode code, const std::string& message);

struct ServiceConfig {
    std::optional<std::filesystem::path> assets_dir;
};

class HttpService {
public:
    HttpService(SessionStore& store, ServiceConfig config = {});
    ~HttpService();

    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Binds and serves until stop() is called. Returns false when the
    /// address cannot be bound.
    bool listen(const std::string& host, int port);

    /// Binds an ephemeral port and returns it (or -1); call serve() next.
    int bind_any_port(const std::string& host);
    bool serve();

    void stop();
    bool is_running() const;

private:
    void install_routes();

    SessionStore& store_;
    ServiceConfig config_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace softtri
