#include "softtri/cli.hpp"

#include "softtri/aggregation.hpp"
#include "softtri/distributions.hpp"
#include "softtri/error.hpp"
#include "softtri/format.hpp"
#include "softtri/http_service.hpp"
#include "softtri/json_io.hpp"
#include "softtri/risk_product.hpp"
#include "softtri/session_store.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

namespace softtri::cli {

using json_io::json;

namespace {

std::mutex g_server_mutex;
HttpService* g_server = nullptr;

extern "C" void on_signal(int)
{
    // httplib's stop() only flips an atomic and shuts the listening socket.
    if (g_server != nullptr) {
        g_server->stop();
    }
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::InvalidRequest, "cannot read " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return json_io::parse(buf.str());
}

// Writes via `emit` to the named file, or to `fallback` when path is empty.
template <typename Emit>
void write_output(const std::string& path, std::ostream& fallback, Emit emit)
{
    if (path.empty()) {
        emit(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    }
    emit(file);
    if (!file) {
        throw Error(ErrorCode::IoError, "failed writing " + path);
    }
}

std::string env_or(const char* name, std::string fallback)
{
    const char* v = std::getenv(name);
    return (v != nullptr && *v != '\0') ? std::string(v) : std::move(fallback);
}

struct EvalOptions {
    double low = 0, median = 0, high = 0, phi = 1;
    std::optional<double> x;
    std::optional<double> q;
};

void run_eval(const EvalOptions& o, std::ostream& out)
{
    const auto p = validate_params(o.low, o.median, o.high, o.phi);
    if (o.x) {
        out << "pdf " << format_number(pdf_soft(p, *o.x)) << '\n';
        out << "cdf " << format_number(cdf_soft(p, *o.x)) << '\n';
        return;
    }
    if (o.q) {
        out << "quantile " << format_number(quantile_soft(p, *o.q)) << '\n';
        return;
    }
    const auto c = derive_coefficients(p);
    out << "n " << format_number(c.n) << '\n'
        << "w " << format_number(c.w) << '\n'
        << "B " << format_number(c.B) << '\n'
        << "A " << format_number(c.A) << '\n'
        << "alpha " << format_number(c.alpha) << '\n'
        << "peak " << format_number(c.peak) << '\n'
        << "wide_side " << (c.wide_side == WideSide::upper ? "upper" : "lower") << '\n';
}

struct GridOptions {
    std::string params_file;
    std::size_t n = kDefaultGridPoints;
    std::string out;
    std::optional<double> lo;
    std::optional<double> hi;
};

void run_grid(const GridOptions& o, std::ostream& out)
{
    json spec = read_json_file(o.params_file);
    if (o.lo.has_value() != o.hi.has_value()) {
        throw Error(ErrorCode::InvalidRequest, "--lo and --hi must be given together");
    }
    if (o.lo && spec.is_object()) {
        spec["support"] = json::array({*o.lo, *o.hi});
    }
    if (o.n < kMinGridPoints) {
        throw Error(ErrorCode::GridTooCoarse, "grid needs at least 64 points");
    }
    const GriddedDensity grid = json_io::factor_from_json(spec, o.n);
    write_output(o.out, out, [&](std::ostream& s) { write_density_csv(s, grid); });
}

struct AggregateOptions {
    std::string panel_file;
    bool weighted = false;
    std::size_t n = kDefaultGridPoints;
    double prominence = kDefaultModeProminence;
    std::string out;
};

void run_aggregate(const AggregateOptions& o, std::ostream& out)
{
    const json panel = read_json_file(o.panel_file);
    if (!panel.is_array()) {
        throw Error(ErrorCode::InvalidRequest, "panel file must hold a JSON array of estimates");
    }
    std::vector<ExpertEstimate> estimates;
    for (const auto& row : panel) {
        estimates.push_back(json_io::estimate_from_json(row));
    }
    if (o.n < kMinGridPoints) {
        throw Error(ErrorCode::GridTooCoarse, "grid needs at least 64 points");
    }
    const PooledDensity pooled = aggregate(estimates, o.weighted, o.n, o.prominence);
    write_output(o.out, out, [&](std::ostream& s) { write_density_csv(s, pooled.grid); });
    out << "experts " << pooled.contributor_ids.size() << '\n';
    out << "modes " << pooled.mode_locations.size() << '\n';
    for (double m : pooled.mode_locations) {
        out << "mode " << format_number(m) << '\n';
    }
}

struct RiskOptions {
    std::string c_file, v_file, t_file;
    std::size_t n = kProductGridPoints;
    std::string out;
};

void run_risk(const RiskOptions& o, std::ostream& out)
{
    RiskSpec spec{json_io::factor_from_json(read_json_file(o.c_file), o.n),
                  json_io::factor_from_json(read_json_file(o.v_file), o.n),
                  json_io::factor_from_json(read_json_file(o.t_file), o.n)};
    const ProductResult result = risk_triple(spec, o.n);
    write_output(o.out, out, [&](std::ostream& s) { write_product_csv(s, result); });
}

struct ServeOptions {
    std::string host = "0.0.0.0";
    int port = kDefaultPort;
    std::string data_dir;
    std::string assets_dir;
};

int run_serve(const ServeOptions& o, std::ostream& err)
{
    SessionStore store(o.data_dir);
    ServiceConfig config;
    if (!o.assets_dir.empty()) {
        config.assets_dir = o.assets_dir;
    }
    HttpService service(store, config);
    {
        std::lock_guard lock(g_server_mutex);
        g_server = &service;
    }
    auto previous_int = std::signal(SIGINT, on_signal);
    auto previous_term = std::signal(SIGTERM, on_signal);
    err << "listening on " << o.host << ':' << o.port << " (data " << o.data_dir << ")\n";
    err.flush();
    const bool ok = service.listen(o.host, o.port);
    std::signal(SIGINT, previous_int);
    std::signal(SIGTERM, previous_term);
    {
        std::lock_guard lock(g_server_mutex);
        g_server = nullptr;
    }
    if (!ok) {
        err << "error: cannot listen on " << o.host << ':' << o.port << '\n';
        return 1;
    }
    return 0;
}

int exit_code_for(ErrorCode code)
{
    return (code == ErrorCode::IoError || code == ErrorCode::Internal) ? 1 : 2;
}

} // namespace

void request_shutdown()
{
    std::lock_guard lock(g_server_mutex);
    if (g_server != nullptr) {
        g_server->stop();
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Soft-triangle elicitation toolkit", "softtri"};
    app.require_subcommand(1);

    EvalOptions eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate pdf/cdf at x or the quantile at q");
    eval_cmd->add_option("--low", eval.low, "Low extreme")->required();
    eval_cmd->add_option("--median", eval.median, "Median (50-50 point)")->required();
    eval_cmd->add_option("--high", eval.high, "High extreme")->required();
    eval_cmd->add_option("--phi", eval.phi, "Sharpness in (0, 1]")->required();
    auto* x_opt = eval_cmd->add_option("--x", eval.x, "Point at which to evaluate pdf and cdf");
    auto* q_opt = eval_cmd->add_option("--q", eval.q, "Probability level for the quantile");
    x_opt->excludes(q_opt);

    GridOptions grid;
    auto* grid_cmd = app.add_subcommand("grid", "Write a gridded density as x,density CSV");
    grid_cmd->add_option("--params-file", grid.params_file, "Distribution JSON")->required()->check(CLI::ExistingFile);
    grid_cmd->add_option("--n", grid.n, "Grid points");
    grid_cmd->add_option("--out", grid.out, "Output CSV (stdout when omitted)");
    grid_cmd->add_option("--lo", grid.lo, "Support override, lower end");
    grid_cmd->add_option("--hi", grid.hi, "Support override, upper end");

    AggregateOptions agg;
    auto* agg_cmd = app.add_subcommand("aggregate", "Pool a panel of expert estimates");
    agg_cmd->add_option("--panel-file", agg.panel_file, "JSON array of estimates")->required()->check(CLI::ExistingFile);
    agg_cmd->add_flag("--weighted", agg.weighted, "Weight experts by their confidence weights");
    agg_cmd->add_option("--n", agg.n, "Grid points");
    agg_cmd->add_option("--prominence", agg.prominence, "Relative prominence for mode detection");
    agg_cmd->add_option("--out", agg.out, "Pooled CSV")->required();

    RiskOptions risk;
    auto* risk_cmd = app.add_subcommand("risk", "Distribution of R = C*V*T");
    risk_cmd->add_option("--c", risk.c_file, "Consequences factor JSON")->required()->check(CLI::ExistingFile);
    risk_cmd->add_option("--v", risk.v_file, "Vulnerability factor JSON")->required()->check(CLI::ExistingFile);
    risk_cmd->add_option("--t", risk.t_file, "Threat factor JSON")->required()->check(CLI::ExistingFile);
    risk_cmd->add_option("--n", risk.n, "Grid points");
    risk_cmd->add_option("--out", risk.out, "Output CSV (stdout when omitted)");

    ServeOptions serve;
    serve.port = std::atoi(env_or("SOFTTRI_PORT", std::to_string(kDefaultPort)).c_str());
    serve.data_dir = env_or("SOFTTRI_DATA_DIR", "data");
    serve.assets_dir = env_or("SOFTTRI_ASSETS_DIR", "");
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    serve_cmd->add_option("--host", serve.host, "Listen address");
    serve_cmd->add_option("--port", serve.port, "Listen port")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--data-dir", serve.data_dir, "Session data directory (created if missing)");
    serve_cmd->add_option("--assets-dir", serve.assets_dir, "Static UI bundle directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*eval_cmd) {
            run_eval(eval, out);
        } else if (*grid_cmd) {
            run_grid(grid, out);
        } else if (*agg_cmd) {
            run_aggregate(agg, out);
        } else if (*risk_cmd) {
            run_risk(risk, out);
        } else if (*serve_cmd) {
            return run_serve(serve, err);
        }
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: INTERNAL: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace softtri::cli
