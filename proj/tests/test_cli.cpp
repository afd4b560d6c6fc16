#include "softtri/cli.hpp"

#include <catch_amalgamated.hpp>
#include <httplib.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = softtri::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        std::random_device rd;
        path = fs::temp_directory_path() / ("softtri-cli-" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    std::string write(const std::string& name, const std::string& text) const
    {
        std::ofstream(path / name) << text;
        return (path / name).string();
    }
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::pair<double, double>> read_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
    }
    return rows;
}

double value_after(const std::string& text, const std::string& key)
{
    const auto at = text.find(key + " ");
    REQUIRE(at != std::string::npos);
    return std::stod(text.substr(at + key.size() + 1));
}

} // namespace

TEST_CASE("eval", "[cli]")
{
    auto r = run({"eval", "--low", "20", "--median", "40", "--high", "80", "--phi", "1", "--x", "60"});
    CHECK(r.code == 0);
    CHECK_THAT(value_after(r.out, "pdf"), WithinAbs(0.00625, 1e-12));

    r = run({"eval", "--low", "20", "--median", "40", "--high", "80", "--phi", "0.3", "--q", "0.5"});
    CHECK(r.code == 0);
    CHECK(r.out == "quantile 40\n");

    r = run({"eval", "--low", "20", "--median", "40", "--high", "80", "--phi", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("wide_side upper") != std::string::npos);
    CHECK_THAT(value_after(r.out, "alpha"), WithinAbs(3.0, 1e-12));

    r = run({"eval", "--low", "20", "--median", "40", "--high", "80", "--phi", "0", "--x", "50"});
    CHECK(r.code == 2);
    CHECK(r.err.find("PHI_OUT_OF_RANGE") != std::string::npos);

    r = run({"eval", "--low", "20", "--median", "40", "--high", "80", "--phi", "1", "--x", "1", "--q", "0.5"});
    CHECK(r.code == 2);
    CHECK(run({"eval", "--low", "20"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("grid", "[cli]")
{
    TempDir dir;
    double previous_tail = 1.0;
    for (int k = 1; k <= 10; ++k) {
        const double phi = k / 10.0;
        const std::string params = dir.write("p.json", "{\"low\": 0, \"median\": 20, \"high\": 100, \"phi\": " +
                                                           std::to_string(phi) + "}");
        const auto r = run({"grid", "--params-file", params, "--n", "1001"});
        REQUIRE(r.code == 0);
        const auto rows = read_csv(r.out);
        REQUIRE(rows.size() == 1001);
        CHECK(rows.back().first == 100.0);
        // Gridded output is renormalized, so the floor is matched only closely.
        CHECK_THAT(rows.back().second, WithinAbs((1.0 - phi) / 160.0, 1e-3 * (1.0 - phi) / 160.0 + 1e-15));
        if (phi < 1.0) {
            CHECK(rows.back().second < previous_tail);
        }
        previous_tail = rows.back().second;
    }

    const std::string beta = dir.write("b.json", R"({"kind": "beta", "a": 1, "b": 1})");
    const std::string out = (dir.path / "beta.csv").string();
    auto r = run({"grid", "--params-file", beta, "--n", "101", "--out", out});
    REQUIRE(r.code == 0);
    const std::string text = slurp(out);
    CHECK(text.rfind("x,density\n", 0) == 0);
    for (const auto& [x, d] : read_csv(text)) {
        CHECK_THAT(d, WithinAbs(1.0, 1e-12));
    }
    // Byte-stable output.
    run({"grid", "--params-file", beta, "--n", "101", "--out", out});
    CHECK(slurp(out) == text);

    r = run({"grid", "--params-file", beta, "--n", "10"});
    CHECK(r.code == 2);
    CHECK(r.err.find("GRID_TOO_COARSE") != std::string::npos);
    CHECK(run({"grid", "--params-file", (dir.path / "missing.json").string()}).code == 2);

    r = run({"grid", "--params-file", beta, "--n", "101", "--lo", "0.5", "--hi", "1"});
    REQUIRE(r.code == 0);
    CHECK(read_csv(r.out).front().first == 0.5);
}

TEST_CASE("aggregate", "[cli]")
{
    TempDir dir;
    const std::string panel = dir.write("panel.json", R"([
        {"expert_id": "1", "params": {"low": 20, "median": 40, "high": 80, "phi": 0.3}},
        {"expert_id": "2", "params": {"low": 50, "median": 60, "high": 70, "phi": 1}},
        {"expert_id": "3", "params": {"low": 10, "median": 45, "high": 70, "phi": 0.3}},
        {"expert_id": "4", "params": {"low": 15, "median": 30, "high": 79, "phi": 0.2}},
        {"expert_id": "5", "params": {"low": 25, "median": 50, "high": 75, "phi": 0.01}},
        {"expert_id": "6", "params": {"low": 40, "median": 60, "high": 70, "phi": 0.4}}
    ])");
    const std::string out = (dir.path / "pooled.csv").string();
    auto r = run({"aggregate", "--panel-file", panel, "--out", out});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("experts 6\n", 0) == 0);
    CHECK(value_after(r.out, "modes") >= 2);
    const auto rows = read_csv(slurp(out));
    CHECK(rows.size() == 1001);
    CHECK(rows.front().first == 10.0);
    CHECK(rows.back().first == 80.0);

    const std::string single = dir.write("one.json",
                                         R"([{"expert_id": "a", "params": {"low": 0, "median": 3, "high": 10, "phi": 0.5}}])");
    r = run({"aggregate", "--panel-file", single, "--out", out, "--n", "1001"});
    REQUIRE(r.code == 0);
    CHECK(value_after(r.out, "modes") == 1);
    CHECK_THAT(value_after(r.out, "mode"), WithinAbs(3.0, 0.01));

    r = run({"aggregate", "--panel-file", dir.write("empty.json", "[]"), "--out", out});
    CHECK(r.code == 2);
    CHECK(r.err.find("EMPTY_PANEL") != std::string::npos);

    r = run({"aggregate", "--panel-file", panel, "--out", out, "--weighted"});
    CHECK(r.code == 0);
}

TEST_CASE("risk", "[cli]")
{
    TempDir dir;
    const std::string spike = dir.write("c.json", R"({"low": 0.99, "median": 0.995, "high": 1, "phi": 1})");
    const std::string uniform = dir.write("u.json", R"({"kind": "beta", "a": 1, "b": 1})");
    auto r = run({"risk", "--c", spike, "--v", uniform, "--t", uniform});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("t,cdf,density\n", 0) == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    bool seen = false;
    while (std::getline(in, line)) {
        const double t = std::stod(line);
        if (t >= 0.5) {
            const auto a = line.find(',');
            const double cdf = std::stod(line.substr(a + 1));
            CHECK_THAT(cdf, WithinAbs(0.8466, 0.02));
            seen = true;
            break;
        }
    }
    CHECK(seen);

    const std::string negative = dir.write("n.json", R"({"kind": "grid", "lo": -1, "hi": 1, "values": [1, 1, 1]})");
    r = run({"risk", "--c", spike, "--v", negative, "--t", uniform});
    CHECK(r.code == 2);
    CHECK(r.err.find("NEGATIVE_SUPPORT") != std::string::npos);
}

TEST_CASE("serve", "[cli]")
{
    TempDir dir;
    int port = 0;
    {
        httplib::Server probe;
        port = probe.bind_to_any_port("127.0.0.1");
    }
    REQUIRE(port > 0);
    const fs::path data = dir.path / "sessions";
    std::ostringstream out;
    std::ostringstream err;
    int code = -1;
    std::thread server([&] {
        code = softtri::cli::run({"serve", "--host", "127.0.0.1", "--port", std::to_string(port), "--data-dir",
                                  data.string()},
                                 out, err);
    });
    httplib::Client client("127.0.0.1", port);
    httplib::Result res;
    for (int i = 0; i < 400 && !res; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
        res = client.Get("/api/v1/sessions/0000000000000000");
    }
    REQUIRE(res);
    CHECK(res->status == 404);
    CHECK(fs::is_directory(data));
    softtri::cli::request_shutdown();
    server.join();
    CHECK(code == 0);
}
