#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "starnet/cli.hpp"
#include "starnet/config.hpp"
#include "starnet/qops.hpp"
#include <json.hpp>

using namespace starnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("starnet_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

config::RunConfig cfg(const std::string& command, std::map<std::string, std::string> flags, const fs::path& out) {
  flags["out"] = out.string();
  return config::resolve(command, {}, flags);
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("document parsing") {
    const auto v = config::parse_document("# comment\nm = 5\n  t2-ms=2 # trailing\n\nnnn = false\n");
    CHECK(v.at("m") == "5");
    CHECK(v.at("t2_ms") == "2");
    CHECK(v.at("nnn") == "false");
    CHECK_THROWS_AS(config::parse_document("m 5\n"), InvalidArgument);
  }

  TEST_CASE("flags override the file which overrides defaults") {
    const auto c = config::resolve("scan", {{"m", "5"}, {"t2_ms", "2"}}, {{"m", "7"}});
    CHECK(c.get_int("m") == 7);
    CHECK(c.get_double("t2_ms") == 2.0);
    CHECK(c.get_double("lambda") == 1.0);
    CHECK(config::resolve("sweep", {}, {}).get_int_list("m") == std::vector<int>{3, 5, 7, 9, 11});
    CHECK(config::resolve("scan", {}, {{"t2_ms", "inf"}}).get_double("t2_ms") == std::numeric_limits<double>::infinity());
  }

  TEST_CASE("unknown keys and commands are rejected") {
    CHECK_THROWS_AS(config::resolve("scan", {{"bogus", "1"}}, {}), InvalidArgument);
    CHECK_THROWS_AS(config::resolve("scan", {}, {{"bogus", "1"}}), InvalidArgument);
    CHECK_THROWS_AS(config::resolve("teleport", {}, {}), InvalidArgument);
    const auto c = config::resolve("scan", {}, {{"m", "three"}});
    CHECK_THROWS_AS(c.get_int("m"), InvalidArgument);
    CHECK_THROWS_AS(config::resolve("scan", {}, {{"nnn", "maybe"}}).get_bool("nnn"), InvalidArgument);
  }

  TEST_CASE("echo round trip and hash") {
    const auto a = config::resolve("loss", {{"m", "3,5"}}, {{"seed", "9"}});
    const auto b = config::parse_echo(a.echo());
    CHECK(a == b);
    CHECK(a.echo().rfind("command = loss\n", 0) == 0);
    CHECK(a.hash().size() == 16);
    auto c = a;
    c.values["out"] = "elsewhere";
    c.values["jobs"] = "7";
    CHECK(c.hash() == a.hash());
    c.values["seed"] = "10";
    CHECK(c.hash() != a.hash());
  }

  TEST_CASE("number formatting") {
    CHECK(cli::format_number(0.1) == "0.1");
    CHECK(cli::format_number(-0.0) == "0");
    CHECK(cli::format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(cli::format_number(1.0 / 3.0) == "0.333333333333");
  }
}

TEST_SUITE("cli") {
  TEST_CASE("outputs are byte identical across runs") {
    const auto a = scratch("repeat_a");
    const auto b = scratch("repeat_b");
    std::ostringstream err;
    REQUIRE(cli::run(cfg("scan", {{"samples", "301"}}, a), err) == cli::kOk);
    REQUIRE(cli::run(cfg("scan", {{"samples", "301"}, {"jobs", "3"}}, b), err) == cli::kOk);
    for (const char* f : {"fig3.csv", "summary.json"}) CHECK(slurp(a / f) == slurp(b / f));
    CHECK(err.str().empty());
  }

  TEST_CASE("manifest") {
    const auto out = scratch("manifest");
    std::ostringstream err;
    const auto c = cfg("spectrum", {{"n", "3"}}, out);
    REQUIRE(cli::run(c, err) == cli::kOk);
    const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(m["command"] == "spectrum");
    CHECK(m["config_hash"] == c.hash());
    CHECK(config::parse_echo(m["config"].get<std::string>()) == c);
    const auto outputs = m["outputs"].get<std::vector<std::string>>();
    CHECK(std::is_sorted(outputs.begin(), outputs.end()));
    for (const auto& f : outputs) CHECK(fs::exists(out / f));
  }

  TEST_CASE("exit codes") {
    std::ostringstream err;
    CHECK(cli::run(cfg("scan", {{"m", "x"}}, scratch("bad")), err) == cli::kInvalidConfig);
    const auto first = lines(err.str()).at(0);
    const auto j = nlohmann::json::parse(first);
    CHECK(j["exit_code"] == 2);
    CHECK(j["error"] == "invalid_config");

    err.str("");
    CHECK(cli::run(cfg("sweep", {{"m", "3,38"}, {"n", "38"}}, scratch("geom")), err) == cli::kPhysicsRejection);
    CHECK(nlohmann::json::parse(lines(err.str()).at(0))["exit_code"] == 3);

    err.str("");
    CHECK(cli::run(cfg("scan", {{"m", "5"}, {"lost", "2,3"}}, scratch("adjacent")), err) == cli::kPhysicsRejection);

    err.str("");
    CHECK(cli::run(cfg("evolve", {{"m", "2"}, {"path", "full"}, {"t2_ms", "1e-300"}}, scratch("stiff")), err) ==
          cli::kNumericalFailure);
    CHECK(nlohmann::json::parse(lines(err.str()).at(0))["error"] == "numerical_failure");
  }

  TEST_CASE("empty loss report is header-only and noted") {
    const auto out = scratch("loss2");
    std::ostringstream err;
    REQUIRE(cli::run(cfg("loss", {{"m", "2"}, {"samples", "201"}}, out), err) == cli::kOk);
    const auto rows = lines(slurp(out / "fig7b.csv"));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "m,n_lost,configurations,expectation_e_m");
    CHECK(rows[1].rfind("2,1,", 0) == 0);
    const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(m["notes"].dump().find("2-loss: zero configurations") != std::string::npos);
  }

  TEST_CASE("sweep table is ordered by chain length") {
    const auto out = scratch("sweep");
    std::ostringstream err;
    REQUIRE(cli::run(cfg("sweep", {{"m", "5,3"}, {"samples", "201"}}, out), err) == cli::kOk);
    const auto rows = lines(slurp(out / "fig4b.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].rfind("3,", 0) == 0);
    CHECK(rows[2].rfind("5,", 0) == 0);
  }
}
