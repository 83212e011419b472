#include "nilmix/io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using nilmix::io::json;

namespace {

struct Result {
  int status = -1;
  std::string err;
  fs::path out;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(NILMIX_TMP) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& file, const std::string& text) {
  std::ofstream os(file);
  os << text;
}

/// Runs `nilmix <command> --config <dir>/config.json --out <dir>/out <extra>`.
Result run(const std::string& command, const fs::path& dir, const std::string& config, const std::string& extra = "") {
  write(dir / "config.json", config);
  Result r;
  r.out = dir / "out";
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(NILMIX_BIN) + " " + command + " --config " + (dir / "config.json").string() +
                          " --out " + r.out.string() + " " + extra + " > /dev/null 2> " + err.string();
  const int raw = std::system(cmd.c_str());
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = nilmix::io::read_file(err);
  return r;
}

json report(const Result& r) { return json::parse(nilmix::io::read_file(r.out / "report.json")); }

const char* const kConfigs[][2] = {
    {"analyze", R"({"system": "heisenberg-cat"})"},
    {"rates", R"({"system": "catmap", "s": 0.5})"},
    {"certify", R"({"system": "cubic3", "radius": 60, "directions": [[1, 0.6180339887498949]]})"},
    {"solve", R"({"observable": {"dim": 2, "coeffs": [{"z": [0, 1], "re": 1}, {"z": [2, -1], "re": 0.5, "im": 0.25}]},
                 "directions": [[1, 0.6180339887498949]], "r": 0.5, "certificate_radius": 20})"},
    {"threshold", R"({"profile": "one", "r": [0.25, 0.5], "h": [1e-2, 1e-4]})"},
    {"correlate", R"({"system": "catmap", "observables": [
                       {"dim": 2, "coeffs": [{"z": [1, 0], "re": 0.5}, {"z": [-1, 0], "re": 0.5}, {"z": [1, 1], "re": 0.25}]},
                       {"dim": 2, "coeffs": [{"z": [1, 0], "re": 0.5}, {"z": [2, 1], "re": 0.5}]}],
                     "series": {"from": 0, "to": 6}})"},
    {"density", R"({"system": "catmap", "radius": [20, 40], "samples": 5000})"},
    {"counterexample", R"({"system": "catmap", "kind": "maxgap", "m_to": 10})"},
};

}  // namespace

TEST_CASE("analyze on the Heisenberg example") {
  const auto dir = scratch("analyze");
  const auto r = run("analyze", dir, R"({"system": "heisenberg-cat"})");
  REQUIRE(r.status == 0);
  const auto j = report(r);
  const auto& g = j.at("result").at("generators").at(0);
  CHECK(g.at("ergodic") == true);
  CHECK(g.at("type") == "rational");
  CHECK(g.at("n_z2").at("dim") == 1);
  CHECK(g.at("n_z2").at("basis") == json::parse("[[0, 0, 1]]"));
  CHECK(j.at("result").at("algebra").at("central_series_dims") == json::parse("[3, 1, 0]"));
}

TEST_CASE("rates on the cat map") {
  const auto dir = scratch("rates");
  const auto r = run("rates", dir, R"({"system": "catmap", "s": 0.5})");
  REQUIRE(r.status == 0);
  const auto j = report(r);
  CHECK(std::abs(j.at("result").at("gamma").get<double>() - 0.010025) < 1e-6);
  const auto csv = nilmix::io::read_file(r.out / "envelope.csv");
  CHECK(csv.rfind("m,bound\n", 0) == 0);
}

TEST_CASE("invalid configurations exit with status 2") {
  const auto dir = scratch("invalid");
  SUBCASE("malformed JSON") {
    const auto r = run("correlate", dir, R"({"system": "catmap", "observables": [)");
    CHECK(r.status == 2);
    const auto e = json::parse(r.err.substr(0, r.err.find('\n')));
    CHECK(e.at("error") == "invalid-config");
    CHECK_FALSE(fs::exists(r.out / "report.json"));
  }
  SUBCASE("unknown field") {
    const auto r = run("rates", dir, R"({"system": "catmap", "sigma": 1})");
    CHECK(r.status == 2);
    CHECK(r.err.find("sigma") != std::string::npos);
  }
  SUBCASE("unknown system") {
    CHECK(run("analyze", dir, R"({"system": "torus9"})").status == 2);
  }
  SUBCASE("wrong field type") {
    CHECK(run("rates", dir, R"({"system": "catmap", "s": "half"})").status == 2);
  }
  SUBCASE("unknown command") {
    CHECK(run("mix", dir, R"({"system": "catmap"})").status == 2);
  }
  SUBCASE("precision out of range") {
    CHECK(run("rates", dir, R"({"system": "catmap"})", "--precision 8").status == 2);
  }
}

TEST_CASE("computation errors exit with status 1") {
  const auto dir = scratch("compute");
  SUBCASE("non-ergodic automorphism") {
    const auto r = run("rates", dir, R"({"system": "filiform4"})");
    CHECK(r.status == 1);
    CHECK(json::parse(r.err.substr(0, r.err.find('\n'))).at("error") == "precondition");
  }
  SUBCASE("resonant frequency") {
    const auto r = run("solve", dir, R"({"observable": {"dim": 2, "coeffs": [{"z": [1, -1], "re": 1}]},
                                        "directions": [[1, 1]]})");
    CHECK(r.status == 1);
    CHECK(json::parse(r.err.substr(0, r.err.find('\n'))).at("error") == "obstruction");
  }
}

TEST_CASE("reports embed provenance") {
  for (const auto& [command, config] : kConfigs) {
    const std::string name = command;
    CAPTURE(name);
    const auto dir = scratch(std::string("provenance_") + command);
    const auto r = run(command, dir, config, "--precision 160");
    REQUIRE(r.status == 0);
    const auto j = report(r);
    CHECK(j.at("command") == command);
    CHECK(j.at("version") == nilmix::kLibraryVersion);
    CHECK(j.at("precision_bits") == 160);
    CHECK(j.at("config").at("precision") == 160);
    CHECK(j.at("config").contains("seed"));
    CHECK(j.at("config").contains("out"));
    // every explicit field appears in the resolved config
    const auto given = json::parse(config);
    for (const auto& [key, value] : given.items()) CHECK(j.at("config").contains(key));
    for (const auto& t : j.at("tables")) {
      const auto csv = nilmix::io::read_file(r.out / t.get<std::string>());
      CHECK(csv.find('\n') != std::string::npos);
      // a header row of column names comes first
      CHECK(std::isalpha(static_cast<unsigned char>(csv.front())));
    }
  }
}

TEST_CASE("reruns are byte-identical") {
  for (const auto& [command, config] : kConfigs) {
    const std::string name = command;
    CAPTURE(name);
    const auto dir = scratch(std::string("rerun_") + command);
    REQUIRE(run(command, dir, config, "--seed 7").status == 0);
    std::vector<std::pair<std::string, std::string>> first;
    for (const auto& e : fs::directory_iterator(dir / "out"))
      first.emplace_back(e.path().filename().string(), nilmix::io::read_file(e.path()));
    REQUIRE(run(command, dir, config, "--seed 7").status == 0);
    for (const auto& [file, content] : first) {
      CAPTURE(file);
      CHECK(nilmix::io::read_file(dir / "out" / file) == content);
    }
  }
}

TEST_CASE("the seed changes the Monte Carlo estimate only") {
  const auto dir = scratch("seed");
  const char* config = R"({"system": "catmap", "radius": 30, "samples": 4000})";
  REQUIRE(run("density", dir, config, "--seed 1").status == 0);
  const auto a = report({0, "", dir / "out"});
  REQUIRE(run("density", dir, config, "--seed 2").status == 0);
  const auto b = report({0, "", dir / "out"});
  CHECK(a.at("seed") == 1);
  CHECK(b.at("seed") == 2);
  const auto& ra = a.at("result").at("rows").at(0);
  const auto& rb = b.at("result").at("rows").at(0);
  CHECK(ra.at("r_count") == rb.at("r_count"));
}
