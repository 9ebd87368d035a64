#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "removal/cli/app.hpp"
#include "removal/cli/io.hpp"
#include "removal/random.hpp"
#include "removal/verify/oracles.hpp"

using namespace removal;
using namespace removal::cli;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("removal_cli_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

RunResult run_with(const std::string& command, std::vector<std::string> sets) {
  RunOptions o;
  o.command = command;
  for (const auto& s : sets) o.config.set(s);
  return run(o);
}

struct Invocation {
  int code = 0;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "removal");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

double number(const RunResult& r, const std::string& key) { return r.report.entries().at(key).get<double>(); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("fractions and numbers") {
  CHECK(parse_real("3/4", "x") == 0.75);
  CHECK(parse_real("1e-3", "x") == 0.001);
  CHECK_THROWS_AS(parse_real("1/0", "x"), ConfigError);
  CHECK_THROWS_AS(parse_real("abc", "x"), ConfigError);
  CHECK_THROWS_AS(parse_real("0.5x", "x"), ConfigError);
}

TEST_CASE("config syntax errors carry line and column") {
  try {
    Config::from_text("{\n  \"eps\": 0.1,\n  \"n\" 3\n}", "cfg.json");
    FAIL("expected a syntax error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cfg.json:3:") == 0);
  }
}

TEST_CASE("config field errors name the field") {
  Config c(nlohmann::json{{"eps", "x"}, {"n", -1}}, "cfg.json");
  CHECK_THROWS_WITH_AS(c.real("eps"), doctest::Contains("'eps'"), ConfigError);
  CHECK_THROWS_WITH_AS(c.count("n"), doctest::Contains("'n'"), ConfigError);
  CHECK_THROWS_WITH_AS(c.string("missing"), doctest::Contains("missing field 'missing'"), ConfigError);
  Config d(nlohmann::json{{"eta", 1.5}});
  CHECK_THROWS_AS(d.real_in("eta", 0.9, 0.0, 1.0, false, true), ConfigError);
}

TEST_CASE("chain files accept fraction strings") {
  const auto dir = scratch("chain");
  write(dir / "c.json", R"({"states": ["e", "f"], "rows": [["1/2", "1/2"], [1, 0]]})");
  const auto c = load_chain("c.json", dir.string());
  CHECK(c->stationary()(0) == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(c->labels() == std::vector<std::string>{"e", "f"});
  write(dir / "bad.json", R"({"rows": [[1, 0], [0]]})");
  CHECK_THROWS_AS(load_chain("bad.json", dir.string()), ConfigError);
  CHECK_THROWS_AS(load_chain("builtin:nothing", "."), ConfigError);
  CHECK_THROWS_AS(load_chain("builtin:disjointness:1/2", "."), ConfigError);
}

TEST_CASE("function and layer files round-trip exactly") {
  const auto dir = scratch("files");
  Rng rng(61);
  const ProductSpace sp(std::make_shared<const BaseChain>(k3_chain()), 2);
  const auto f = verify::random_unit_function(sp, rng);
  save_function((dir / "f.fn").string(), "builtin:k3", f);
  const auto g = load_function((dir / "f.fn").string(), 1000);
  REQUIRE(g.size() == f.size());
  for (PointIndex x = 0; x < f.size(); ++x) CHECK(g[x] == f[x]);

  const auto layer = verify::random_layer_function(8, 2, rng);
  save_layer((dir / "l.txt").string(), layer);
  const auto back = load_layer((dir / "l.txt").string());
  CHECK(back.n() == 8);
  for (std::size_t i = 0; i < layer.size(); ++i) CHECK(back[i] == layer[i]);

  write(dir / "short.fn", "chain builtin:k3\nn 2\nrange unit\nvalues\n0.5\n");
  CHECK_THROWS_AS(load_function((dir / "short.fn").string(), 1000), ConfigError);
  write(dir / "range.fn", "chain builtin:k3\nn 1\nrange unit\nvalues\n0.5\n2\n0\n");
  CHECK_THROWS_AS(load_function((dir / "range.fn").string(), 1000), ConfigError);
}

TEST_CASE("schedule example") {
  const auto r = run_with("schedule", {"eps=0.1", "c=1", "r=10"});
  REQUIRE(r.exit_code == kExitOk);
  const auto& e = r.report.entries();
  CHECK(e.at("states").get<int>() == 3);
  CHECK(e.at("gamma_iterates")[1].get<std::string>() == "10");
  CHECK(e.at("tower")[3].get<std::string>() == "16");
  CHECK(e.at("k").get<std::string>() == "astronomical(>1e300)");
}

TEST_CASE("kneser on the planted star") {
  const auto r = run_with("kneser", {"layer=star:0", "n=9", "k=3", "eps=0.05"});
  REQUIRE(r.exit_code == kExitOk);
  CHECK(number(r, "loss") == 0.0);
  CHECK(r.report.entries().at("intersecting").get<bool>());
  CHECK(r.report.entries().at("J") == nlohmann::ordered_json::array({0}));
}

TEST_CASE("kneser refuses k != p n") {
  CHECK(run_with("kneser", {"p=0.25", "n=9", "k=3"}).exit_code == kExitConfig);
}

TEST_CASE("quadform oracle comparison") {
  const auto r = run_with("oracle-compare", {"oracle=\"quadform\"", "n=3"});
  REQUIRE(r.exit_code == kExitOk);
  CHECK(number(r, "max_deviation") <= 1e-12);
}

TEST_CASE("exit codes") {
  CHECK(run_with("", {}).exit_code == kExitConfig);
  CHECK(run_with("quadform", {"typo=1"}).exit_code == kExitConfig);
  CHECK(run_with("quadform", {"mode=fast"}).exit_code == kExitConfig);
  CHECK(run_with("capture", {"j_budget=1", "gamma=1e-6", "eta=0.99"}).exit_code == kExitSoftFailure);
  CHECK(run_with("validate-chain", {"chain=builtin:k3"}).exit_code == kExitOk);
  CHECK(run_with("refine", {"function=dictatorship:0"}).exit_code == kExitOk);
  CHECK(run_with("refine", {"function=dictatorship:0", "max_steps=1"}).exit_code == kExitSoftFailure);
  CHECK(run_with("quadform", {"cap_points=10"}).exit_code == kExitSoftFailure);
}

TEST_CASE("invalid chains are reported with a witness") {
  const auto dir = scratch("invalid");
  write(dir / "p.json", R"({"rows": [[0, 1], [1, 0]]})");
  const auto r = run_with("validate-chain", {"chain=" + (dir / "p.json").string()});
  CHECK(r.exit_code == kExitSoftFailure);
  CHECK(r.report.entries().at("violation").get<std::string>() == "periodic");
}

TEST_CASE("faithful mode reports the parameter trail") {
  const auto r = run_with("capture", {"mode=faithful"});
  REQUIRE(r.exit_code == kExitOk);
  CHECK(r.report.entries().contains("faithful.log10_gamma"));
  CHECK_FALSE(r.report.entries().contains("J"));
}

TEST_CASE("reports are deterministic and the sidecar matches") {
  const auto dir = scratch("determinism");
  const std::vector<std::string> args{"independent-capture", "--seed", "77", "--set", "n=4", "--out"};
  auto a = args;
  a.push_back((dir / "a").string());
  auto b = args;
  b.push_back((dir / "b").string());
  const auto ra = invoke(a);
  const auto rb = invoke(b);
  CHECK(ra.code == rb.code);
  CHECK(ra.out == rb.out);
  std::ifstream ta(dir / "a" / "report.txt");
  std::ifstream tb(dir / "b" / "report.txt");
  std::stringstream sa, sb;
  sa << ta.rdbuf();
  sb << tb.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str() == ra.out);

  std::ifstream js(dir / "a" / "report.json");
  const auto parsed = nlohmann::ordered_json::parse(js);
  CHECK(parsed.at("seed").get<int>() == 77);
  CHECK(parsed.at("rng").get<std::string>() == "mt19937_64/v1");
  CHECK(parsed.size() == static_cast<std::size_t>(std::count(ra.out.begin(), ra.out.end(), '\n')));
  CHECK(ra.out.find("timing") == std::string::npos);
}

TEST_CASE("different seeds give different random inputs") {
  const auto a = invoke({"quadform", "--seed", "1"});
  const auto b = invoke({"quadform", "--seed", "2"});
  CHECK(a.out != b.out);
}

TEST_CASE("config file with command field") {
  const auto dir = scratch("config");
  write(dir / "run.json", R"({"command": "far", "function": "dictatorship:1", "eps": 0})");
  const auto r = invoke({"--config", (dir / "run.json").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("far: false") != std::string::npos);
  write(dir / "broken.json", "{\n\"eps\": }\n");
  const auto e = invoke({"far", "--config", (dir / "broken.json").string()});
  CHECK(e.code == kExitConfig);
  CHECK(e.err.find("broken.json:2:") != std::string::npos);
}

TEST_CASE("unknown command and help") {
  CHECK(invoke({"no-such-command"}).code == kExitConfig);
  const auto h = invoke({"--help"});
  CHECK(h.code == kExitOk);
  CHECK(h.out.find("independent-capture") != std::string::npos);
}

TEST_CASE("function files feed the commands") {
  const auto dir = scratch("chainfiles");
  const auto d = invoke({"decompose", "--set", "n=2", "--out", dir.string()});
  REQUIRE(d.code == kExitOk);
  const auto r = invoke({"far", "--set", "function=" + (dir / "decomposed.fn").string(), "--set", "n=2"});
  CHECK(r.code == kExitOk);
}

}  // TEST_SUITE
