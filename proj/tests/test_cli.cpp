#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmqkd/cli.hpp"
#include "mmqkd/error.hpp"

using namespace mmqkd;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "mmqkd");
  std::ostringstream out, err;
  Result r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Scratch directory removed at scope exit.
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mmqkd_cli_" + std::to_string(std::hash<const void*>{}(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = path / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

double column(const std::string& line, int idx) {
  std::istringstream is(line);
  std::string cell;
  for (int i = 0; i <= idx; ++i) std::getline(is, cell, ',');
  return std::stod(cell);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  const RunConfig d = parse_run_config("{}");
  CHECK(d.channel.theta_deg == 2.0);
  CHECK(d.channel.eta_ch == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(d.channel.n_total == 1'000'000'000'000ULL);

  const RunConfig c = parse_run_config(R"({"detector":{"delta_eta":0.01},"channel":{"loss_db":3,"n_total":1e7}})");
  CHECK(c.detector.delta_eta == 0.01);
  CHECK(c.channel.detector.delta_eta == 0.01);
  CHECK(c.channel.n_total == 10'000'000ULL);

  auto message = [](const std::string& text) {
    try {
      parse_run_config(text);
    } catch (const config_error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"detector":{"eta_det":"high"}})").find("/detector/eta_det") != std::string::npos);
  CHECK(message(R"({"detector":{"eta":0.7}})").find("/detector/eta: unknown key") != std::string::npos);
  CHECK(message(R"({"channel":{"n_total":1.5}})").find("/channel/n_total") != std::string::npos);
  CHECK(message(R"({"decoy":{"mu":[0.9,0.1]}})").find("/decoy/mu") != std::string::npos);
  CHECK(message(R"({"decoy":{"mu":[0.1,0.9,0.0]}})").find("/decoy") != std::string::npos);
  CHECK(message(R"({"scan":{"loss_db":[1,"x"]}})").find("/scan/loss_db/1") != std::string::npos);
  CHECK(message(R"({"detector":{"delta_eta":0.9}})").find("/detector") != std::string::npos);
  CHECK(message("{\n  \"detector\": {,\n}").find("line 2") != std::string::npos);
  CHECK(message(R"({"bogus":1})").find("/bogus") != std::string::npos);

  SUBCASE("resolved config round-trips") {
    const RunConfig again = parse_run_config(run_config_json(c));
    CHECK(run_config_json(again) == run_config_json(c));
  }
}

TEST_CASE("keyrate scan") {
  TempDir t;
  const std::string cfg = t.write("c.json", R"({"scan":{"loss_db":[0,10,20]}})");
  const Result r = run({"keyrate", "--config", cfg});
  REQUIRE(r.code == kExitOk);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0] == kCsvHeader);
  double prev = 1.0;
  for (int i = 1; i < 4; ++i) {
    const double rate = column(ls[i], 1);
    CHECK(rate > 0.0);
    CHECK(rate <= prev);
    prev = rate;
  }
  CHECK(ls[2].rfind("10,", 0) == 0);

  SUBCASE("byte-identical reruns") { CHECK(run({"keyrate", "--config", cfg}).out == r.out); }
  SUBCASE("matches the in-process scan") { CHECK(format_csv(keyrate_scan(load_run_config(cfg))) == r.out); }
  SUBCASE("twelve significant digits") {
    std::istringstream is(ls[2]);
    std::string cell;
    std::getline(is, cell, ',');
    std::getline(is, cell, ',');
    const auto digits = std::count_if(cell.begin(), cell.end(), [](char ch) { return std::isdigit(ch); });
    CHECK(digits <= 13);  // leading 0 plus 12 significant
  }
  SUBCASE("--out writes the CSV and a config sidecar") {
    const std::string out = t.file("rates.csv");
    CHECK(run({"keyrate", "--config", cfg, "--out", out}).code == kExitOk);
    std::ifstream f(out);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == r.out);
    std::ifstream side(out + ".config.json");
    const auto j = nlohmann::json::parse(side);
    CHECK(j.at("security_parameter").get<double>() ==
          doctest::Approx((2 * std::sqrt(12.0) + 2) * 1e-12).epsilon(1e-12));
    CHECK(j.at("config").at("scan").at("loss_db").size() == 3);
  }
}

TEST_CASE("keyrate edge cases") {
  TempDir t;
  const Result empty = run({"keyrate", "--config", t.write("e.json", R"({"scan":{"loss_db":[]}})")});
  CHECK(empty.code == kExitOk);
  CHECK(empty.out == std::string(kCsvHeader) + "\n");

  const Result dark = run({"keyrate", "--config", t.write("d.json", R"({"detector":{"delta_dc":1.0}})")});
  CHECK(dark.code == kExitOk);
  const auto ls = lines(dark.out);
  REQUIRE(ls.size() == 6);
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(column(ls[i], 1) == 0.0);

  CHECK(run({"keyrate", "--config", t.file("missing.json")}).code == kExitConfig);
  const Result bad = run({"keyrate", "--config", t.write("b.json", R"({"channel":{"p_zt":2}})")});
  CHECK(bad.code == kExitConfig);
  CHECK(bad.err.find("/channel") != std::string::npos);
}

TEST_CASE("delta") {
  TempDir t;
  const Result zero = run({"delta", "--nmax", "4"});
  REQUIRE(zero.code == kExitOk);
  auto j = nlohmann::json::parse(zero.out);
  CHECK(j["closed_form"]["delta1"].get<double>() == 0.0);
  CHECK(std::fabs(j["oracle"]["delta1"].get<double>()) < 1e-10);
  CHECK(std::fabs(j["oracle"]["delta2"].get<double>()) < 1e-10);

  const std::string cfg = t.write("one.json", R"({"detector":{"delta_eta":0.01,"delta_dc":0.01}})");
  const Result one = run({"delta", "--config", cfg, "--nmax", "4"});
  REQUIRE(one.code == kExitOk);
  j = nlohmann::json::parse(one.out);
  const double c1 = j["closed_form"]["delta1"].get<double>();
  const double c2 = j["closed_form"]["delta2"].get<double>();
  CHECK(c1 == doctest::Approx(0.0398).epsilon(1e-3));
  CHECK(c2 == doctest::Approx(0.0198).epsilon(1e-3));
  CHECK(j["oracle"]["delta1"].get<double>() <= c1);
  CHECK(j["oracle"]["delta2"].get<double>() <= c2 + 1e-12);
  CHECK(j["oracle"]["n_max"].get<int>() == 4);
  CHECK(j["config"]["detector"]["delta_eta"].get<double>() == 0.01);

  CHECK(run({"delta", "--config", t.write("m.json", "{ not json")}).code == kExitConfig);
  CHECK(run({"delta", "--nmax", "-3"}).code == kExitConfig);
}

TEST_CASE("simulate | decoy | keyrate round trip") {
  TempDir t;
  const std::string cfg = t.write("c.json", R"({"channel":{"loss_db":7},"detector":{"delta_eta":0.005}})");
  const std::string obs = t.file("obs.json");
  REQUIRE(run({"simulate", "--config", cfg, "--out", obs}).code == kExitOk);

  const Result decoy = run({"decoy", "--observations", obs});
  REQUIRE(decoy.code == kExitOk);
  const auto dj = nlohmann::json::parse(decoy.out);
  CHECK(dj["phase"]["feasible"].get<bool>());

  const Result key = run({"keyrate", "--observations", obs});
  REQUIRE(key.code == kExitOk);

  // in-process pipeline
  const RunConfig rc = load_run_config(cfg);
  const Observations expected = expected_observations(rc.channel, rc.decoy);
  const KeyRateRow row = keyrate_row(rc, 7.0, expected);
  CHECK(key.out == format_csv({row}));
  RunConfig scan = rc;
  scan.scan_loss_db = {7.0};
  CHECK(key.out == format_csv(keyrate_scan(scan)));

  const ComposedBound c = bound_decoy_composed(expected, rc.decoy, closed_form_deltas(rc.detector), rc.epsilon);
  CHECK(dj["phase"]["phase_bound"].get<double>() == c.phase_bound);
  CHECK(dj["bounds"]["k"]["single_lower"].get<double>() == c.k.single_lower);
  CHECK(dj["bounds"]["x_err"]["single_upper"].get<double>() == c.x_err.single_upper);

  CHECK(run({"decoy", "--observations", t.file("nope.json")}).code == kExitConfig);
  CHECK(run({"decoy", "--observations", t.write("junk.json", R"({"observations":{"x":[1,2]}})")}).code ==
        kExitConfig);
}

TEST_CASE("simulate --sample honors the seed") {
  TempDir t;
  const std::string cfg = t.write("c.json", R"({"channel":{"n_total":1e6}})");
  const Result a = run({"simulate", "--config", cfg, "--sample", "--seed", "5"});
  const Result b = run({"simulate", "--config", cfg, "--sample", "--seed", "5"});
  const Result c = run({"simulate", "--config", cfg, "--sample", "--seed", "6"});
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out != c.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["mode"] == "sampled");
  CHECK(j["seed"].get<std::uint64_t>() == 5u);
  CHECK(j.contains("photon_tags"));
}

TEST_CASE("verify") {
  const Result r = run({"verify", "--lemma", "smallpovm", "--trials", "2000", "--seed", "3"});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["pass"].get<bool>());
  REQUIRE(j["reports"].size() == 1);
  const auto& rep = j["reports"][0];
  CHECK(rep["lemma"] == "smallpovm");
  for (const char* k : {"empirical", "bound", "sigma", "pass"}) CHECK(rep.contains(k));
  CHECK(j["config"]["verify"]["trials"].get<int>() == 2000);
  CHECK(j["config"]["verify"]["seed"].get<int>() == 3);
  CHECK(run({"verify", "--lemma", "smallpovm", "--trials", "2000", "--seed", "3"}).out == r.out);
  CHECK(run({"verify", "--lemma", "nonsense"}).code == kExitConfig);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitConfig);
  CHECK(run({"frobnicate"}).code == kExitConfig);
  CHECK(run({"keyrate", "--unknown"}).code == kExitConfig);
  CHECK(run({"--help"}).code == kExitOk);
}

}
