#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mmqkd/cli.hpp"
#include "mmqkd/error.hpp"

namespace mmqkd {

using json = nlohmann::json;

namespace {

// Walks one JSON object, remembering its path and which keys were consumed.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw config_error("config error at " + (path.empty() ? std::string("/") : path) + ": " + what);
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  std::string at(const char* key) const { return path_ + "/" + key; }

  void number(const char* key, double& v) {
    if (!has(key)) return;
    const json& x = j_.at(key);
    if (!x.is_number()) fail(at(key), "expected a number");
    v = x.get<double>();
    if (!std::isfinite(v)) fail(at(key), "expected a finite number");
  }

  void count(const char* key, std::uint64_t& v) {
    if (!has(key)) return;
    const json& x = j_.at(key);
    if (x.is_number_unsigned()) {
      v = x.get<std::uint64_t>();
      return;
    }
    if (!x.is_number()) fail(at(key), "expected a nonnegative integer");
    const double d = x.get<double>();
    if (!(d >= 0.0) || d != std::floor(d) || d > 9.0e18) fail(at(key), "expected a nonnegative integer");
    v = static_cast<std::uint64_t>(d);
  }

  void integer(const char* key, int& v) {
    std::uint64_t u = static_cast<std::uint64_t>(std::max(v, 0));
    count(key, u);
    if (u > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) fail(at(key), "integer out of range");
    v = static_cast<int>(u);
  }

  void boolean(const char* key, bool& v) {
    if (!has(key)) return;
    const json& x = j_.at(key);
    if (!x.is_boolean()) fail(at(key), "expected true or false");
    v = x.get<bool>();
  }

  void text(const char* key, std::string& v) {
    if (!has(key)) return;
    const json& x = j_.at(key);
    if (!x.is_string()) fail(at(key), "expected a string");
    v = x.get<std::string>();
  }

  void numbers(const char* key, std::vector<double>& v) {
    if (!has(key)) return;
    const json& x = j_.at(key);
    if (!x.is_array()) fail(at(key), "expected an array of numbers");
    v.clear();
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!x[i].is_number()) fail(at(key) + "/" + std::to_string(i), "expected a number");
      v.push_back(x[i].get<double>());
    }
  }

  void triple(const char* key, std::array<double, 3>& v) {
    if (!has(key)) return;
    std::vector<double> tmp;
    numbers(key, tmp);
    if (tmp.size() != 3) fail(at(key), "expected exactly 3 numbers");
    std::copy(tmp.begin(), tmp.end(), v.begin());
  }

  Section child(const char* key) {
    seen_.insert(key);
    return Section(j_.at(key), at(key));
  }

  // Call last.
  void no_extras() const {
    for (const auto& [k, _] : j_.items()) {
      if (!seen_.count(k)) fail(path_ + "/" + k, "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Re-raise a validation failure with the section path in front.
template <class F>
void validated(const std::string& path, F f) {
  try {
    f();
  } catch (const config_error& e) {
    Section::fail(path, e.what());
  }
}

}  // namespace

void RunConfig::validate() const {
  validated("/detector", [&] { detector.validate(); });
  validated("/channel", [&] { channel.validate(); });
  if (!(loss_db >= 0.0)) Section::fail("/channel/loss_db", "must be nonnegative");
  validated("/decoy", [&] { decoy.validate(); });
  validated("/epsilon", [&] { epsilon.validate(); });
  if (!(f_ec >= 1.0)) Section::fail("/error_correction/f_ec", "must be at least 1");
  for (std::size_t i = 0; i < scan_loss_db.size(); ++i) {
    if (!(scan_loss_db[i] >= 0.0)) Section::fail("/scan/loss_db/" + std::to_string(i), "must be nonnegative");
  }
  if (oracle.n_max < 0 || oracle.n_max > kHardPhotonLimit) {
    Section::fail("/oracle/n_max", "must lie in [0, " + std::to_string(kHardPhotonLimit) + "]");
  }
  validated("/verify", [&] { verify.validate(); });
  static const std::set<std::string> lemmas{"all", "serfling", "smallpovm", "transfer", "decoy", "phase"};
  if (!lemmas.count(lemma)) Section::fail("/verify/lemma", "unknown lemma '" + lemma + "'");
}

RunConfig parse_run_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  Section top(root, "");
  if (top.has("detector")) {
    Section s = top.child("detector");
    s.number("eta_det", cfg.detector.eta_det);
    s.number("d_det", cfg.detector.d_det);
    s.number("delta_eta", cfg.detector.delta_eta);
    s.number("delta_dc", cfg.detector.delta_dc);
    s.no_extras();
  }
  if (top.has("channel")) {
    Section s = top.child("channel");
    s.number("loss_db", cfg.loss_db);
    s.number("theta_deg", cfg.channel.theta_deg);
    s.number("p_za", cfg.channel.p_za);
    s.number("p_xa", cfg.channel.p_xa);
    s.number("p_zb", cfg.channel.p_zb);
    s.number("p_xb", cfg.channel.p_xb);
    s.number("p_zt", cfg.channel.p_zt);
    s.count("n_total", cfg.channel.n_total);
    s.no_extras();
  }
  if (top.has("decoy")) {
    Section s = top.child("decoy");
    s.triple("mu", cfg.decoy.mu);
    s.triple("prob", cfg.decoy.prob);
    s.no_extras();
  }
  if (top.has("epsilon")) {
    Section s = top.child("epsilon");
    s.number("at_a", cfg.epsilon.eps_at_a);
    s.number("at_b", cfg.epsilon.eps_at_b);
    s.number("at_c", cfg.epsilon.eps_at_c);
    s.number("at_d", cfg.epsilon.eps_at_d);
    s.number("ev", cfg.epsilon.eps_ev);
    s.number("pa", cfg.epsilon.eps_pa);
    s.no_extras();
  }
  if (top.has("error_correction")) {
    Section s = top.child("error_correction");
    s.number("f_ec", cfg.f_ec);
    s.boolean("transcript_bit", cfg.transcript_bit);
    s.no_extras();
  }
  if (top.has("scan")) {
    Section s = top.child("scan");
    s.numbers("loss_db", cfg.scan_loss_db);
    s.no_extras();
  }
  if (top.has("oracle")) {
    Section s = top.child("oracle");
    s.integer("n_max", cfg.oracle.n_max);
    s.integer("interior_samples", cfg.oracle.interior_samples);
    s.count("seed", cfg.oracle.seed);
    s.boolean("renormalize", cfg.oracle.renormalize);
    s.no_extras();
  }
  if (top.has("verify")) {
    Section s = top.child("verify");
    TrialConfig& v = cfg.verify;
    s.text("lemma", cfg.lemma);
    s.count("n", v.n);
    s.count("trials", v.trials);
    s.count("seed", v.seed);
    s.number("p_test", v.p_test);
    s.number("p_key", v.p_key);
    s.number("density", v.density);
    s.number("gamma", v.gamma);
    s.count("min_stratum", v.min_stratum);
    s.number("error_rate", v.error_rate);
    s.number("delta", v.delta);
    s.number("eps_sq", v.eps_sq);
    s.numbers("e_grid", v.e_grid);
    s.integer("levels", v.levels);
    s.number("markov_stay", v.markov_stay);
    s.number("decoy_eps_sq", v.decoy_eps_sq);
    s.no_extras();
  }
  top.no_extras();
  cfg.channel.detector = cfg.detector;
  cfg.channel.eta_ch = eta_from_loss_db(cfg.loss_db < 0.0 ? 0.0 : cfg.loss_db);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_run_config(ss.str());
  } catch (const config_error& e) {
    throw config_error(path + ": " + e.what());
  }
}

std::string run_config_json(const RunConfig& c) {
  json j;
  j["detector"] = {{"eta_det", c.detector.eta_det},
                   {"d_det", c.detector.d_det},
                   {"delta_eta", c.detector.delta_eta},
                   {"delta_dc", c.detector.delta_dc}};
  j["channel"] = {{"loss_db", c.loss_db},         {"theta_deg", c.channel.theta_deg}, {"p_za", c.channel.p_za},
                  {"p_xa", c.channel.p_xa},       {"p_zb", c.channel.p_zb},           {"p_xb", c.channel.p_xb},
                  {"p_zt", c.channel.p_zt},       {"n_total", c.channel.n_total}};
  j["decoy"] = {{"mu", c.decoy.mu}, {"prob", c.decoy.prob}};
  j["epsilon"] = {{"at_a", c.epsilon.eps_at_a}, {"at_b", c.epsilon.eps_at_b}, {"at_c", c.epsilon.eps_at_c},
                  {"at_d", c.epsilon.eps_at_d}, {"ev", c.epsilon.eps_ev},     {"pa", c.epsilon.eps_pa}};
  j["error_correction"] = {{"f_ec", c.f_ec}, {"transcript_bit", c.transcript_bit}};
  j["scan"] = {{"loss_db", c.scan_loss_db}};
  j["oracle"] = {{"n_max", c.oracle.n_max},
                 {"interior_samples", c.oracle.interior_samples},
                 {"seed", c.oracle.seed},
                 {"renormalize", c.oracle.renormalize}};
  const TrialConfig& v = c.verify;
  j["verify"] = {{"lemma", c.lemma},       {"n", v.n},
                 {"trials", v.trials},     {"seed", v.seed},
                 {"p_test", v.p_test},     {"p_key", v.p_key},
                 {"density", v.density},   {"gamma", v.gamma},
                 {"min_stratum", v.min_stratum}, {"error_rate", v.error_rate},
                 {"delta", v.delta},       {"eps_sq", v.eps_sq},
                 {"e_grid", v.e_grid},     {"levels", v.levels},
                 {"markov_stay", v.markov_stay}, {"decoy_eps_sq", v.decoy_eps_sq}};
  return j.dump(2);
}

}  // namespace mmqkd
