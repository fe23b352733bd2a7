#include "mmqkd/cli.hpp"

#include <tbb/parallel_for.h>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmqkd/error.hpp"
#include "mmqkd/phase_error.hpp"

namespace mmqkd {

using json = nlohmann::json;

namespace {

std::string g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json counts_json(const OutcomeCounts& c) { return json(c.n); }

OutcomeCounts counts_from(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) throw config_error("observations " + path + ": expected 3 numbers");
  OutcomeCounts c;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw config_error("observations " + path + ": expected 3 numbers");
    c.n[k] = j[k].get<double>();
    if (!(c.n[k] >= 0.0)) throw config_error("observations " + path + ": counts must be nonnegative");
  }
  return c;
}

json observations_json(const Observations& o) {
  return {{"x", counts_json(o.x)},
          {"x_err", counts_json(o.x_err)},
          {"k", counts_json(o.k)},
          {"e_z", o.e_z},
          {"n_z_test", o.n_z_test}};
}

Observations observations_from(const json& j) {
  if (!j.is_object()) throw config_error("observations: expected an object");
  Observations o;
  for (const char* key : {"x", "x_err", "k", "e_z", "n_z_test"}) {
    if (!j.contains(key)) throw config_error(std::string("observations: missing '") + key + "'");
  }
  o.x = counts_from(j.at("x"), "/x");
  o.x_err = counts_from(j.at("x_err"), "/x_err");
  o.k = counts_from(j.at("k"), "/k");
  if (!j.at("e_z").is_number() || !j.at("n_z_test").is_number()) {
    throw config_error("observations: e_z and n_z_test must be numbers");
  }
  o.e_z = j.at("e_z").get<double>();
  o.n_z_test = j.at("n_z_test").get<double>();
  if (!(o.e_z >= 0.0 && o.e_z <= 1.0)) throw config_error("observations /e_z: must lie in [0,1]");
  return o;
}

json bounds_json(const DecoyBounds& b) {
  return {{"vacuum_lower", b.vacuum_lower},
          {"single_lower", b.single_lower},
          {"single_upper", b.single_upper},
          {"infeasible", b.infeasible}};
}

json report_json(const VerifyReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"label", c.label},
                     {"trials", c.trials},
                     {"empirical", c.empirical},
                     {"bound", c.bound},
                     {"sigma", c.sigma},
                     {"asserted", c.asserted},
                     {"pass", c.pass}});
  }
  return {{"lemma", r.lemma},
          {"empirical", r.empirical},
          {"bound", r.bound},
          {"sigma", r.sigma},
          {"pass", r.pass},
          {"cells", cells}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw config_error(path + ": not valid JSON: " + e.what());
  }
}

// Observation files carry the config that produced them.
struct ObservationFile {
  RunConfig cfg;
  double loss_db = 0.0;
  Observations obs;
};

ObservationFile load_observations(const std::string& path, const std::string& config_override) {
  const json j = read_json_file(path);
  if (!j.is_object() || !j.contains("observations")) throw config_error(path + ": missing 'observations'");
  ObservationFile f;
  if (!config_override.empty()) {
    f.cfg = load_run_config(config_override);
  } else if (j.contains("config")) {
    f.cfg = parse_run_config(j.at("config").dump());
  }
  f.loss_db = f.cfg.loss_db;
  if (j.contains("loss_db") && j.at("loss_db").is_number()) f.loss_db = j.at("loss_db").get<double>();
  f.obs = observations_from(j.at("observations"));
  return f;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw config_error("cannot write '" + out_path + "'");
  f << text;
}

json config_node(const RunConfig& cfg) { return json::parse(run_config_json(cfg)); }

}  // namespace

KeyRateRow keyrate_row(const RunConfig& cfg, double loss_db, const Observations& obs) {
  const DeltaPair d = closed_form_deltas(cfg.detector);
  const KeyDecision k = key_length_decoy(obs, cfg.decoy, d, cfg.epsilon, make_lambda_ec(cfg.f_ec, cfg.transcript_bit));
  KeyRateRow row;
  row.loss_db = loss_db;
  row.key_length = k.key_length;
  row.key_rate = static_cast<double>(k.key_length) / static_cast<double>(cfg.channel.n_total);
  row.phase_bound = k.phase_bound;
  row.delta1 = d.delta1;
  row.delta2 = d.delta2;
  return row;
}

std::vector<KeyRateRow> keyrate_scan(const RunConfig& cfg) {
  cfg.validate();
  std::vector<KeyRateRow> rows(cfg.scan_loss_db.size());
  tbb::parallel_for(std::size_t{0}, rows.size(), [&](std::size_t i) {
    ChannelSpec ch = cfg.channel;
    ch.detector = cfg.detector;
    ch.eta_ch = eta_from_loss_db(cfg.scan_loss_db[i]);
    rows[i] = keyrate_row(cfg, cfg.scan_loss_db[i], expected_observations(ch, cfg.decoy));
  });
  return rows;
}

std::string format_csv(const std::vector<KeyRateRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << g12(r.loss_db) << ',' << g12(r.key_rate) << ',' << r.key_length << ',' << g12(r.phase_bound) << ','
       << g12(r.delta1) << ',' << g12(r.delta2) << '\n';
  }
  return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-size decoy BB84 key rates with basis-efficiency mismatch", "mmqkd"};
  app.require_subcommand(1);

  std::string config_path, out_path, obs_path, lemma;
  std::uint64_t seed = 0;
  int nmax = -1;
  std::uint64_t trials = 0;
  bool sample = false;

  auto* keyrate = app.add_subcommand("keyrate", "key rate per loss point as CSV");
  keyrate->add_option("--config", config_path, "config file (JSON)");
  keyrate->add_option("--observations", obs_path, "observation file from `simulate`; replaces the loss scan");
  keyrate->add_option("--out", out_path, "output path (default stdout)");

  auto* delta = app.add_subcommand("delta", "closed-form and numeric delta pair as JSON");
  delta->add_option("--config", config_path, "config file (JSON)");
  delta->add_option("--nmax", nmax, "largest photon block in the numeric search")->check(CLI::Range(0, kHardPhotonLimit));
  delta->add_option("--out", out_path, "output path (default stdout)");

  auto* decoy = app.add_subcommand("decoy", "decoy bounds and phase-error bound for an observation file");
  decoy->add_option("--observations", obs_path, "observation file from `simulate`")->required();
  decoy->add_option("--config", config_path, "override the config stored in the observation file");
  decoy->add_option("--out", out_path, "output path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "honest-channel observations as JSON");
  simulate->add_option("--config", config_path, "config file (JSON)");
  auto* seed_opt = simulate->add_option("--seed", seed, "seed for --sample");
  simulate->add_flag("--sample", sample, "draw one run instead of expectations");
  simulate->add_option("--out", out_path, "output path (default stdout)");

  auto* verify = app.add_subcommand("verify", "Monte Carlo checks of the concentration lemmas");
  verify->add_option("--config", config_path, "config file (JSON)");
  verify->add_option("--lemma", lemma, "serfling|smallpovm|transfer|decoy|phase|all");
  auto* vseed_opt = verify->add_option("--seed", seed, "master seed");
  verify->add_option("--trials", trials, "trials per check")->check(CLI::PositiveNumber);
  verify->add_option("--out", out_path, "output path (default stdout)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (keyrate->parsed()) {
      if (!obs_path.empty()) {
        const ObservationFile f = load_observations(obs_path, config_path);
        emit(format_csv({keyrate_row(f.cfg, f.loss_db, f.obs)}), out_path, out);
        return kExitOk;
      }
      const RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
      emit(format_csv(keyrate_scan(cfg)), out_path, out);
      if (!out_path.empty()) {
        json side = {{"config", config_node(cfg)}, {"security_parameter", cfg.epsilon.total_decoy()}};
        emit(side.dump(2) + "\n", out_path + ".config.json", out);
      }
      return kExitOk;
    }
    if (delta->parsed()) {
      RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
      if (nmax >= 0) cfg.oracle.n_max = nmax;
      const DeltaPair cf = closed_form_deltas(cfg.detector);
      const DeltaPair orc = oracle_deltas(cfg.detector, cfg.oracle);
      json j = {{"config", config_node(cfg)},
                {"closed_form", {{"delta1", cf.delta1}, {"delta2", cf.delta2}, {"degenerate", cf.degenerate}}},
                {"oracle", {{"delta1", orc.delta1}, {"delta2", orc.delta2}, {"n_max", cfg.oracle.n_max}}}};
      emit(j.dump(2) + "\n", out_path, out);
      return kExitOk;
    }
    if (decoy->parsed()) {
      const ObservationFile f = load_observations(obs_path, config_path);
      const double eps_d_sq = f.cfg.epsilon.eps_at_d * f.cfg.epsilon.eps_at_d;
      const ComposedBound c = bound_decoy_composed(f.obs, f.cfg.decoy, closed_form_deltas(f.cfg.detector), f.cfg.epsilon);
      json j = {{"config", config_node(f.cfg)},
                {"observations", observations_json(f.obs)},
                {"eps_sq", eps_d_sq},
                {"bounds",
                 {{"x", bounds_json(c.x)}, {"x_err", bounds_json(c.x_err)}, {"k", bounds_json(c.k)}}},
                {"phase",
                 {{"e1_upper", c.e1_upper},
                  {"phase_bound", c.phase_bound},
                  {"single_key_lower", c.single_key_lower},
                  {"feasible", c.feasible},
                  {"vacuous", c.vacuous}}}};
      emit(j.dump(2) + "\n", out_path, out);
      return kExitOk;
    }
    if (simulate->parsed()) {
      RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
      if (seed_opt->count() > 0) cfg.verify.seed = seed;
      json j = {{"config", config_node(cfg)}, {"loss_db", cfg.loss_db}};
      if (sample) {
        const SampledRun run = sample_observations(cfg.channel, cfg.decoy, cfg.verify.seed);
        j["mode"] = "sampled";
        j["seed"] = cfg.verify.seed;
        j["observations"] = observations_json(run.obs);
        j["photon_tags"] = {{"x", run.tags.x}, {"x_err", run.tags.x_err}, {"k", run.tags.k}};
      } else {
        j["mode"] = "expected";
        j["observations"] = observations_json(expected_observations(cfg.channel, cfg.decoy));
      }
      emit(j.dump(2) + "\n", out_path, out);
      return kExitOk;
    }
    if (verify->parsed()) {
      RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
      if (!lemma.empty()) cfg.lemma = lemma;
      if (vseed_opt->count() > 0) cfg.verify.seed = seed;
      if (trials > 0) cfg.verify.trials = trials;
      cfg.validate();
      std::vector<VerifyReport> reports;
      const bool all = cfg.lemma == "all";
      if (all || cfg.lemma == "serfling") reports.push_back(verify_serfling(cfg.verify));
      if (all || cfg.lemma == "smallpovm") reports.push_back(verify_small_povm(cfg.verify));
      if (all || cfg.lemma == "transfer") reports.push_back(verify_freq_transfer(cfg.verify));
      if (all || cfg.lemma == "decoy") reports.push_back(verify_decoy_hoeffding(cfg.verify, cfg.decoy));
      if (all || cfg.lemma == "phase") reports.push_back(verify_phase_bound(cfg.verify));
      json list = json::array();
      bool pass = true;
      for (const auto& r : reports) {
        list.push_back(report_json(r));
        pass = pass && r.pass;
      }
      json j = {{"config", config_node(cfg)}, {"pass", pass}, {"reports", list}};
      emit(j.dump(2) + "\n", out_path, out);
      return pass ? kExitOk : kExitCheckFailed;
    }
  } catch (const config_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const numeric_error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const domain_error& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const degenerate_input& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}

}  // namespace mmqkd
