#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mmqkd/channel_sim.hpp"
#include "mmqkd/decoy.hpp"
#include "mmqkd/detector_model.hpp"
#include "mmqkd/epsilon.hpp"
#include "mmqkd/keyrate.hpp"
#include "mmqkd/mc_verify.hpp"

namespace mmqkd {

// 10 dB, 2 degree misalignment, otherwise ChannelSpec defaults.
inline ChannelSpec reference_channel() {
  ChannelSpec c;
  c.eta_ch = 0.1;
  c.theta_deg = 2.0;
  return c;
}

// Everything a subcommand can read from a config file. Every section is optional.
struct RunConfig {
  DetectorSpec detector;
  ChannelSpec channel = reference_channel();  // detector mirrors `detector`, eta_ch follows loss_db
  double loss_db = 10.0;
  DecoyConfig decoy;
  EpsilonBudget epsilon;
  double f_ec = 1.16;
  bool transcript_bit = false;
  std::vector<double> scan_loss_db{0.0, 5.0, 10.0, 15.0, 20.0};
  OracleOptions oracle;
  TrialConfig verify;
  std::string lemma = "all";

  // Throws config_error naming the offending field.
  void validate() const;
};

// JSON text -> RunConfig. Unknown keys and wrong types are config errors with a field path.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);
// Fully resolved config as JSON text.
std::string run_config_json(const RunConfig& cfg);

struct KeyRateRow {
  double loss_db = 0.0;
  double key_rate = 0.0;  // key bits per sent pulse
  std::uint64_t key_length = 0;
  double phase_bound = 1.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
};

// Closed-form deltas, expected statistics per loss point, decoy key length. Rows follow the input order.
std::vector<KeyRateRow> keyrate_scan(const RunConfig& cfg);
KeyRateRow keyrate_row(const RunConfig& cfg, double loss_db, const Observations& obs);

inline constexpr const char* kCsvHeader = "loss_dB,key_rate_per_pulse,key_length,phase_bound,delta1,delta2";
std::string format_csv(const std::vector<KeyRateRow>& rows);

// Exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// argv[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mmqkd
