#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "outagelab/channel.hpp"
#include "outagelab/constellation.hpp"
#include "outagelab/power.hpp"
#include "outagelab/rotation.hpp"

namespace outagelab {

struct SimConfig {
  std::string name = "experiment";
  ChannelParams params;
  Constellation constellation;
  double rate = 0.5;  // R
  PowerPolicy policy;
  std::optional<RotationScheme> rotation;
  std::vector<double> snr_grid_db;  // strictly increasing
  std::int64_t n_samples = 0;
  // Optional per-point override of n_samples (rare events need deeper runs
  // at the high end of the grid).
  std::vector<std::int64_t> n_samples_per_point;
  std::uint64_t seed = 1;
  int min_events = 100;
  int threads = 0;  // 0 = hardware default

  std::shared_ptr<const MiTable> mi_table;  // required for unrotated runs
  int rotated_mi_noise = 256;               // noise draws per group MI estimate
  bool calibrate = true;                    // pilot-run scale for inversion policies
  std::int64_t n_pilot = 100000;
};

struct OutageEstimate {
  double snr_db = 0.0;
  double pout = 0.0;
  double ci_low = 0.0;   // Wilson 95%
  double ci_high = 0.0;
  std::int64_t n = 0;
  std::int64_t events = 0;
};

struct SlopeFit {
  double exponent = 0.0;  // empirical outage exponent (minus the log-log slope)
  double std_error = 0.0;
  int points_used = 0;
};

// Wilson score interval at 95%.
void wilson_interval(std::int64_t events, std::int64_t n, double* lo, double* hi);

// Per grid point: draw the channel, allocate power from the estimates, and
// count the samples whose block-averaged mutual information falls below the
// rate. Bit-identical output for a fixed config regardless of thread count.
std::vector<OutageEstimate> estimate_outage(const SimConfig& cfg);

// Weighted least squares of log10(pout) on log10(snr), restricted to points
// with at least min_events events. Throws if fewer than two points qualify.
SlopeFit fit_slope(std::span<const OutageEstimate> estimates, int min_events);

std::string estimates_csv(std::span<const OutageEstimate> estimates);

struct SweepRow {
  std::string name;
  std::string status;  // "ok" or an error message
  std::vector<OutageEstimate> estimates;
  double fitted_exponent = 0.0;
  double fit_std_error = 0.0;
  int points_used = 0;
  double theory_exponent = 0.0;
};

// Runs each config in order; per-config failures are recorded in the row
// instead of aborting the sweep.
std::vector<SweepRow> sweep(const std::vector<SimConfig>& cfgs);

std::string sweep_summary_csv(std::span<const SweepRow> rows);

}  // namespace outagelab
