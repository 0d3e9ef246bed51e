#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "outagelab/channel.hpp"

namespace outagelab {

// Long-term power rule applied uniformly across the blocks of a codeword.
// TruncatedInversion realizes the exponent-optimal rule
//   P = scale * min(snr^d_peak, snr * prod_i clamp(gamma_hat_i)^(-m))
// where estimates are clamped into [snr^(-alpha_cap), 1].
struct PowerPolicy {
  enum class Kind { Uniform, TruncatedInversion };

  Kind kind = Kind::Uniform;
  double d_peak = std::numeric_limits<double>::infinity();
  int rx_antennas = 1;     // m
  double csit_exponent = 0;  // d_e, enters the default inversion cap
  double scale = 1.0;

  // Inversion cap on the per-block exponent; d_peak + 1 when the peak is
  // finite, 1 + m*B*d_e + 1 otherwise.
  double alpha_cap(int blocks) const;

  nlohmann::json to_json() const;
  static PowerPolicy from_json(const nlohmann::json& j);
};

PowerPolicy uniform_policy();
PowerPolicy truncated_inversion_policy(double d_peak, int rx_antennas, double csit_exponent,
                                       double scale = 1.0);

// Per-codeword power for one CSIT draw. snr must be > 1.
double allocate_power(const PowerPolicy& policy, std::span<const double> gamma_hat,
                      double snr);

// Policy with scale set so the empirical mean power equals snr on a pilot
// run (no-op for Uniform).
PowerPolicy calibrate_policy(const PowerPolicy& policy, const ChannelParams& params,
                             double snr, std::int64_t n_pilot, std::uint64_t seed);

struct PowerAudit {
  std::vector<double> snr_grid;
  std::vector<double> mean_power_ratio;  // empirical E[P]/snr per grid point
  double fitted_exponent = 0.0;          // least-squares slope of log E[P] vs log snr
  bool violation = false;                // fitted exponent > 1.1
};

// Empirical check of the long-term constraint E[P] <= snr. When calibrate
// is set, each grid point gets its own pilot-run scale first.
PowerAudit audit_average_power(const PowerPolicy& policy, const ChannelParams& params,
                               std::span<const double> snr_grid, std::int64_t n_samples,
                               std::uint64_t seed, bool calibrate = true);

}  // namespace outagelab
