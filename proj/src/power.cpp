#include "outagelab/power.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "outagelab/rng.hpp"

namespace outagelab {

namespace {
constexpr std::uint64_t kPilotTag = 0x70c417;
constexpr std::uint64_t kAuditTag = 0xa0d17;
constexpr double kPowerCeiling = 1e300;
}  // namespace

double PowerPolicy::alpha_cap(int blocks) const {
  if (std::isfinite(d_peak)) return d_peak + 1.0;
  return 1.0 + rx_antennas * blocks * csit_exponent + 1.0;
}

nlohmann::json PowerPolicy::to_json() const {
  nlohmann::json j;
  j["kind"] = kind == Kind::Uniform ? "Uniform" : "TruncatedInversion";
  if (std::isfinite(d_peak))
    j["d_peak"] = d_peak;
  else
    j["d_peak"] = "inf";
  j["scale"] = scale;
  return j;
}

PowerPolicy PowerPolicy::from_json(const nlohmann::json& j) {
  PowerPolicy p;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "Uniform") {
    p.kind = Kind::Uniform;
  } else if (kind == "TruncatedInversion") {
    p.kind = Kind::TruncatedInversion;
  } else {
    throw std::invalid_argument("PowerPolicy: unknown kind " + kind);
  }
  if (j.contains("d_peak")) {
    if (j.at("d_peak").is_string())
      p.d_peak = std::numeric_limits<double>::infinity();
    else
      p.d_peak = j.at("d_peak").get<double>();
  }
  if (j.contains("scale")) p.scale = j.at("scale").get<double>();
  if (std::isfinite(p.d_peak) && p.d_peak < 1.0)
    throw std::invalid_argument("PowerPolicy: d_peak must be >= 1 when finite");
  return p;
}

PowerPolicy uniform_policy() { return PowerPolicy{}; }

PowerPolicy truncated_inversion_policy(double d_peak, int rx_antennas, double csit_exponent,
                                       double scale) {
  if (std::isfinite(d_peak) && d_peak < 1.0)
    throw std::invalid_argument("PowerPolicy: d_peak must be >= 1 when finite");
  PowerPolicy p;
  p.kind = PowerPolicy::Kind::TruncatedInversion;
  p.d_peak = d_peak;
  p.rx_antennas = rx_antennas;
  p.csit_exponent = csit_exponent;
  p.scale = scale;
  return p;
}

double allocate_power(const PowerPolicy& policy, std::span<const double> gamma_hat,
                      double snr) {
  if (policy.kind == PowerPolicy::Kind::Uniform) {
    if (snr <= 0.0) throw std::invalid_argument("allocate_power: snr must be > 0");
    return policy.scale * snr;
  }
  // Inversion exponents are measured against log(snr).
  if (snr <= 1.0) throw std::invalid_argument("allocate_power: snr must be > 1");

  const int B = static_cast<int>(gamma_hat.size());
  const double floor = std::pow(snr, -policy.alpha_cap(B));
  double inv = 1.0;
  for (double g : gamma_hat) {
    if (g < 0.0) throw std::invalid_argument("allocate_power: gamma_hat must be >= 0");
    const double eff = std::clamp(g, floor, 1.0);
    double r = 1.0 / eff;
    for (int a = 1; a < policy.rx_antennas; ++a) r /= eff;
    inv *= r;
  }
  double p = snr * inv;
  if (std::isfinite(policy.d_peak)) p = std::min(p, std::pow(snr, policy.d_peak));
  return std::min(policy.scale * p, kPowerCeiling);
}

PowerPolicy calibrate_policy(const PowerPolicy& policy, const ChannelParams& params,
                             double snr, std::int64_t n_pilot, std::uint64_t seed) {
  if (policy.kind == PowerPolicy::Kind::Uniform) return policy;
  PowerPolicy base = policy;
  base.scale = 1.0;
  std::vector<double> gamma(params.blocks);
  std::vector<double> gamma_hat(params.blocks);
  const std::uint64_t pilot_seed = derive_seed(seed, kPilotTag, 0);
  double acc = 0.0;
  for (std::int64_t i = 0; i < n_pilot; ++i) {
    sample_magnitudes(params, snr, pilot_seed, static_cast<std::uint64_t>(i), gamma,
                      gamma_hat);
    acc += allocate_power(base, gamma_hat, snr);
  }
  PowerPolicy out = policy;
  out.scale = snr * n_pilot / acc;
  return out;
}

PowerAudit audit_average_power(const PowerPolicy& policy, const ChannelParams& params,
                               std::span<const double> snr_grid, std::int64_t n_samples,
                               std::uint64_t seed, bool calibrate) {
  if (n_samples < 10000)
    throw std::invalid_argument("audit_average_power: n_samples must be >= 1e4");
  PowerAudit audit;
  audit.snr_grid.assign(snr_grid.begin(), snr_grid.end());
  std::vector<double> gamma(params.blocks);
  std::vector<double> gamma_hat(params.blocks);
  std::vector<double> log_mean;
  for (std::size_t k = 0; k < snr_grid.size(); ++k) {
    const double snr = snr_grid[k];
    PowerPolicy p = policy;
    if (calibrate)
      p = calibrate_policy(policy, params, snr, std::min<std::int64_t>(n_samples, 100000),
                           derive_seed(seed, kAuditTag, 2 * k + 1));
    const std::uint64_t point_seed = derive_seed(seed, kAuditTag, 2 * k);
    double acc = 0.0;
    for (std::int64_t i = 0; i < n_samples; ++i) {
      sample_magnitudes(params, snr, point_seed, static_cast<std::uint64_t>(i), gamma,
                        gamma_hat);
      acc += allocate_power(p, gamma_hat, snr);
    }
    const double mean = acc / n_samples;
    audit.mean_power_ratio.push_back(mean / snr);
    log_mean.push_back(std::log10(mean));
  }
  // Plain least squares of log E[P] on log snr.
  const std::size_t n = snr_grid.size();
  if (n >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x = std::log10(snr_grid[k]);
      sx += x;
      sy += log_mean[k];
      sxx += x * x;
      sxy += x * log_mean[k];
    }
    audit.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  } else {
    audit.fitted_exponent = 1.0;
  }
  audit.violation = audit.fitted_exponent > 1.1;
  return audit;
}

}  // namespace outagelab
