#include "outagelab/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "outagelab/rng.hpp"

namespace outagelab {

double csit_noise_variance(double d_e, double snr) {
  if (snr <= 0.0) throw std::invalid_argument("csit_noise_variance: snr must be > 0");
  if (d_e < 0.0) throw std::invalid_argument("csit_noise_variance: d_e must be >= 0");
  return std::pow(snr, -d_e);
}

namespace {

void check_params(const ChannelParams& p, double snr, double sigma2_e) {
  if (p.blocks < 1 || p.rx_antennas < 1)
    throw std::invalid_argument("sample_channel: B and m must be >= 1");
  if (snr <= 0.0) throw std::invalid_argument("sample_channel: snr must be > 0");
  if (sigma2_e > 1.0)
    throw std::invalid_argument("CSIT noisier than channel: snr^(-d_e) > 1");
}

}  // namespace

ChannelSample sample_channel(const ChannelParams& p, double snr, std::uint64_t seed,
                             std::uint64_t stream) {
  const double sigma2_e = csit_noise_variance(p.csit_exponent, snr);
  check_params(p, snr, sigma2_e);
  const double var_hat = 1.0 - sigma2_e;

  const int B = p.blocks;
  const int m = p.rx_antennas;
  ChannelSample s;
  s.h.resize(static_cast<std::size_t>(B) * m);
  s.h_hat.resize(s.h.size());
  s.e.resize(s.h.size());
  s.gamma.assign(B, 0.0);
  s.gamma_hat.assign(B, 0.0);
  s.gamma_bar.assign(B, 0.0);

  RandomStream rs(seed, stream);
  for (int i = 0; i < B; ++i) {
    for (int j = 0; j < m; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * m + j;
      s.h_hat[k] = rs.complex_normal(var_hat);
      s.e[k] = rs.complex_normal(sigma2_e);
      s.h[k] = s.h_hat[k] + s.e[k];
      s.gamma[i] += std::norm(s.h[k]);
      s.gamma_hat[i] += std::norm(s.h_hat[k]);
    }
    s.gamma_bar[i] = 2.0 / sigma2_e * s.gamma[i];
  }
  return s;
}

void sample_magnitudes(const ChannelParams& p, double snr, std::uint64_t seed,
                       std::uint64_t stream, std::span<double> gamma,
                       std::span<double> gamma_hat) {
  const double sigma2_e = csit_noise_variance(p.csit_exponent, snr);
  check_params(p, snr, sigma2_e);
  const double var_hat = 1.0 - sigma2_e;

  RandomStream rs(seed, stream);
  for (int i = 0; i < p.blocks; ++i) {
    double g = 0.0;
    double gh = 0.0;
    for (int j = 0; j < p.rx_antennas; ++j) {
      const std::complex<double> hh = rs.complex_normal(var_hat);
      const std::complex<double> ee = rs.complex_normal(sigma2_e);
      g += std::norm(hh + ee);
      gh += std::norm(hh);
    }
    gamma[i] = g;
    gamma_hat[i] = gh;
  }
}

AlphaCoords exponent_coords(const ChannelSample& s, double snr) {
  if (snr <= 1.0) throw std::invalid_argument("exponent_coords: snr must be > 1");
  const double l = std::log(snr);
  AlphaCoords a;
  a.alpha_hat.reserve(s.gamma_hat.size());
  a.alpha_bar.reserve(s.gamma_bar.size());
  const double inf = std::numeric_limits<double>::infinity();
  for (double g : s.gamma_hat) a.alpha_hat.push_back(g > 0.0 ? -std::log(g) / l : inf);
  for (double g : s.gamma_bar) a.alpha_bar.push_back(g > 0.0 ? -std::log(g) / l : inf);
  return a;
}

}  // namespace outagelab
