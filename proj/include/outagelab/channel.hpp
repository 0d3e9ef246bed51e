#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace outagelab {

struct ChannelParams {
  int blocks = 1;            // B
  int rx_antennas = 1;       // m
  double csit_exponent = 0;  // d_e, CSIT noise variance = snr^(-d_e)
  int block_length = 1;      // L, metadata only
};

// One joint draw of the true gains, the transmitter-side estimates and the
// derived magnitude vectors. Matrices are row-major B x m.
struct ChannelSample {
  std::vector<std::complex<double>> h;
  std::vector<std::complex<double>> h_hat;
  std::vector<std::complex<double>> e;
  std::vector<double> gamma;      // |h_i|^2 per block
  std::vector<double> gamma_hat;  // |h_hat_i|^2 per block
  std::vector<double> gamma_bar;  // (2/sigma_e^2) gamma_i per block
};

double csit_noise_variance(double d_e, double snr);

// Estimation noise entries are CN(0, snr^(-d_e)); estimates carry the
// complementary variance so the true gains stay unit-variance.
// Throws if the noise variance would exceed 1.
ChannelSample sample_channel(const ChannelParams& p, double snr, std::uint64_t seed,
                             std::uint64_t stream);

// Gains-only fast path drawing the same values as sample_channel.
void sample_magnitudes(const ChannelParams& p, double snr, std::uint64_t seed,
                       std::uint64_t stream, std::span<double> gamma,
                       std::span<double> gamma_hat);

struct AlphaCoords {
  std::vector<double> alpha_hat;
  std::vector<double> alpha_bar;
};

// Normalized log-magnitudes: alpha = -log(gamma)/log(snr); zero gains map
// to +infinity.
AlphaCoords exponent_coords(const ChannelSample& s, double snr);

}  // namespace outagelab
