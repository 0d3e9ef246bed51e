#include <cmath>
#include <complex>

#include "doctest.h"
#include "outagelab/channel.hpp"

using namespace outagelab;

TEST_CASE("csit noise variance follows the power law") {
  CHECK(csit_noise_variance(0.0, 123.0) == 1.0);
  CHECK(csit_noise_variance(1.0, 100.0) == doctest::Approx(0.01));
  CHECK(csit_noise_variance(0.5, 1e4) == doctest::Approx(0.01));
  CHECK_THROWS_AS(csit_noise_variance(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("samples decompose exactly as h = h_hat + e") {
  ChannelParams p{3, 2, 0.75, 1};
  for (int stream = 0; stream < 50; ++stream) {
    const auto s = sample_channel(p, 31.62, 9, stream);
    for (std::size_t k = 0; k < s.h.size(); ++k)
      CHECK(s.h[k] == s.h_hat[k] + s.e[k]);
    const double sigma2 = csit_noise_variance(0.75, 31.62);
    for (int i = 0; i < p.blocks; ++i) {
      double g = 0.0;
      for (int j = 0; j < p.rx_antennas; ++j)
        g += std::norm(s.h[static_cast<std::size_t>(i) * p.rx_antennas + j]);
      CHECK(s.gamma[i] == doctest::Approx(g).epsilon(1e-12));
      CHECK(s.gamma_bar[i] == doctest::Approx(2.0 / sigma2 * s.gamma[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("degenerate split at d_e = 0") {
  ChannelParams p{2, 1, 0.0, 1};
  const auto s = sample_channel(p, 100.0, 1, 0);
  for (const auto& z : s.h_hat) CHECK(z == std::complex<double>(0.0, 0.0));
  for (double g : s.gamma_hat) CHECK(g == 0.0);
}

TEST_CASE("near-perfect CSIT keeps gamma close to gamma_hat") {
  ChannelParams p{2, 1, 50.0, 1};  // sigma_e^2 = 1e-100
  const auto s = sample_channel(p, 100.0, 3, 4);
  for (int i = 0; i < p.blocks; ++i)
    CHECK(s.gamma[i] == doctest::Approx(s.gamma_hat[i]).epsilon(1e-8));
}

TEST_CASE("CSIT noisier than the channel is rejected") {
  ChannelParams p{1, 1, 1.0, 1};
  CHECK_THROWS_WITH_AS(sample_channel(p, 0.5, 1, 0),
                       doctest::Contains("CSIT noisier than channel"),
                       std::invalid_argument);
}

TEST_CASE("marginal statistics match the model") {
  ChannelParams p{1, 1, 0.5, 1};
  const double snr = 100.0;
  const double sigma2 = csit_noise_variance(0.5, snr);
  const int n = 100000;
  double var_h = 0.0, var_e = 0.0, mean_gh = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto s = sample_channel(p, snr, 77, i);
    var_h += std::norm(s.h[0]);
    var_e += std::norm(s.e[0]);
    mean_gh += s.gamma_hat[0];
  }
  CHECK(var_h / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(var_e / n == doctest::Approx(sigma2).epsilon(0.02));
  // gamma_hat mean = m (1 - sigma_e^2), sd of the mean = (1-sigma2)/sqrt(n)
  CHECK(std::abs(mean_gh / n - (1.0 - sigma2)) < 3.0 * (1.0 - sigma2) / std::sqrt(n));
}

TEST_CASE("unit-mean exponential gains for m = 1") {
  ChannelParams p{1, 1, 3.0, 1};
  const int n = 1000000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto s = sample_channel(p, 100.0, 2025, i);
    acc += s.gamma[0];
  }
  CHECK(std::abs(acc / n - 1.0) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("magnitude fast path reproduces the full sampler") {
  ChannelParams p{4, 2, 0.5, 1};
  std::vector<double> gamma(4), gamma_hat(4);
  for (int stream = 0; stream < 20; ++stream) {
    sample_magnitudes(p, 50.0, 11, stream, gamma, gamma_hat);
    const auto s = sample_channel(p, 50.0, 11, stream);
    for (int i = 0; i < 4; ++i) {
      CHECK(gamma[i] == s.gamma[i]);
      CHECK(gamma_hat[i] == s.gamma_hat[i]);
    }
  }
}

TEST_CASE("exponent coordinates") {
  ChannelSample s;
  const double snr = 100.0;
  s.gamma_hat = {1.0 / snr, 1.0, snr * snr, 0.0};
  s.gamma_bar = {1.0, 1.0, 1.0, 1.0};
  const auto a = exponent_coords(s, snr);
  CHECK(a.alpha_hat[0] == doctest::Approx(1.0));
  CHECK(a.alpha_hat[1] == doctest::Approx(0.0));
  CHECK(a.alpha_hat[2] == doctest::Approx(-2.0));
  CHECK(std::isinf(a.alpha_hat[3]));
  CHECK_THROWS_AS(exponent_coords(s, 1.0), std::invalid_argument);
}
