#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "outagelab/power.hpp"
#include "outagelab/rng.hpp"

using namespace outagelab;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("uniform policy allocates snr regardless of the estimates") {
  const auto p = uniform_policy();
  const std::vector<double> gh = {0.3, 2.0};
  CHECK(allocate_power(p, gh, 100.0) == 100.0);
  CHECK(allocate_power(p, std::vector<double>{1e-9}, 40.0) == 40.0);
}

TEST_CASE("truncated inversion hits the published exponents") {
  // flat estimates: no inversion
  auto p = truncated_inversion_policy(kInf, 1, 1.0);
  CHECK(allocate_power(p, std::vector<double>{1.0, 1.0}, 100.0) ==
        doctest::Approx(100.0));

  // alpha_hat = (1, 1) at snr 100 and d_peak = 10: exponent 1 + 2 = 3
  p = truncated_inversion_policy(10.0, 1, 1.0);
  CHECK(allocate_power(p, std::vector<double>{0.01, 0.01}, 100.0) ==
        doctest::Approx(1e6));

  // scale multiplies through
  p.scale = 0.5;
  CHECK(allocate_power(p, std::vector<double>{0.01, 0.01}, 100.0) ==
        doctest::Approx(5e5));
}

TEST_CASE("the peak constraint binds on every draw") {
  const auto p = truncated_inversion_policy(2.0, 2, 1.0);
  RandomStream rs(4, 0);
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> gh = {rs.uniform() * 2.0, rs.uniform() * 1e-4};
    const double power = allocate_power(p, gh, 50.0);
    CHECK(power <= p.scale * std::pow(50.0, 2.0) * (1.0 + 1e-12));
  }
}

TEST_CASE("allocation is nonincreasing in each estimate") {
  const auto p = truncated_inversion_policy(5.0, 1, 0.5);
  const double snr = 100.0;
  RandomStream rs(12, 0);
  for (int t = 0; t < 200; ++t) {
    const double g0 = rs.uniform() * 2.0;
    const double g1 = rs.uniform() * 2.0;
    const double base = allocate_power(p, std::vector<double>{g0, g1}, snr);
    CHECK(allocate_power(p, std::vector<double>{g0 * 1.5, g1}, snr) <= base + 1e-12);
    CHECK(allocate_power(p, std::vector<double>{g0, g1 * 1.5}, snr) <= base + 1e-12);
  }
}

TEST_CASE("d_peak = 1 reduces to the uniform allocation") {
  const auto p = truncated_inversion_policy(1.0, 1, 1.0, 0.9);
  RandomStream rs(9, 0);
  for (int i = 0; i < 500; ++i) {
    const std::vector<double> gh = {rs.uniform() * 3.0, rs.uniform() * 3.0};
    CHECK(allocate_power(p, gh, 200.0) == doctest::Approx(0.9 * 200.0));
  }
}

TEST_CASE("zero estimates draw the capped inversion power") {
  const auto p = truncated_inversion_policy(kInf, 1, 0.5);
  // alpha_cap = 1 + 1*1*0.5 + 1 = 2.5 with B = 1: P = snr^(1 + 2.5)
  const double power = allocate_power(p, std::vector<double>{0.0}, 100.0);
  CHECK(power == doctest::Approx(std::pow(100.0, 3.5)).epsilon(1e-9));
}

TEST_CASE("power audit: uniform policy is exactly on the constraint") {
  ChannelParams params{2, 1, 0.5, 1};
  const std::vector<double> grid = {100.0, 1000.0};
  const auto audit = audit_average_power(uniform_policy(), params, grid, 10000, 21);
  CHECK(audit.mean_power_ratio[0] == 1.0);
  CHECK(audit.mean_power_ratio[1] == 1.0);
  CHECK(audit.fitted_exponent == doctest::Approx(1.0));
  CHECK_FALSE(audit.violation);
}

TEST_CASE("power audit: peak-bound policy is exactly on the constraint") {
  ChannelParams params{2, 1, 1.0, 1};
  const auto policy = truncated_inversion_policy(1.0, 1, 1.0);
  const std::vector<double> grid = {100.0, 316.0, 1000.0};
  const auto audit = audit_average_power(policy, params, grid, 10000, 22, false);
  for (double r : audit.mean_power_ratio) CHECK(r == doctest::Approx(1.0));
  CHECK_FALSE(audit.violation);
}

TEST_CASE("calibrated inversion keeps the long-term exponent near one") {
  ChannelParams params{1, 1, 0.5, 1};
  const auto policy = truncated_inversion_policy(2.0, 1, 0.5);
  const std::vector<double> grid = {100.0, 1000.0, 10000.0};
  const auto audit = audit_average_power(policy, params, grid, 200000, 23);
  for (double r : audit.mean_power_ratio)
    CHECK(r == doctest::Approx(1.0).epsilon(0.05));
  CHECK(audit.fitted_exponent > 0.9);
  CHECK(audit.fitted_exponent < 1.1);
  CHECK_FALSE(audit.violation);
}

TEST_CASE("calibration scale never exceeds one") {
  ChannelParams params{2, 1, 0.5, 1};
  const auto policy = truncated_inversion_policy(kInf, 1, 0.5);
  for (double snr : {100.0, 1000.0}) {
    const auto cal = calibrate_policy(policy, params, snr, 50000, 31);
    CHECK(cal.scale <= 1.0 + 1e-9);
    CHECK(cal.scale > 0.0);
  }
}

TEST_CASE("policy JSON round trip") {
  auto p = truncated_inversion_policy(kInf, 2, 1.0, 0.7);
  auto j = p.to_json();
  CHECK(j.at("d_peak") == "inf");
  auto q = PowerPolicy::from_json(j);
  CHECK(q.kind == PowerPolicy::Kind::TruncatedInversion);
  CHECK(std::isinf(q.d_peak));
  CHECK(q.scale == 0.7);
  CHECK_THROWS_AS(PowerPolicy::from_json(nlohmann::json{{"kind", "Uniform"}, {"d_peak", 0.5}}),
                  std::invalid_argument);
}
