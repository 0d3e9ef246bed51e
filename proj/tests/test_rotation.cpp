#include <cmath>
#include <complex>

#include "doctest.h"
#include "outagelab/rng.hpp"
#include "outagelab/rotation.hpp"

using namespace outagelab;

TEST_CASE("built-in rotations are unitary") {
  for (int N : {1, 2, 3, 4}) {
    const auto u = build_rotation("cyclotomic", N);
    CHECK(u.unitarity_defect() <= 1e-10);
    const auto id = build_rotation("identity", N);
    CHECK(id.unitarity_defect() <= 1e-10);
  }
  CHECK(build_rotation("cyclotomic", 1).at(0, 0) == std::complex<double>(1.0, 0.0));
  CHECK_THROWS_AS(build_rotation("cyclotomic", 5), std::invalid_argument);
  CHECK_THROWS_AS(build_rotation("hadamard", 2), std::invalid_argument);
}

TEST_CASE("rotation preserves vector norms") {
  const auto u = build_rotation("cyclotomic", 4);
  RandomStream rs(17, 0);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::complex<double>> v(4);
    double norm_in = 0.0;
    for (auto& z : v) {
      z = rs.complex_normal(1.0);
      norm_in += std::norm(z);
    }
    const auto w = u.apply(v);
    double norm_out = 0.0;
    for (const auto& z : w) norm_out += std::norm(z);
    CHECK(norm_out == doctest::Approx(norm_in).epsilon(1e-10));
  }
}

TEST_CASE("identity fails full diversity with a concrete witness") {
  const auto id = build_rotation("identity", 2);
  const auto bpsk = build_constellation("PSK", 1);
  const auto report = verify_full_diversity(id, bpsk);
  CHECK_FALSE(report.ok);
  REQUIRE(report.witness.has_value());
  // some coordinate of the witness is zero while the vector is not
  bool has_zero = false, has_nonzero = false;
  for (const auto& z : *report.witness) {
    if (std::abs(z) < 1e-12) has_zero = true;
    if (std::abs(z) > 1e-9) has_nonzero = true;
  }
  CHECK(has_zero);
  CHECK(has_nonzero);
}

TEST_CASE("cyclotomic rotations are fully diverse for small alphabets") {
  for (int N : {2, 3, 4}) {
    const auto u = build_rotation("cyclotomic", N);
    for (const char* kind : {"PSK", "QAM"}) {
      for (int M : {1, 2}) {
        const auto c = build_constellation(kind, M);
        const auto report = verify_full_diversity(u, c);
        CAPTURE(N);
        CAPTURE(kind);
        CAPTURE(M);
        CHECK(report.ok);
        CHECK(report.min_product_distance > 0.0);
      }
    }
  }
  // 16-QAM at N = 2 stays within budget
  const auto u2 = build_rotation("cyclotomic", 2);
  const auto qam16 = build_constellation("QAM", 4);
  CHECK(verify_full_diversity(u2, qam16).ok);
}

TEST_CASE("scalar rotations always pass") {
  UnitaryMatrix u;
  u.n = 1;
  u.a = {std::polar(1.0, 0.7)};
  const auto c = build_constellation("PSK", 2);
  CHECK(verify_full_diversity(u, c).ok);
}

TEST_CASE("diversity verification is reproducible and budget-limited") {
  const auto u = build_rotation("cyclotomic", 2);
  const auto qpsk = build_constellation("PSK", 2);
  const auto a = verify_full_diversity(u, qpsk);
  const auto b = verify_full_diversity(u, qpsk);
  CHECK(a.min_product_distance == b.min_product_distance);

  const auto u4 = build_rotation("cyclotomic", 4);
  const auto big = build_constellation("QAM", 6);
  CHECK_THROWS_WITH_AS(verify_full_diversity(u4, big), doctest::Contains("budget"),
                       std::runtime_error);
}

TEST_CASE("rotation scheme covers all blocks") {
  const auto s = build_rotation_scheme("cyclotomic", 2, 6);
  CHECK(s.groups == 3);
  CHECK(s.matrices.size() == 3);
  CHECK_THROWS_AS(build_rotation_scheme("cyclotomic", 4, 6), std::invalid_argument);
}

TEST_CASE("rotation JSON round trip") {
  const auto u = build_rotation("cyclotomic", 2);
  const auto j = u.to_json();
  const auto v = UnitaryMatrix::from_json(j);
  CHECK(v.n == 2);
  for (int i = 0; i < 4; ++i) CHECK(v.a[i] == u.a[i]);
}

TEST_CASE("group MI factorizes under the identity rotation") {
  const auto bpsk = build_constellation("PSK", 1);
  const auto id = build_rotation("identity", 2);
  for (double s : {0.5, 2.0}) {
    const auto group = rotated_group_mi(id, bpsk, {s, s}, 200000, 31);
    const auto scalar = awgn_mutual_information(bpsk, s, 200000, 32);
    const double tol =
        3.0 * std::sqrt(group.std_error * group.std_error +
                        scalar.std_error * scalar.std_error) +
        1e-6;
    CHECK(std::abs(group.value - scalar.value) < tol);
  }
}

TEST_CASE("group MI limits") {
  const auto bpsk = build_constellation("PSK", 1);
  const auto u = build_rotation("cyclotomic", 2);
  CHECK(rotated_group_mi(u, bpsk, {0.0, 0.0}, 500, 3).value == 0.0);
  CHECK(rotated_group_mi(u, bpsk, {1e6, 1e6}, 500, 3).value ==
        doctest::Approx(1.0).epsilon(1e-3));
  const auto qpsk = build_constellation("PSK", 2);
  CHECK(rotated_group_mi(u, qpsk, {1e6, 1e6}, 300, 4).value ==
        doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("group MI is statistically nondecreasing in each branch SNR") {
  const auto bpsk = build_constellation("PSK", 1);
  const auto u = build_rotation("cyclotomic", 2);
  double prev = -1.0;
  for (double s : {0.0, 0.3, 1.0, 3.0, 10.0, 100.0}) {
    const auto est = rotated_group_mi(u, bpsk, {s, 1.0}, 100000, 5);
    CHECK(est.value > prev - 3.0 * est.std_error - 1e-3);
    prev = est.value;
  }
}

TEST_CASE("group MI budget") {
  const auto qam64 = build_constellation("QAM", 6);
  const auto u = build_rotation("cyclotomic", 3);
  CHECK_THROWS_WITH_AS(rotated_group_mi(u, qam64, {1.0, 1.0, 1.0}, 10, 1),
                       doctest::Contains("budget"), std::runtime_error);
}
