#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "outagelab/constellation.hpp"

namespace outagelab {

// Dense N x N complex matrix, row-major. N stays tiny (<= 4 for the
// built-in families), so no linear-algebra dependency is warranted.
struct UnitaryMatrix {
  int n = 0;
  std::vector<std::complex<double>> a;

  std::complex<double>& at(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
  const std::complex<double>& at(int r, int c) const {
    return a[static_cast<std::size_t>(r) * n + c];
  }
  std::vector<std::complex<double>> apply(const std::vector<std::complex<double>>& v) const;
  double unitarity_defect() const;  // max |U U^H - I|

  nlohmann::json to_json() const;
  static UnitaryMatrix from_json(const nlohmann::json& j);
};

// Block-diagonal precoder assembled from K = B/N copies of one rotation.
struct RotationScheme {
  int rotation_size = 1;  // N
  int groups = 1;         // K
  std::string family;     // "identity", "cyclotomic" or "custom"
  std::vector<UnitaryMatrix> matrices;
};

// "identity" works for any N; "cyclotomic" ships N in {1, 2, 3, 4} built
// from N equispaced unit-circle roots whose powers are jointly of high
// enough algebraic degree that integer-lattice differences never vanish
// componentwise. Unitarity is certified on return.
UnitaryMatrix build_rotation(const std::string& family, int N);

RotationScheme build_rotation_scheme(const std::string& family, int N, int blocks);

struct DiversityReport {
  bool ok = false;
  double min_product_distance = 0.0;
  std::optional<std::vector<std::complex<double>>> witness;  // failing difference

  nlohmann::json to_json() const;
};

// Exhaustive full-diversity certificate: every nonzero difference vector
// over X^N must rotate to a vector with all entries nonzero. Budget
// (2^M)^N <= 2^20.
DiversityReport verify_full_diversity(const UnitaryMatrix& U, const Constellation& c);

// Monte Carlo mutual information of the rotated group channel
//   z_i = sqrt(effective_snrs[i]) * (U s)_i + w_i,  s uniform on X^N,
// in bits per channel use per block (i.e. divided by N). All 2^(M*N)
// hypotheses are enumerated exactly; budget 2^(M*N) <= 2^16.
MiEstimate rotated_group_mi(const UnitaryMatrix& U, const Constellation& c,
                            const std::vector<double>& effective_snrs,
                            std::int64_t n_noise, std::uint64_t seed);

}  // namespace outagelab
