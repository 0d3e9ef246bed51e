#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace outagelab {

// Normalized signal set: zero mean, unit average energy, 2^M points.
struct Constellation {
  std::vector<std::complex<double>> points;
  int bits_per_symbol = 0;
  std::string kind;  // "PSK", "QAM" or "custom"

  int size() const { return static_cast<int>(points.size()); }
};

// kind is "PSK" (any M >= 1) or "QAM" (M in {1, 2, 4, 6}).
// Throws std::invalid_argument for unsupported combinations.
Constellation build_constellation(const std::string& kind, int M);

struct MiEstimate {
  double value = 0.0;      // bits per channel use, clamped to [0, M]
  double std_error = 0.0;  // Monte Carlo standard error of the mean
};

// Monte Carlo estimate of the coded-modulation AWGN mutual information at
// linear SNR s. Inputs are enumerated exactly; the expectation over the
// unit-variance complex noise is sampled n_noise times. Deterministic in
// (c, s, n_noise, seed).
MiEstimate awgn_mutual_information(const Constellation& c, double s,
                                   std::int64_t n_noise, std::uint64_t seed);

// Cached mutual-information curve with a monotone interpolant.
// Grid always starts at the exact anchor s = 0 -> 0 and saturates at
// the last node for any query above it.
class MiTable {
 public:
  MiTable() = default;
  MiTable(std::string kind, int bits_per_symbol, std::vector<double> snr_grid,
          std::vector<double> mi_values, double abs_error_bound);

  // Shape-preserving cubic interpolation in log(1+s); nondecreasing in s,
  // output in [0, M].
  double lookup(double s) const;

  const std::vector<double>& snr_grid() const { return snr_grid_; }
  const std::vector<double>& mi_values() const { return mi_values_; }
  double abs_error_bound() const { return abs_error_bound_; }
  int bits_per_symbol() const { return bits_per_symbol_; }
  const std::string& kind() const { return kind_; }
  double s_max() const { return snr_grid_.back(); }

  nlohmann::json to_json() const;
  static MiTable from_json(const nlohmann::json& j);

 private:
  std::string kind_;
  int bits_per_symbol_ = 0;
  std::vector<double> snr_grid_;   // includes the 0 anchor
  std::vector<double> mi_values_;  // isotonic, in [0, M]
  double abs_error_bound_ = 0.0;
  std::vector<double> u_;          // log1p(snr_grid)
  std::vector<double> slopes_;     // Hermite tangents

  void prepare();
};

// Log-spaced grid on [s_min, s_max] (n_points >= 16) plus the s = 0 anchor.
MiTable build_mi_table(const Constellation& c, double s_min, double s_max,
                       int n_points, std::int64_t n_noise, std::uint64_t seed);

inline double mi_lookup(const MiTable& t, double s) { return t.lookup(s); }

}  // namespace outagelab
