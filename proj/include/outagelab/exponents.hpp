#pragma once

#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

namespace outagelab {

// Sentinel for "outage probability decays exponentially": min() against it
// is exact, unlike any large float stand-in.
inline constexpr double kDecaysExponentially = std::numeric_limits<double>::infinity();

struct ExponentQuery {
  int blocks = 1;       // B
  int rx_antennas = 1;  // m
  double rate = 0.5;    // R, bits per channel use
  int bits = 1;         // M, constellation bits per symbol
  double csit_exponent = 0.0;  // d_e
  double peak_exponent = std::numeric_limits<double>::infinity();  // d_peak
  int rotation_size = 1;  // N; 1 = unrotated
};

struct DnEntry {
  int n = 0;
  int branch = 0;  // 1 = peak regime, 2 = average regime
  double value = 0.0;
};

struct ExponentResult {
  double d = 0.0;
  std::string case_label;
  std::vector<DnEntry> d_n_table;  // winning branch per conditioning index n
  int argmin_n = -1;
  int argmin_branch = 0;
  double opt_alpha_hat_sum = 0.0;  // sum of estimate exponents at the optimum
  bool rate_boundary = false;      // BR/M (or BR/(MN)) is an integer
  double d_above_boundary = 0.0;   // exponent just above the rate boundary

  nlohmann::json to_json() const;
};

// Ceiling with integers snapped (BR/M arrives through floating point).
double ceil_rate(double x);

// B - ceil(BR/M) + 1, the block-diversity limit of any rate-R/M scheme.
int singleton_bound(int B, double R, int M);

// B + N - N*ceil(BR/(MN)); requires N | B.
int singleton_bound_rotated(int B, double R, int M, int N);

// Closed-form outage exponent, unrotated transmission (requires N = 1):
//   m*d_SB*d_peak              when d_peak <= 1 + m*d_SB*d_e  (peak-limited)
//   m*d_SB*(1 + m*d_SB*d_e)    otherwise                      (CSIT-limited)
ExponentResult outage_exponent_thm1(const ExponentQuery& q);

// Closed-form outage exponent with full-diversity rotations of size N and
// no peak constraint: m*d_SB_rot*(1 + m*d_SB_rot*d_e).
// Throws if a finite peak exponent is supplied.
ExponentResult outage_exponent_thm2(const ExponentQuery& q);

// Published per-case candidate exponent conditioned on n estimates sitting
// above the CSIT noise level; branch 1 = peak-power regime, branch 2 =
// average-power regime. Returns kDecaysExponentially where the conditioned
// outage set is empty.
double case_exponent_dn(const ExponentQuery& q, int n, int branch);

// Independent brute-force minimization over the large-deviation outage
// region: enumerates good/bad block patterns and both power regimes, and
// solves each induced linear program at its vertex. B <= 6.
ExponentResult oracle_exponent(const ExponentQuery& q);

// Same, with the outage count taken over rotation groups (a group counts
// as good when any of its blocks keeps a growing effective SNR). Requires
// N | B and an unconstrained peak.
ExponentResult oracle_exponent_rotated(const ExponentQuery& q);

// Coarse grid scan over the same region as a sanity net for the vertex
// solver; only practical for B <= 2. Returns the grid minimum, which is
// correct to within 2*m*2B*step.
double grid_check_exponent(const ExponentQuery& q, double step = 0.05);

struct StaircaseRow {
  double rate_fraction = 0.0;  // R/M
  int d_sb = 0;
  double d = 0.0;
  bool rate_boundary = false;
  double d_above_boundary = 0.0;
};

// d versus R/M table for fixed (B, m, d_e, d_peak, N).
std::vector<StaircaseRow> exponent_staircase(int B, int m, double d_e, double d_peak,
                                             int N, const std::vector<double>& rm_grid,
                                             int bits = 2);

std::string staircase_csv(const std::vector<StaircaseRow>& rows);

}  // namespace outagelab
