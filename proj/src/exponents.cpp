#include "outagelab/exponents.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace outagelab {

namespace {

constexpr double kInf = kDecaysExponentially;
constexpr double kSnapTol = 1e-9;

void validate_query(const ExponentQuery& q) {
  if (q.blocks < 1) throw std::invalid_argument("exponent query: B must be >= 1");
  if (q.rx_antennas < 1) throw std::invalid_argument("exponent query: m must be >= 1");
  if (q.bits < 1) throw std::invalid_argument("exponent query: M must be >= 1");
  if (!(q.rate > 0.0) || q.rate > q.bits)
    throw std::invalid_argument("exponent query: need 0 < R <= M");
  if (q.csit_exponent < 0.0) throw std::invalid_argument("exponent query: d_e must be >= 0");
  if (!(q.peak_exponent > 0.0)) throw std::invalid_argument("exponent query: d_peak must be > 0");
  if (q.rotation_size < 1) throw std::invalid_argument("exponent query: N must be >= 1");
  if (q.rotation_size > 1 && q.blocks % q.rotation_size != 0)
    throw std::invalid_argument("exponent query: N must divide B");
}

double rate_load(const ExponentQuery& q) {
  return static_cast<double>(q.blocks) * q.rate / q.bits;  // BR/M
}

bool near_integer(double x) { return std::abs(x - std::round(x)) < kSnapTol; }

// Closed forms parameterized by the diversity order, shared by the theorem
// evaluators and the boundary ("just above this rate") values.
double thm1_value(int m, int d_sb, double d_e, double d_peak, bool* peak_limited) {
  const double threshold = 1.0 + m * d_sb * d_e;
  const bool pl = d_peak <= threshold;
  if (peak_limited) *peak_limited = pl;
  return pl ? m * d_sb * d_peak : m * d_sb * threshold;
}

double thm2_value(int m, int d_sb_rot, double d_e) {
  return m * d_sb_rot * (1.0 + m * d_sb_rot * d_e);
}

}  // namespace

double ceil_rate(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) < kSnapTol) return r;
  return std::ceil(x);
}

int singleton_bound(int B, double R, int M) {
  if (!(R > 0.0) || R > M) throw std::invalid_argument("singleton_bound: need 0 < R <= M");
  return B - static_cast<int>(ceil_rate(static_cast<double>(B) * R / M)) + 1;
}

int singleton_bound_rotated(int B, double R, int M, int N) {
  if (!(R > 0.0) || R > M)
    throw std::invalid_argument("singleton_bound_rotated: need 0 < R <= M");
  if (N < 1 || B % N != 0)
    throw std::invalid_argument("singleton_bound_rotated: N must divide B");
  return B + N - N * static_cast<int>(ceil_rate(static_cast<double>(B) * R / (M * N)));
}

double case_exponent_dn(const ExponentQuery& q, int n, int branch) {
  validate_query(q);
  if (n < 0 || n > q.blocks) throw std::invalid_argument("case_exponent_dn: n out of range");
  if (q.rotation_size != 1)
    throw std::invalid_argument("case_exponent_dn: defined for N = 1");
  const int B = q.blocks;
  const int m = q.rx_antennas;
  const double de = q.csit_exponent;
  const double dp = q.peak_exponent;
  const double load = rate_load(q);
  const double kceil = ceil_rate(load);
  const bool load_le_n = load <= n + kSnapTol;

  if (branch == 1) {
    if (!std::isfinite(dp)) return kInf;  // peak regime unreachable
    if (dp < de) {
      if (!load_le_n) return m * (B - n) * de;
      return m * (B - n) * de + m * dp * (n - kceil + 1.0);
    }
    if (load_le_n) return kInf;
    const double rem = ceil_rate(load - n);
    return m * (dp - de) * (B - n + 1.0 - rem) + std::max(dp - 1.0, m * (B - n) * de);
  }
  if (branch == 2) {
    if (dp < 1.0 + m * (B - n) * de) return kInf;
    if (load_le_n) return kInf;
    const double rem = ceil_rate(load - n);
    return m * (B - n) * de + m * (B - n - rem + 1.0) * (1.0 + m * (B - n) * de - de);
  }
  throw std::invalid_argument("case_exponent_dn: branch must be 1 or 2");
}

ExponentResult outage_exponent_thm1(const ExponentQuery& q) {
  validate_query(q);
  if (q.rotation_size != 1)
    throw std::invalid_argument("outage_exponent_thm1: requires N = 1");
  const int m = q.rx_antennas;
  const int d_sb = singleton_bound(q.blocks, q.rate, q.bits);

  ExponentResult r;
  bool peak_limited = false;
  r.d = thm1_value(m, d_sb, q.csit_exponent, q.peak_exponent, &peak_limited);
  r.case_label = peak_limited ? "Peak-limited" : "CSIT-limited";
  for (int n = 0; n <= q.blocks; ++n) {
    const double d1 = case_exponent_dn(q, n, 1);
    const double d2 = case_exponent_dn(q, n, 2);
    DnEntry e;
    e.n = n;
    e.branch = d2 <= d1 ? 2 : 1;
    e.value = std::min(d1, d2);
    r.d_n_table.push_back(e);
    if (r.argmin_n < 0 || e.value < r.d_n_table[r.argmin_n].value) {
      r.argmin_n = n;
      r.argmin_branch = e.branch;
    }
  }
  const double load = rate_load(q);
  r.rate_boundary = near_integer(load);
  if (r.rate_boundary && q.rate < q.bits) {
    const int d_sb_above = q.blocks - (static_cast<int>(std::round(load)) + 1) + 1;
    r.d_above_boundary = thm1_value(m, d_sb_above, q.csit_exponent, q.peak_exponent, nullptr);
  } else {
    r.d_above_boundary = r.d;
  }
  return r;
}

ExponentResult outage_exponent_thm2(const ExponentQuery& q) {
  validate_query(q);
  if (std::isfinite(q.peak_exponent))
    throw std::invalid_argument("rotated exponent defined for unconstrained peak only");
  const int m = q.rx_antennas;
  const int N = q.rotation_size;
  const int d_sb_rot = singleton_bound_rotated(q.blocks, q.rate, q.bits, N);

  ExponentResult r;
  r.d = thm2_value(m, d_sb_rot, q.csit_exponent);
  r.case_label = "rotated";
  const double group_load = rate_load(q) / N;  // BR/(MN)
  for (int n = 0; n <= q.blocks; ++n) {
    const double gn = std::ceil(static_cast<double>(n) / N);
    DnEntry e;
    e.n = n;
    e.branch = 2;
    if (gn >= ceil_rate(group_load)) {
      e.value = kInf;
    } else {
      const double kn = ceil_rate(group_load - gn) - 1.0;
      const double tail = m * (q.blocks - n) * q.csit_exponent;
      e.value = m * N * (q.blocks / N - gn - kn) * (1.0 + tail - q.csit_exponent) + tail;
    }
    r.d_n_table.push_back(e);
    if (std::isfinite(e.value) &&
        (r.argmin_n < 0 || e.value < r.d_n_table[r.argmin_n].value)) {
      r.argmin_n = n;
      r.argmin_branch = 2;
    }
  }
  r.rate_boundary = near_integer(group_load);
  if (r.rate_boundary && q.rate < q.bits) {
    const int d_sb_above =
        q.blocks + N - N * (static_cast<int>(std::round(group_load)) + 1);
    r.d_above_boundary = thm2_value(m, d_sb_above, q.csit_exponent);
  } else {
    r.d_above_boundary = r.d;
  }
  return r;
}

namespace {

// Minimum of the pattern-induced linear program in the peak-power regime
// (power exponent pinned at d_peak). Counts: above-noise-level blocks split
// into ag good / ab bad, tied blocks into tg good / tb bad.
double lp_peak_regime(int B, int n, int m, double de, double dp, int ag, int ab, int tg,
                      int tb) {
  if (!std::isfinite(dp)) return kInf;
  if (ag > 0 && dp < de) return kInf;  // good needs bar-alpha <= dp - de >= 0
  // A bad tied block needs alpha-hat in (dp, de), which must be nonempty;
  // at dp == de the tied indicators are identically one.
  if (tb > 0 && !(dp < de)) return kInf;
  // Estimate-exponent sum: above blocks start at de, bad tied blocks at dp.
  double s_lb = (B - n) * de + tb * dp;
  double s_ub;
  if (B - n > 0) {
    s_ub = kInf;
  } else {
    s_ub = tg * std::min(de, dp) + tb * de;  // tied blocks are capped at de
  }
  const double s_needed = std::max(s_lb, (dp - 1.0) / m);
  if (s_needed > s_ub + kSnapTol) return kInf;
  return m * s_needed + m * ab * std::max(0.0, dp - de);
}

// Same in the average-power regime (power exponent 1 + m*sum alpha-hat,
// feasible only under the peak). Bad tied blocks are impossible here.
double lp_avg_regime(int B, int n, int m, double de, double dp, int ag, int ab, int tb) {
  if (tb > 0) return kInf;
  double s = (B - n) * de;
  if (ag > 0) s = std::max(s, (de - 1.0) / m);  // good above block needs 1+ms >= de
  if (std::isfinite(dp) && s > (dp - 1.0) / m + kSnapTol) return kInf;
  return m * s + m * ab * std::max(0.0, 1.0 + m * s - de);
}

}  // namespace

ExponentResult oracle_exponent(const ExponentQuery& q) {
  validate_query(q);
  if (q.rotation_size != 1) throw std::invalid_argument("oracle_exponent: requires N = 1");
  if (q.blocks > 6) throw std::runtime_error("oracle budget exceeded: B must be <= 6");
  const int B = q.blocks;
  const int m = q.rx_antennas;
  const double de = q.csit_exponent;
  const double dp = q.peak_exponent;
  const int good_max = static_cast<int>(ceil_rate(rate_load(q))) - 1;

  ExponentResult r;
  r.d = kInf;
  for (int n = 0; n <= B; ++n) {
    double best1 = kInf;
    double best2 = kInf;
    double best_s = 0.0;
    // Blocks [0, B-n) live above the CSIT noise level, [B-n, B) are tied to
    // it. Bit set in the mask = the block keeps a growing effective SNR.
    for (unsigned mask = 0; mask < (1u << B); ++mask) {
      const int good = std::popcount(mask);
      if (good > good_max) continue;
      const int ag = std::popcount(mask & ((1u << (B - n)) - 1u));
      const int tg = good - ag;
      const int ab = (B - n) - ag;
      const int tb = n - tg;
      const double v1 = lp_peak_regime(B, n, m, de, dp, ag, ab, tg, tb);
      const double v2 = lp_avg_regime(B, n, m, de, dp, ag, ab, tb);
      best1 = std::min(best1, v1);
      if (v2 < best2) {
        best2 = v2;
        double s = (B - n) * de;
        if (ag > 0) s = std::max(s, (de - 1.0) / m);
        best_s = s;
      }
    }
    DnEntry e;
    e.n = n;
    e.branch = best2 <= best1 ? 2 : 1;
    e.value = std::min(best1, best2);
    r.d_n_table.push_back(e);
    if (e.value < r.d) {
      r.d = e.value;
      r.argmin_n = n;
      r.argmin_branch = e.branch;
      r.opt_alpha_hat_sum = e.branch == 2 ? best_s : 0.0;
    }
  }

  const int d_sb = singleton_bound(q.blocks, q.rate, q.bits);
  if (dp >= 1.0 + m * B * de)
    r.case_label = "A";
  else if (dp > 1.0 + m * d_sb * de)
    r.case_label = "B";
  else
    r.case_label = "C";
  r.rate_boundary = near_integer(rate_load(q));
  r.d_above_boundary = r.d;
  return r;
}

ExponentResult oracle_exponent_rotated(const ExponentQuery& q) {
  validate_query(q);
  if (q.blocks % q.rotation_size != 0)
    throw std::invalid_argument("oracle_exponent_rotated: N must divide B");
  if (std::isfinite(q.peak_exponent))
    throw std::invalid_argument("rotated exponent defined for unconstrained peak only");
  if (q.blocks > 6)
    throw std::runtime_error("oracle budget exceeded: B must be <= 6");
  const int B = q.blocks;
  const int m = q.rx_antennas;
  const int N = q.rotation_size;
  const int K = B / N;
  const double de = q.csit_exponent;
  const double group_load = rate_load(q) / N;  // BR/(MN)
  const int good_groups_max = static_cast<int>(ceil_rate(group_load)) - 1;

  ExponentResult r;
  r.d = kInf;
  for (int n = 0; n <= B; ++n) {
    double best = kInf;
    // Placement of the n tied blocks; groups are consecutive runs of N.
    for (unsigned tied = 0; tied < (1u << B); ++tied) {
      if (std::popcount(tied) != n) continue;
      for (unsigned gmask = 0; gmask < (1u << K); ++gmask) {
        if (std::popcount(gmask) > good_groups_max) continue;
        bool feasible = true;
        int above_in_bad = 0;
        for (int g = 0; g < K && feasible; ++g) {
          const unsigned members = ((1u << N) - 1u) << (g * N);
          const bool group_good = (gmask >> g) & 1u;
          const int tied_here = std::popcount(tied & members);
          if (!group_good) {
            // A tied block keeps its effective SNR growing, forcing the
            // whole group good under a full-diversity rotation.
            if (tied_here > 0) {
              feasible = false;
              break;
            }
            above_in_bad += N;
          }
        }
        if (!feasible) continue;
        double s = (B - n) * de;
        const bool need_good_above = [&] {
          for (int g = 0; g < K; ++g) {
            const unsigned members = ((1u << N) - 1u) << (g * N);
            if (((gmask >> g) & 1u) && std::popcount(tied & members) == 0) return true;
          }
          return false;
        }();
        if (need_good_above) s = std::max(s, (de - 1.0) / m);
        const double cost = m * s + m * above_in_bad * std::max(0.0, 1.0 + m * s - de);
        best = std::min(best, cost);
      }
    }

    // Cross-check against the published per-n chain.
    const double gn = std::ceil(static_cast<double>(n) / N);
    double published;
    if (gn >= ceil_rate(group_load)) {
      published = kInf;
    } else {
      const double kn = ceil_rate(group_load - gn) - 1.0;
      const double tail = m * (B - n) * de;
      published = m * N * (K - gn - kn) * (1.0 + tail - de) + tail;
    }
    if (std::isfinite(best) != std::isfinite(published) ||
        (std::isfinite(best) && std::abs(best - published) > 1e-9))
      throw std::logic_error("oracle_exponent_rotated: pattern search disagrees with case chain");

    DnEntry e;
    e.n = n;
    e.branch = 2;
    e.value = best;
    r.d_n_table.push_back(e);
    if (e.value < r.d) {
      r.d = e.value;
      r.argmin_n = n;
      r.argmin_branch = 2;
    }
  }
  r.case_label = "rotated";
  r.rate_boundary = near_integer(group_load);
  r.d_above_boundary = r.d;
  return r;
}

double grid_check_exponent(const ExponentQuery& q, double step) {
  validate_query(q);
  if (q.rotation_size != 1)
    throw std::invalid_argument("grid_check_exponent: requires N = 1");
  if (q.blocks > 2)
    throw std::runtime_error("oracle budget exceeded: grid check limited to B <= 2");
  const int B = q.blocks;
  const int m = q.rx_antennas;
  const double de = q.csit_exponent;
  const double dp = q.peak_exponent;
  const double load = rate_load(q);
  const double cap = std::isfinite(dp) ? std::min(dp, 1.0 + m * B * de) : 1.0 + m * B * de;
  const double amax = 1.0 + m * B * de + de + cap;
  const int G = static_cast<int>(std::floor(amax / step)) + 1;

  double best = kInf;
  std::vector<double> ah(B), ab(B);
  for (int n = 0; n <= B; ++n) {
    const int free_bars = B - n;
    // Odometer over the free coordinates: alpha-hat for every block plus
    // bar-alpha for the blocks above the noise level.
    const int dims = B + free_bars;
    std::vector<int> idx(dims, 0);
    while (true) {
      for (int i = 0; i < B; ++i) ah[i] = idx[i] * step;
      for (int i = 0; i < free_bars; ++i) ab[i] = idx[B + i] * step;
      bool in_region = true;
      for (int i = 0; i < free_bars && in_region; ++i)
        if (ah[i] < de) in_region = false;
      for (int i = free_bars; i < B && in_region; ++i) {
        if (ah[i] > de) in_region = false;
        ab[i] = ah[i] - de;  // tied
      }
      if (in_region) {
        double sum_ah = 0.0;
        for (int i = 0; i < B; ++i) sum_ah += ah[i];
        const double pi = std::min(dp, 1.0 + m * sum_ah);
        int good = 0;
        for (int i = 0; i < B; ++i)
          if (ab[i] <= pi - de) ++good;
        if (good < load - kSnapTol) {
          double obj = m * sum_ah;
          for (int i = 0; i < free_bars; ++i) obj += m * ab[i];
          best = std::min(best, obj);
        }
      }
      int carry = 0;
      while (carry < dims && ++idx[carry] >= G) idx[carry++] = 0;
      if (carry == dims) break;
    }
  }
  return best;
}

std::vector<StaircaseRow> exponent_staircase(int B, int m, double d_e, double d_peak,
                                             int N, const std::vector<double>& rm_grid,
                                             int bits) {
  std::vector<StaircaseRow> rows;
  for (double rm : rm_grid) {
    ExponentQuery q;
    q.blocks = B;
    q.rx_antennas = m;
    q.bits = bits;
    q.rate = rm * bits;
    q.csit_exponent = d_e;
    q.peak_exponent = d_peak;
    q.rotation_size = N;
    const ExponentResult res =
        N == 1 ? outage_exponent_thm1(q) : outage_exponent_thm2(q);
    StaircaseRow row;
    row.rate_fraction = rm;
    row.d_sb = N == 1 ? singleton_bound(B, q.rate, bits)
                      : singleton_bound_rotated(B, q.rate, bits, N);
    row.d = res.d;
    row.rate_boundary = res.rate_boundary;
    row.d_above_boundary = res.d_above_boundary;
    rows.push_back(row);
  }
  return rows;
}

std::string staircase_csv(const std::vector<StaircaseRow>& rows) {
  std::string out = "r_over_m,d_sb,d,rate_boundary,d_above_boundary\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6g,%d,%.10g,%d,%.10g\n", r.rate_fraction, r.d_sb,
                  r.d, r.rate_boundary ? 1 : 0, r.d_above_boundary);
    out += buf;
  }
  return out;
}

nlohmann::json ExponentResult::to_json() const {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& e : d_n_table) {
    nlohmann::json row;
    row["n"] = e.n;
    row["branch"] = e.branch;
    if (std::isfinite(e.value))
      row["d_n"] = e.value;
    else
      row["d_n"] = "inf";
    table.push_back(row);
  }
  nlohmann::json j;
  if (std::isfinite(d))
    j["d"] = d;
  else
    j["d"] = "inf";
  j["case_label"] = case_label;
  j["d_n_table"] = table;
  j["argmin_n"] = argmin_n;
  j["rate_boundary"] = rate_boundary;
  j["d_above_boundary"] = d_above_boundary;
  return j;
}

}  // namespace outagelab
