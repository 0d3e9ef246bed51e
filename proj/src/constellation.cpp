#include "outagelab/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "outagelab/rng.hpp"

namespace outagelab {

namespace {

constexpr double kLn2 = 0.6931471805599453;

int gray_code(int i) { return i ^ (i >> 1); }

Constellation build_psk(int M) {
  const int n = 1 << M;
  Constellation c;
  c.kind = "PSK";
  c.bits_per_symbol = M;
  c.points.resize(n);
  for (int k = 0; k < n; ++k) {
    const double phi = 2.0 * M_PI * k / n;
    c.points[k] = {std::cos(phi), std::sin(phi)};
  }
  if (M == 1) c.points = {{1.0, 0.0}, {-1.0, 0.0}};
  return c;
}

Constellation build_qam(int M) {
  // Rectangular Gray-indexable grid on odd integers, scaled to unit energy.
  if (M != 1 && M != 2 && M != 4 && M != 6)
    throw std::invalid_argument("unsupported constellation: QAM requires M in {1,2,4,6}");
  const int mi = (M + 1) / 2;  // bits on the in-phase axis
  const int mq = M / 2;        // bits on the quadrature axis
  const int ni = 1 << mi;
  const int nq = 1 << mq;
  double energy = 0.0;
  std::vector<std::complex<double>> pts(1 << M);
  for (int a = 0; a < ni; ++a) {
    for (int b = 0; b < nq; ++b) {
      const double x = 2.0 * gray_code(a) - (ni - 1);
      const double y = 2.0 * gray_code(b) - (nq - 1);
      pts[(a << mq) | b] = {x, y};
      energy += x * x + y * y;
    }
  }
  energy /= (1 << M);
  const double scale = 1.0 / std::sqrt(energy);
  for (auto& p : pts) p *= scale;
  Constellation c;
  c.kind = "QAM";
  c.bits_per_symbol = M;
  c.points = std::move(pts);
  return c;
}

}  // namespace

Constellation build_constellation(const std::string& kind, int M) {
  if (M < 1) throw std::invalid_argument("unsupported constellation: M must be >= 1");
  if (kind == "PSK" || kind == "psk") return build_psk(M);
  if (kind == "QAM" || kind == "qam") return build_qam(M);
  throw std::invalid_argument("unsupported constellation: kind must be PSK or QAM");
}

MiEstimate awgn_mutual_information(const Constellation& c, double s,
                                   std::int64_t n_noise, std::uint64_t seed) {
  if (s < 0.0) throw std::invalid_argument("awgn_mutual_information: s must be >= 0");
  if (n_noise < 1) throw std::invalid_argument("awgn_mutual_information: n_noise must be >= 1");
  if (s == 0.0) return {0.0, 0.0};  // output independent of the input
  const int n = c.size();
  const int M = c.bits_per_symbol;
  const double amp = std::sqrt(s);

  // delta[a][b] = sqrt(s) (x_a - x_b), fixed per estimate.
  std::vector<std::complex<double>> delta(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      delta[static_cast<std::size_t>(a) * n + b] = amp * (c.points[a] - c.points[b]);

  RandomStream rs(seed, 0);
  double sum = 0.0;
  double sumsq = 0.0;
  std::vector<double> expo(n);
  for (std::int64_t t = 0; t < n_noise; ++t) {
    const std::complex<double> z = rs.complex_normal(1.0);
    const double z2 = std::norm(z);
    double draw = 0.0;
    for (int a = 0; a < n; ++a) {
      const std::complex<double>* row = &delta[static_cast<std::size_t>(a) * n];
      double emax = -HUGE_VAL;
      for (int b = 0; b < n; ++b) {
        const double e = -std::norm(row[b] + z);
        expo[b] = e;
        if (e > emax) emax = e;
      }
      double acc = 0.0;
      for (int b = 0; b < n; ++b) acc += std::exp(expo[b] - emax);
      const double lse = emax + std::log(acc);
      draw += M + (-z2 - lse) / kLn2;
    }
    draw /= n;
    sum += draw;
    sumsq += draw * draw;
  }
  const double mean = sum / n_noise;
  double se = 0.0;
  if (n_noise > 1) {
    const double var = std::max(0.0, (sumsq - sum * mean) / (n_noise - 1));
    se = std::sqrt(var / n_noise);
  }
  MiEstimate out;
  out.value = std::clamp(mean, 0.0, static_cast<double>(M));
  out.std_error = se;
  return out;
}

MiTable::MiTable(std::string kind, int bits_per_symbol, std::vector<double> snr_grid,
                 std::vector<double> mi_values, double abs_error_bound)
    : kind_(std::move(kind)),
      bits_per_symbol_(bits_per_symbol),
      snr_grid_(std::move(snr_grid)),
      mi_values_(std::move(mi_values)),
      abs_error_bound_(abs_error_bound) {
  if (snr_grid_.size() != mi_values_.size() || snr_grid_.size() < 2)
    throw std::invalid_argument("MiTable: grid/value size mismatch");
  if (snr_grid_.front() != 0.0)
    throw std::invalid_argument("MiTable: grid must start at the s=0 anchor");
  prepare();
}

void MiTable::prepare() {
  const std::size_t n = snr_grid_.size();
  u_.resize(n);
  for (std::size_t i = 0; i < n; ++i) u_[i] = std::log1p(snr_grid_[i]);

  // Fritsch-Carlson tangents on the (already isotonic) data.
  slopes_.assign(n, 0.0);
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = u_[i + 1] - u_[i];
    d[i] = (mi_values_[i + 1] - mi_values_[i]) / h[i];
  }
  if (n == 2) {
    slopes_[0] = slopes_[1] = d[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      slopes_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      slopes_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  auto endpoint = [](double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  };
  slopes_[0] = endpoint(h[0], h[1], d[0], d[1]);
  slopes_[n - 1] = endpoint(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

double MiTable::lookup(double s) const {
  if (s < 0.0) throw std::invalid_argument("mi_lookup: s must be >= 0");
  const double Mb = bits_per_symbol_;
  if (s <= 0.0) return mi_values_.front();
  if (s >= snr_grid_.back()) return mi_values_.back();  // saturation anchor
  const double u = std::log1p(s);
  const auto it = std::upper_bound(u_.begin(), u_.end(), u);
  const std::size_t i = static_cast<std::size_t>(it - u_.begin()) - 1;
  const double h = u_[i + 1] - u_[i];
  const double t = (u - u_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double v = mi_values_[i] * (2 * t3 - 3 * t2 + 1) + h * slopes_[i] * (t3 - 2 * t2 + t) +
                   mi_values_[i + 1] * (-2 * t3 + 3 * t2) + h * slopes_[i + 1] * (t3 - t2);
  return std::clamp(v, 0.0, Mb);
}

nlohmann::json MiTable::to_json() const {
  return nlohmann::json{{"kind", kind_},
                        {"M", bits_per_symbol_},
                        {"snr_grid", snr_grid_},
                        {"mi_values", mi_values_},
                        {"abs_error_bound", abs_error_bound_}};
}

MiTable MiTable::from_json(const nlohmann::json& j) {
  return MiTable(j.at("kind").get<std::string>(), j.at("M").get<int>(),
                 j.at("snr_grid").get<std::vector<double>>(),
                 j.at("mi_values").get<std::vector<double>>(),
                 j.at("abs_error_bound").get<double>());
}

MiTable build_mi_table(const Constellation& c, double s_min, double s_max,
                       int n_points, std::int64_t n_noise, std::uint64_t seed) {
  if (!(0.0 < s_min && s_min < s_max))
    throw std::invalid_argument("build_mi_table: need 0 < s_min < s_max");
  if (n_points < 16) throw std::invalid_argument("build_mi_table: n_points must be >= 16");

  std::vector<double> grid(n_points);
  const double lmin = std::log(s_min);
  const double lmax = std::log(s_max);
  for (int i = 0; i < n_points; ++i)
    grid[i] = std::exp(lmin + (lmax - lmin) * i / (n_points - 1));
  grid.back() = s_max;

  std::vector<double> vals(n_points);
  double max_se = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const auto est = awgn_mutual_information(c, grid[i], n_noise, derive_seed(seed, 0x7ab1eu, i));
    vals[i] = est.value;
    max_se = std::max(max_se, est.std_error);
  }

  // Pool adjacent violators so the stored curve is nondecreasing.
  std::vector<double> level;
  std::vector<int> count;
  for (int i = 0; i < n_points; ++i) {
    level.push_back(vals[i]);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const double merged = (level[level.size() - 2] * count[count.size() - 2] +
                             level.back() * count.back()) /
                            (count[count.size() - 2] + count.back());
      count[count.size() - 2] += count.back();
      level[level.size() - 2] = merged;
      level.pop_back();
      count.pop_back();
    }
  }
  int pos = 0;
  for (std::size_t g = 0; g < level.size(); ++g)
    for (int k = 0; k < count[g]; ++k) vals[pos++] = level[g];
  for (auto& v : vals) v = std::clamp(v, 0.0, static_cast<double>(c.bits_per_symbol));

  double max_gap = 0.0;
  for (int i = 0; i + 1 < n_points; ++i) max_gap = std::max(max_gap, vals[i + 1] - vals[i]);
  max_gap = std::max(max_gap, vals[0]);
  const double bound = 3.0 * max_se + 0.25 * max_gap;

  std::vector<double> full_grid;
  std::vector<double> full_vals;
  full_grid.reserve(n_points + 1);
  full_vals.reserve(n_points + 1);
  full_grid.push_back(0.0);
  full_vals.push_back(0.0);  // exact anchor
  full_grid.insert(full_grid.end(), grid.begin(), grid.end());
  full_vals.insert(full_vals.end(), vals.begin(), vals.end());
  return MiTable(c.kind, c.bits_per_symbol, std::move(full_grid), std::move(full_vals), bound);
}

}  // namespace outagelab
