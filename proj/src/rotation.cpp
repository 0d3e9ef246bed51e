#include "outagelab/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "outagelab/rng.hpp"

namespace outagelab {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kZeroEntry = 1e-9;

}  // namespace

std::vector<std::complex<double>> UnitaryMatrix::apply(
    const std::vector<std::complex<double>>& v) const {
  std::vector<std::complex<double>> out(n, {0.0, 0.0});
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out[r] += at(r, c) * v[c];
  return out;
}

double UnitaryMatrix::unitarity_defect() const {
  double worst = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      std::complex<double> acc{0.0, 0.0};
      for (int k = 0; k < n; ++k) acc += at(r, k) * std::conj(at(c, k));
      if (r == c) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

nlohmann::json UnitaryMatrix::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& z : a) rows.push_back({z.real(), z.imag()});
  return nlohmann::json{{"N", n}, {"matrix", rows}};
}

UnitaryMatrix UnitaryMatrix::from_json(const nlohmann::json& j) {
  UnitaryMatrix u;
  u.n = j.at("N").get<int>();
  const auto& rows = j.at("matrix");
  if (static_cast<int>(rows.size()) != u.n * u.n)
    throw std::invalid_argument("rotation matrix: expected N*N row-major [re, im] pairs");
  for (const auto& p : rows) u.a.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  return u;
}

UnitaryMatrix build_rotation(const std::string& family, int N) {
  if (N < 1) throw std::invalid_argument("build_rotation: N must be >= 1");
  UnitaryMatrix u;
  u.n = N;
  u.a.assign(static_cast<std::size_t>(N) * N, {0.0, 0.0});
  if (N == 1 || family == "identity") {
    for (int i = 0; i < N; ++i) u.at(i, i) = 1.0;
    return u;
  }
  if (family != "cyclotomic")
    throw std::invalid_argument("build_rotation: unsupported family " + family);
  if (N > 4) throw std::invalid_argument("build_rotation: cyclotomic family ships N <= 4");

  // Vandermonde rows over the N roots of X^N = c with |c| = 1. For N = 2, 4
  // the classical choice c = i keeps every root a primitive 4N-th root of
  // unity; X^3 = i has the rational root -i, so N = 3 uses c = exp(i pi/5)
  // instead. Rows are orthonormal by construction.
  const double base_angle = (N == 3) ? M_PI / 5.0 : M_PI / 2.0;
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  for (int r = 0; r < N; ++r) {
    const double phi = (base_angle + 2.0 * M_PI * r) / N;
    for (int c = 0; c < N; ++c) {
      const double angle = phi * c;
      u.at(r, c) = scale * std::complex<double>(std::cos(angle), std::sin(angle));
    }
  }
  if (u.unitarity_defect() > 1e-10)
    throw std::runtime_error("build_rotation: unitarity certification failed");
  return u;
}

RotationScheme build_rotation_scheme(const std::string& family, int N, int blocks) {
  if (N < 1 || blocks % N != 0)
    throw std::invalid_argument("build_rotation_scheme: N must divide B");
  RotationScheme s;
  s.rotation_size = N;
  s.groups = blocks / N;
  s.family = family;
  const UnitaryMatrix u = build_rotation(family, N);
  s.matrices.assign(s.groups, u);
  return s;
}

nlohmann::json DiversityReport::to_json() const {
  nlohmann::json j;
  j["ok"] = ok;
  j["min_product_distance"] = min_product_distance;
  if (witness) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& z : *witness) w.push_back({z.real(), z.imag()});
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

DiversityReport verify_full_diversity(const UnitaryMatrix& U, const Constellation& c) {
  const int N = U.n;
  const double budget = std::pow(static_cast<double>(c.size()), N);
  if (budget > static_cast<double>(1 << 20))
    throw std::runtime_error("verify_full_diversity: budget exceeded ((2^M)^N > 2^20)");

  // Deduplicated per-coordinate difference set, zero included so vectors
  // with some equal coordinates are covered.
  std::set<std::pair<double, double>> dedup;
  for (const auto& x : c.points)
    for (const auto& y : c.points) {
      const std::complex<double> d = x - y;
      dedup.insert({d.real(), d.imag()});
    }
  std::vector<std::complex<double>> diffs;
  diffs.reserve(dedup.size());
  for (const auto& p : dedup) diffs.emplace_back(p.first, p.second);

  DiversityReport report;
  report.ok = true;
  report.min_product_distance = HUGE_VAL;

  std::vector<int> idx(N, 0);
  std::vector<std::complex<double>> d(N);
  const int nd = static_cast<int>(diffs.size());
  while (true) {
    bool all_zero = true;
    for (int i = 0; i < N; ++i) {
      d[i] = diffs[idx[i]];
      if (std::abs(d[i]) > 0.0) all_zero = false;
    }
    if (!all_zero) {
      const auto rotated = U.apply(d);
      double prod = 1.0;
      bool nonzero = true;
      for (const auto& z : rotated) {
        const double mag = std::abs(z);
        prod *= mag;
        if (mag <= kZeroEntry) nonzero = false;
      }
      report.min_product_distance = std::min(report.min_product_distance, prod);
      if (!nonzero && report.ok) {
        report.ok = false;
        report.witness = d;
      }
    }
    int carry = 0;
    while (carry < N && ++idx[carry] >= nd) idx[carry++] = 0;
    if (carry == N) break;
  }
  return report;
}

MiEstimate rotated_group_mi(const UnitaryMatrix& U, const Constellation& c,
                            const std::vector<double>& effective_snrs,
                            std::int64_t n_noise, std::uint64_t seed) {
  const int N = U.n;
  if (static_cast<int>(effective_snrs.size()) != N)
    throw std::invalid_argument("rotated_group_mi: need one effective SNR per block");
  for (double s : effective_snrs)
    if (s < 0.0) throw std::invalid_argument("rotated_group_mi: effective SNRs must be >= 0");
  if (n_noise < 1) throw std::invalid_argument("rotated_group_mi: n_noise must be >= 1");
  const int M = c.bits_per_symbol;
  const double hyp = std::pow(2.0, static_cast<double>(M) * N);
  if (hyp > static_cast<double>(1 << 16))
    throw std::runtime_error("rotated_group_mi: budget exceeded (2^(M*N) > 2^16)");
  const int H = static_cast<int>(hyp);

  // V[a] = diag(sqrt(snr)) U s_a over all input vectors.
  std::vector<std::complex<double>> V(static_cast<std::size_t>(H) * N);
  std::vector<std::complex<double>> sv(N);
  for (int a = 0; a < H; ++a) {
    int rem = a;
    for (int i = 0; i < N; ++i) {
      sv[i] = c.points[rem % c.size()];
      rem /= c.size();
    }
    const auto rot = U.apply(sv);
    for (int i = 0; i < N; ++i)
      V[static_cast<std::size_t>(a) * N + i] = std::sqrt(effective_snrs[i]) * rot[i];
  }
  // Pairwise squared distances, reused across draws.
  std::vector<double> dist2(static_cast<std::size_t>(H) * H);
  for (int a = 0; a < H; ++a)
    for (int b = 0; b < H; ++b) {
      double acc = 0.0;
      for (int i = 0; i < N; ++i)
        acc += std::norm(V[static_cast<std::size_t>(a) * N + i] -
                         V[static_cast<std::size_t>(b) * N + i]);
      dist2[static_cast<std::size_t>(a) * H + b] = acc;
    }

  RandomStream rs(seed, 0);
  std::vector<std::complex<double>> w(N);
  std::vector<double> cross(H);
  std::vector<double> expo(H);
  const double bits_total = static_cast<double>(M) * N;
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::int64_t t = 0; t < n_noise; ++t) {
    double w2 = 0.0;
    for (int i = 0; i < N; ++i) {
      w[i] = rs.complex_normal(1.0);
      w2 += std::norm(w[i]);
    }
    for (int x = 0; x < H; ++x) {
      double acc = 0.0;
      for (int i = 0; i < N; ++i) {
        const auto& v = V[static_cast<std::size_t>(x) * N + i];
        acc += v.real() * w[i].real() + v.imag() * w[i].imag();
      }
      cross[x] = 2.0 * acc;
    }
    double draw = 0.0;
    for (int a = 0; a < H; ++a) {
      // -|V_a - V_b + w|^2 = -(dist2[a][b] + cross[a] - cross[b] + |w|^2)
      const double* row = &dist2[static_cast<std::size_t>(a) * H];
      double emax = -HUGE_VAL;
      for (int b = 0; b < H; ++b) {
        const double e = -(row[b] + cross[a] - cross[b]);
        expo[b] = e;
        if (e > emax) emax = e;
      }
      double acc = 0.0;
      for (int b = 0; b < H; ++b) acc += std::exp(expo[b] - emax);
      draw += bits_total - (emax + std::log(acc)) / kLn2;
    }
    draw /= H;
    sum += draw;
    sumsq += draw * draw;
  }
  const double mean = sum / n_noise / N;
  double se = 0.0;
  if (n_noise > 1) {
    const double var =
        std::max(0.0, (sumsq - sum * (sum / n_noise)) / (n_noise - 1));
    se = std::sqrt(var / n_noise) / N;
  }
  MiEstimate out;
  out.value = std::clamp(mean, 0.0, static_cast<double>(M));
  out.std_error = se;
  return out;
}

}  // namespace outagelab
