#include "outagelab/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "outagelab/exponents.hpp"
#include "outagelab/rng.hpp"

namespace outagelab {

namespace {

constexpr std::uint64_t kPointTag = 0x51a7e;
constexpr std::uint64_t kPilotTag = 0x51b0a;
constexpr std::uint64_t kGroupMiTag = 0x517a9;
constexpr double kZ95 = 1.959963984540054;

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void validate_config(const SimConfig& cfg) {
  if (!(cfg.rate > 0.0) || cfg.rate >= cfg.constellation.bits_per_symbol + 1e-12)
    throw std::invalid_argument("sim config: need 0 < R < M");
  for (std::size_t i = 1; i < cfg.snr_grid_db.size(); ++i)
    if (cfg.snr_grid_db[i] <= cfg.snr_grid_db[i - 1])
      throw std::invalid_argument("sim config: snr grid must be strictly increasing");
  if (cfg.n_samples < 0) throw std::invalid_argument("sim config: n_samples must be >= 0");
  if (!cfg.n_samples_per_point.empty() &&
      cfg.n_samples_per_point.size() != cfg.snr_grid_db.size())
    throw std::invalid_argument("sim config: per-point sample counts must match the grid");
  if (cfg.rotation) {
    if (cfg.params.blocks % cfg.rotation->rotation_size != 0)
      throw std::invalid_argument("sim config: rotation size must divide B");
  } else {
    if (!cfg.mi_table) throw std::invalid_argument("sim config: MI table required");
    if (cfg.mi_table->bits_per_symbol() != cfg.constellation.bits_per_symbol)
      throw std::invalid_argument("sim config: MI table does not match the constellation");
    // Coverage: the table must actually reach saturation, otherwise inverted
    // power would read artificially low mutual information.
    if (cfg.mi_table->mi_values().back() <
        cfg.constellation.bits_per_symbol - 1e-2)
      throw std::invalid_argument("sim config: MI table does not cover the saturated range");
  }
}

// Outage indicator for one sample; gamma/gamma_hat are scratch space.
struct PointContext {
  const SimConfig* cfg;
  double snr;
  PowerPolicy policy;  // calibrated copy
  std::uint64_t point_seed;
  std::uint64_t mi_seed;
};

bool sample_is_outage(const PointContext& ctx, std::uint64_t sample,
                      std::span<double> gamma, std::span<double> gamma_hat) {
  const SimConfig& cfg = *ctx.cfg;
  sample_magnitudes(cfg.params, ctx.snr, ctx.point_seed, sample, gamma, gamma_hat);
  const double p = allocate_power(ctx.policy, gamma_hat, ctx.snr);
  const int B = cfg.params.blocks;
  double mi_sum = 0.0;
  if (!cfg.rotation) {
    const MiTable& table = *cfg.mi_table;
    for (int i = 0; i < B; ++i) mi_sum += table.lookup(std::min(p * gamma[i], 1e300));
  } else {
    const RotationScheme& rot = *cfg.rotation;
    const int N = rot.rotation_size;
    std::vector<double> snrs(N);
    for (int g = 0; g < rot.groups; ++g) {
      for (int i = 0; i < N; ++i) snrs[i] = std::min(p * gamma[g * N + i], 1e300);
      const auto est = rotated_group_mi(rot.matrices[g], cfg.constellation, snrs,
                                        cfg.rotated_mi_noise,
                                        derive_seed(ctx.mi_seed, sample, g));
      mi_sum += est.value * N;
    }
  }
  return mi_sum / B < cfg.rate;
}

}  // namespace

void wilson_interval(std::int64_t events, std::int64_t n, double* lo, double* hi) {
  if (n <= 0) {
    *lo = 0.0;
    *hi = 1.0;
    return;
  }
  const double p = static_cast<double>(events) / n;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half =
      kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  *lo = events == 0 ? 0.0 : std::max(0.0, center - half);
  *hi = events == n ? 1.0 : std::min(1.0, center + half);
}

std::vector<OutageEstimate> estimate_outage(const SimConfig& cfg) {
  validate_config(cfg);
  const int threads = resolve_threads(cfg.threads);
  std::vector<OutageEstimate> out;

  for (std::size_t k = 0; k < cfg.snr_grid_db.size(); ++k) {
    const double snr = std::pow(10.0, cfg.snr_grid_db[k] / 10.0);
    const std::int64_t n = cfg.n_samples_per_point.empty() ? cfg.n_samples
                                                           : cfg.n_samples_per_point[k];
    PointContext ctx;
    ctx.cfg = &cfg;
    ctx.snr = snr;
    ctx.point_seed = derive_seed(cfg.seed, kPointTag, k);
    ctx.mi_seed = derive_seed(cfg.seed, kGroupMiTag, k);
    ctx.policy = cfg.policy;
    if (cfg.calibrate && cfg.policy.kind == PowerPolicy::Kind::TruncatedInversion)
      ctx.policy = calibrate_policy(cfg.policy, cfg.params, snr, cfg.n_pilot,
                                    derive_seed(cfg.seed, kPilotTag, k));

    // Fixed-size chunks claimed through an atomic cursor: event counts are
    // integers, so the reduction is order-independent.
    const std::int64_t chunk = 1 << 14;
    const std::int64_t n_chunks = (n + chunk - 1) / chunk;
    std::atomic<std::int64_t> cursor{0};
    std::vector<std::int64_t> partial(threads, 0);
    auto worker = [&](int tid) {
      std::vector<double> gamma(cfg.params.blocks);
      std::vector<double> gamma_hat(cfg.params.blocks);
      std::int64_t local = 0;
      while (true) {
        const std::int64_t c = cursor.fetch_add(1);
        if (c >= n_chunks) break;
        const std::int64_t begin = c * chunk;
        const std::int64_t end = std::min(n, begin + chunk);
        for (std::int64_t i = begin; i < end; ++i)
          if (sample_is_outage(ctx, static_cast<std::uint64_t>(i), gamma, gamma_hat))
            ++local;
      }
      partial[tid] = local;
    };
    if (threads == 1 || n_chunks <= 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
      for (auto& th : pool) th.join();
    }
    std::int64_t events = 0;
    for (auto e : partial) events += e;

    OutageEstimate est;
    est.snr_db = cfg.snr_grid_db[k];
    est.n = n;
    est.events = events;
    est.pout = n > 0 ? static_cast<double>(events) / n : 0.0;
    wilson_interval(events, n, &est.ci_low, &est.ci_high);
    out.push_back(est);
  }
  return out;
}

SlopeFit fit_slope(std::span<const OutageEstimate> estimates, int min_events) {
  std::vector<double> x, y, w;
  for (const auto& e : estimates) {
    if (e.events < min_events || e.events == e.n) continue;
    x.push_back(e.snr_db / 10.0);  // log10 of the linear SNR
    y.push_back(std::log10(e.pout));
    // Delta-method variance of log10(p_hat).
    const double p = e.pout;
    const double var = (1.0 - p) / (static_cast<double>(e.n) * p) /
                       (std::log(10.0) * std::log(10.0));
    w.push_back(1.0 / var);
  }
  if (x.size() < 2)
    throw std::runtime_error("fit_slope: need at least two points with enough events");

  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
    swxx += w[i] * x[i] * x[i];
    swxy += w[i] * x[i] * y[i];
  }
  const double det = sw * swxx - swx * swx;
  const double slope = (sw * swxy - swx * swy) / det;
  SlopeFit fit;
  fit.exponent = -slope;
  fit.std_error = std::sqrt(sw / det);
  fit.points_used = static_cast<int>(x.size());
  return fit;
}

std::string estimates_csv(std::span<const OutageEstimate> estimates) {
  std::string out = "snr_db,pout,ci_low,ci_high,n,events\n";
  char buf[200];
  for (const auto& e : estimates) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.9e,%.9e,%.9e,%lld,%lld\n", e.snr_db, e.pout,
                  e.ci_low, e.ci_high, static_cast<long long>(e.n),
                  static_cast<long long>(e.events));
    out += buf;
  }
  return out;
}

std::vector<SweepRow> sweep(const std::vector<SimConfig>& cfgs) {
  std::vector<SweepRow> rows;
  for (const auto& cfg : cfgs) {
    SweepRow row;
    row.name = cfg.name;
    try {
      row.estimates = estimate_outage(cfg);
      ExponentQuery q;
      q.blocks = cfg.params.blocks;
      q.rx_antennas = cfg.params.rx_antennas;
      q.rate = cfg.rate;
      q.bits = cfg.constellation.bits_per_symbol;
      q.csit_exponent = cfg.params.csit_exponent;
      q.peak_exponent = cfg.policy.kind == PowerPolicy::Kind::Uniform ? 1.0
                                                                      : cfg.policy.d_peak;
      if (cfg.rotation && cfg.rotation->rotation_size > 1) {
        q.rotation_size = cfg.rotation->rotation_size;
        q.peak_exponent = std::numeric_limits<double>::infinity();
        row.theory_exponent = outage_exponent_thm2(q).d;
      } else {
        row.theory_exponent = outage_exponent_thm1(q).d;
      }
      try {
        const SlopeFit fit = fit_slope(row.estimates, cfg.min_events);
        row.fitted_exponent = fit.exponent;
        row.fit_std_error = fit.std_error;
        row.points_used = fit.points_used;
        row.status = "ok";
      } catch (const std::exception&) {
        row.status = "ok (no slope: too few qualified points)";
      }
    } catch (const std::exception& ex) {
      row.status = std::string("error: ") + ex.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_summary_csv(std::span<const SweepRow> rows) {
  std::string out = "name,status,points_used,fitted_exponent,fit_std_error,theory_exponent\n";
  char buf[320];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.6g,%.6g,%.6g\n", r.name.c_str(),
                  r.status.c_str(), r.points_used, r.fitted_exponent, r.fit_std_error,
                  r.theory_exponent);
    out += buf;
  }
  return out;
}

}  // namespace outagelab
