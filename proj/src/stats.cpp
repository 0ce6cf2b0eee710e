#include "cppok/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

namespace cppok {

int resolve_workers(int requested) {
  if (requested < 0) throw std::invalid_argument("workers must be >= 0");
  if (requested > 0) return std::min(requested, 256);
  if (const char* env = std::getenv(kWorkersEnvVar)) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed >= 1 && parsed <= 256) {
      return static_cast<int>(parsed);
    }
  }
  return 1;
}

void MonteCarloConfig::validate() const {
  if (replicates < 2) throw std::invalid_argument("MonteCarloConfig: replicates must be >= 2");
  if (workers < 0) throw std::invalid_argument("MonteCarloConfig: workers must be >= 0");
  if (grid.empty()) throw std::invalid_argument("MonteCarloConfig: grid must be non-empty");
  double prev = -1.0;
  for (double g : grid) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("MonteCarloConfig: grid entries must be finite and >= 0");
    }
    if (g <= prev) throw std::invalid_argument("MonteCarloConfig: grid must be strictly increasing");
    prev = g;
  }
  const double cells = static_cast<double>(replicates) * static_cast<double>(grid.size());
  if (cells > 3e8) {
    throw std::invalid_argument("MonteCarloConfig: replicates * grid size exceeds the in-memory cap");
  }
}

double EnsembleSummary::correlation(std::size_t i, std::size_t j) const {
  const double denom = std::sqrt(variance[i] * variance[j]);
  if (denom == 0.0) return 0.0;
  return cov(i, j) / denom;
}

namespace {

struct ReplicateFailure {
  std::int64_t index = -1;
  std::string message;
};

// Fills values[i*width .. i*width+width) for each replicate i from its own
// stream.  Worker partitioning is irrelevant to the result: slots are
// disjoint and streams depend only on (master_seed, i).
template <typename Fill>
void run_replicates(std::int64_t replicates, int workers, const Fill& fill) {
  workers = std::min<std::int64_t>(workers, replicates);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < replicates; ++i) fill(i);
    return;
  }
  std::vector<ReplicateFailure> failures(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = replicates * w / workers;
    const std::int64_t hi = replicates * (w + 1) / workers;
    pool.emplace_back([&, w, lo, hi] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) fill(i);
      } catch (const std::exception& e) {
        failures[static_cast<std::size_t>(w)] = {lo, e.what()};
      } catch (...) {
        failures[static_cast<std::size_t>(w)] = {lo, "unknown error"};
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const ReplicateFailure& f : failures) {
    if (f.index >= 0) {
      throw std::runtime_error("ensemble replicate block starting at " +
                               std::to_string(f.index) + " failed: " + f.message);
    }
  }
}

}  // namespace

EnsembleSummary run_ensemble(const GridSampler& sampler, const MonteCarloConfig& config) {
  config.validate();
  if (!sampler) throw std::invalid_argument("run_ensemble: sampler must be callable");
  const std::int64_t R = config.replicates;
  const std::size_t G = config.grid.size();
  const int workers = resolve_workers(config.workers);

  std::vector<double> values(static_cast<std::size_t>(R) * G);
  run_replicates(R, workers, [&](std::int64_t i) {
    Rng rng = replicate_rng(config.master_seed, static_cast<std::uint64_t>(i));
    try {
      sampler(rng, values.data() + static_cast<std::size_t>(i) * G);
    } catch (const std::exception& e) {
      throw std::runtime_error("replicate " + std::to_string(i) + ": " + e.what());
    }
  });

  EnsembleSummary out;
  out.grid = config.grid;
  out.replicates = R;
  out.master_seed = config.master_seed;
  out.workers_used = workers;
  out.mean.resize(G);
  out.variance.resize(G);
  out.stderr_mean.resize(G);
  out.stderr_variance.resize(G);
  out.covariance.assign(G * G, 0.0);
  out.stderr_covariance.assign(G * G, 0.0);

  // Fixed-order compensated reduction: replicate 0, 1, 2, ... regardless of
  // which worker produced each slot.
  const double dR = static_cast<double>(R);
  for (std::size_t g = 0; g < G; ++g) {
    CompensatedSum acc;
    for (std::int64_t i = 0; i < R; ++i) acc.add(values[static_cast<std::size_t>(i) * G + g]);
    out.mean[g] = acc.value() / dR;
  }
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t h = g; h < G; ++h) {
      CompensatedSum cross;   // sum of u_i = d_g * d_h
      CompensatedSum cross2;  // sum of u_i^2
      for (std::int64_t i = 0; i < R; ++i) {
        const double dg = values[static_cast<std::size_t>(i) * G + g] - out.mean[g];
        const double dh = values[static_cast<std::size_t>(i) * G + h] - out.mean[h];
        const double u = dg * dh;
        cross.add(u);
        cross2.add(u * u);
      }
      const double cov = cross.value() / (dR - 1.0);
      const double u_mean = cross.value() / dR;
      const double u_var = std::max(0.0, cross2.value() / dR - u_mean * u_mean);
      const double se = std::sqrt(u_var / dR);
      out.covariance[g * G + h] = cov;
      out.covariance[h * G + g] = cov;
      out.stderr_covariance[g * G + h] = se;
      out.stderr_covariance[h * G + g] = se;
    }
    out.variance[g] = out.covariance[g * G + g];
    out.stderr_mean[g] = std::sqrt(std::max(0.0, out.variance[g]) / dR);
    out.stderr_variance[g] = out.stderr_covariance[g * G + g];
  }
  return out;
}

std::vector<double> run_scalar_ensemble(const std::function<double(Rng&)>& sampler,
                                        std::int64_t replicates, std::uint64_t master_seed,
                                        int workers) {
  if (replicates < 1) throw std::invalid_argument("run_scalar_ensemble: replicates must be >= 1");
  if (!sampler) throw std::invalid_argument("run_scalar_ensemble: sampler must be callable");
  std::vector<double> values(static_cast<std::size_t>(replicates));
  run_replicates(replicates, resolve_workers(workers), [&](std::int64_t i) {
    Rng rng = replicate_rng(master_seed, static_cast<std::uint64_t>(i));
    try {
      values[static_cast<std::size_t>(i)] = sampler(rng);
    } catch (const std::exception& e) {
      throw std::runtime_error("replicate " + std::to_string(i) + ": " + e.what());
    }
  });
  return values;
}

SampleSummary summarize(const std::vector<double>& values) {
  if (values.size() < 2) throw std::invalid_argument("summarize: need at least 2 values");
  const double n = static_cast<double>(values.size());
  CompensatedSum total;
  for (double v : values) total.add(v);
  const double mean = total.value() / n;
  CompensatedSum sq, quad;
  for (double v : values) {
    const double d = v - mean;
    sq.add(d * d);
    quad.add(d * d * d * d);
  }
  SampleSummary out;
  out.count = static_cast<std::int64_t>(values.size());
  out.mean = mean;
  out.variance = sq.value() / (n - 1.0);
  out.stderr_mean = std::sqrt(std::max(0.0, out.variance) / n);
  const double v_biased = sq.value() / n;
  const double u_var = std::max(0.0, quad.value() / n - v_biased * v_biased);
  out.stderr_variance = std::sqrt(u_var / n);
  return out;
}

// --- Correlation-decay fitting -------------------------------------------------

PowerLawFit fit_power_law(const std::vector<double>& times, const std::vector<double>& corr,
                          double tmin, double tmax) {
  if (times.size() != corr.size()) {
    throw std::invalid_argument("fit_power_law: times and corr must have equal length");
  }
  if (!(tmin > 0.0) || !(tmax > tmin)) {
    throw std::invalid_argument("fit_power_law: need 0 < tmin < tmax");
  }
  std::vector<double> lx, ly;
  int trimmed = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < tmin || times[i] > tmax) continue;
    if (!(corr[i] > 0.0)) {
      ++trimmed;  // log-fit cannot use it; noise can push small correlations below zero
      continue;
    }
    lx.push_back(std::log(times[i]));
    ly.push_back(std::log(corr[i]));
  }
  if (lx.size() < 5) {
    throw std::invalid_argument("fit_power_law: fewer than 5 usable points in [" +
                                std::to_string(tmin) + ", " + std::to_string(tmax) + "]");
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - mx;
    const double dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_power_law: all usable times coincide");
  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.log_amplitude = my - fit.exponent * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double resid = ly[i] - (fit.log_amplitude + fit.exponent * lx[i]);
    ss_res += resid * resid;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  fit.fit_tmin = tmin;
  fit.fit_tmax = tmax;
  fit.points_used = static_cast<int>(lx.size());
  fit.points_trimmed = trimmed;
  return fit;
}

std::string to_string(DependenceRange r) {
  switch (r) {
    case DependenceRange::long_range: return "long-range";
    case DependenceRange::short_range: return "short-range";
    case DependenceRange::outside: return "outside";
  }
  return "unknown";
}

DependenceRange classify_dependence(double exponent) {
  if (exponent > -1.0 && exponent < 0.0) return DependenceRange::long_range;
  if (exponent > -2.0 && exponent < -1.0) return DependenceRange::short_range;
  return DependenceRange::outside;
}

LrdEstimate lrd_from_summary(const EnsembleSummary& summary, std::size_t base_index,
                             double tmin_factor, double tmax_factor) {
  if (base_index >= summary.size()) {
    throw std::invalid_argument("lrd_from_summary: base_index out of range");
  }
  LrdEstimate est;
  est.base_time = summary.grid[base_index];
  for (std::size_t g = base_index + 1; g < summary.size(); ++g) {
    est.times.push_back(summary.grid[g]);
    est.corr.push_back(summary.correlation(base_index, g));
  }
  est.fit = fit_power_law(est.times, est.corr, tmin_factor * est.base_time,
                          tmax_factor * est.base_time);
  est.verdict = classify_dependence(est.fit.exponent);
  return est;
}

// --- Distribution-comparison tests ----------------------------------------------

TwoSampleResult two_sample_pmf_test(const std::vector<std::int64_t>& a,
                                    const std::vector<std::int64_t>& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("two_sample_pmf_test: both samples must be non-empty");
  }
  const std::int64_t lo = std::min(*std::min_element(a.begin(), a.end()),
                                   *std::min_element(b.begin(), b.end()));
  const std::int64_t hi = std::max(*std::max_element(a.begin(), a.end()),
                                   *std::max_element(b.begin(), b.end()));
  const auto width = static_cast<std::size_t>(hi - lo + 1);
  if (width > 50000000) {
    throw std::invalid_argument("two_sample_pmf_test: support too wide for a binned comparison");
  }
  std::vector<double> ca(width, 0.0), cb(width, 0.0);
  for (std::int64_t v : a) ca[static_cast<std::size_t>(v - lo)] += 1.0;
  for (std::int64_t v : b) cb[static_cast<std::size_t>(v - lo)] += 1.0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  TwoSampleResult out;
  double tv = 0.0;
  for (std::size_t i = 0; i < width; ++i) tv += std::abs(ca[i] / na - cb[i] / nb);
  out.tv_distance = 0.5 * tv;

  // Merge tail bins (from the top) until every expected count is at least 5,
  // then the standard two-row homogeneity statistic.
  const double total = na + nb;
  const double min_expected = 5.0;
  while (ca.size() > 1) {
    const double pooled = ca.back() + cb.back();
    const double ea = na * pooled / total;
    const double eb = nb * pooled / total;
    if (ea >= min_expected && eb >= min_expected) break;
    ca[ca.size() - 2] += ca.back();
    cb[cb.size() - 2] += cb.back();
    ca.pop_back();
    cb.pop_back();
  }
  double stat = 0.0;
  int used_bins = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const double pooled = ca[i] + cb[i];
    if (pooled == 0.0) continue;  // empty interior bin: no information
    ++used_bins;
    const double ea = na * pooled / total;
    const double eb = nb * pooled / total;
    stat += (ca[i] - ea) * (ca[i] - ea) / ea;
    stat += (cb[i] - eb) * (cb[i] - eb) / eb;
  }
  out.chi2_stat = stat;
  out.dof = std::max(0, used_bins - 1);
  out.p_value = out.dof == 0 ? 1.0
                             : boost::math::gamma_q(static_cast<double>(out.dof) / 2.0, stat / 2.0);
  return out;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("two_sample_ks: both samples must be non-empty");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    const double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0) throw std::invalid_argument("ks_critical_value: sample sizes must be > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("ks_critical_value: alpha must lie in (0,1)");
  }
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

// --- Martingale increment CIs -----------------------------------------------------

std::vector<IncrementCi> martingale_increment_test(
    const std::function<ProcessPath(Rng&)>& path_sampler, const OrderKParams& params,
    const JumpLaw& law, const std::vector<std::pair<double, double>>& pairs,
    std::int64_t replicates, std::uint64_t master_seed, int workers, double compensator_scale,
    double z) {
  if (pairs.empty()) throw std::invalid_argument("martingale_increment_test: no (s,t) pairs");
  std::vector<double> grid;
  for (const auto& [s, t] : pairs) {
    if (!(s >= 0.0) || !(t > s)) {
      throw std::invalid_argument("martingale_increment_test: pairs must satisfy 0 <= s < t");
    }
    grid.push_back(s);
    grid.push_back(t);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  MonteCarloConfig config;
  config.replicates = replicates;
  config.master_seed = master_seed;
  config.workers = workers;
  config.grid = grid;
  const EnsembleSummary summary = run_ensemble(
      [&](Rng& rng, double* out) {
        const ProcessPath path = path_sampler(rng);
        for (std::size_t g = 0; g < grid.size(); ++g) {
          out[g] = path_value_at(path, grid[g]) -
                   compensator_scale * martingale_compensator(params, law, grid[g]);
        }
      },
      config);

  auto index_of = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
  };
  std::vector<IncrementCi> out;
  out.reserve(pairs.size());
  for (const auto& [s, t] : pairs) {
    const std::size_t is = index_of(s);
    const std::size_t it = index_of(t);
    IncrementCi ci;
    ci.s = s;
    ci.t = t;
    ci.mean = summary.mean[it] - summary.mean[is];
    const double var = std::max(
        0.0, summary.variance[it] + summary.variance[is] - 2.0 * summary.cov(is, it));
    ci.se = std::sqrt(var / static_cast<double>(replicates));
    ci.lo = ci.mean - z * ci.se;
    ci.hi = ci.mean + z * ci.se;
    ci.contains_zero = ci.lo <= 0.0 && 0.0 <= ci.hi;
    out.push_back(ci);
  }
  return out;
}

// --- Monte Carlo moments of the inverse subordinator -------------------------------

std::size_t InverseMomentTable::index_of(double t) const {
  for (std::size_t g = 0; g < summary.grid.size(); ++g) {
    const double ref = summary.grid[g];
    if (std::abs(t - ref) <= 1e-9 * std::max(1.0, std::abs(ref))) return g;
  }
  throw std::invalid_argument("InverseMomentTable: no moments recorded at t = " +
                              std::to_string(t));
}

double InverseMomentTable::mean_at(double t) const { return summary.mean[index_of(t)]; }
double InverseMomentTable::variance_at(double t) const { return summary.variance[index_of(t)]; }
double InverseMomentTable::cov_at(double s, double t) const {
  return summary.cov(index_of(s), index_of(t));
}
double InverseMomentTable::se_mean_at(double t) const { return summary.stderr_mean[index_of(t)]; }
double InverseMomentTable::se_cov_at(double s, double t) const {
  return summary.se_cov(index_of(s), index_of(t));
}

InverseMomentTable inverse_moment_table(const MtssParams& params,
                                        const std::vector<double>& tgrid, double step,
                                        std::int64_t replicates, std::uint64_t master_seed,
                                        int workers) {
  params.validate();
  MonteCarloConfig config;
  config.replicates = replicates;
  config.master_seed = master_seed;
  config.workers = workers;
  config.grid = tgrid;
  config.validate();
  InverseMomentTable table;
  table.bias_bound = step;
  table.summary = run_ensemble(
      [&](Rng& rng, double* out) {
        const InversePath path = sample_inverse_path(params, tgrid, step, rng);
        for (std::size_t g = 0; g < tgrid.size(); ++g) out[g] = path.values[g];
      },
      config);
  return table;
}

}  // namespace cppok
