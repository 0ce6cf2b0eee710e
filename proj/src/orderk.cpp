#include "cppok/orderk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace cppok {

namespace {

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require_finite_time(double t, const char* who) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument(std::string(who) + ": time must be finite and >= 0");
  }
}

void require_finite_moments(const JumpLaw& law, const char* who) {
  if (!std::isfinite(law.mean()) || !std::isfinite(law.second_moment())) {
    throw std::domain_error(std::string(who) + ": jump law must have finite mean and second moment");
  }
}

// out[m] = sum_a cur[a] * q[m-a] for m <= cap (all supports non-negative, so
// truncation at cap is exact for every entry kept).
std::vector<double> convolve_truncated(const std::vector<double>& cur,
                                       const std::vector<double>& q, std::size_t cap) {
  const std::size_t out_len = std::min(cap + 1, cur.size() + q.size() - 1);
  std::vector<double> out(out_len, 0.0);
  for (std::size_t a = 0; a < cur.size() && a < out_len; ++a) {
    if (cur[a] == 0.0) continue;
    const std::size_t bmax = std::min(q.size(), out_len - a);
    for (std::size_t b = 0; b < bmax; ++b) {
      out[a + b] += cur[a] * q[b];
    }
  }
  return out;
}

}  // namespace

void OrderKParams::validate() const {
  if (order < 1) throw std::invalid_argument("OrderKParams: order must be >= 1");
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("OrderKParams: rate must be finite and > 0");
  }
}

// --- JumpLaw -----------------------------------------------------------------

double JumpLaw::variance() const {
  const double m = mean();
  return second_moment() - m * m;
}

double JumpLaw::sum_sample(Rng& rng, std::int64_t n) const {
  if (n < 0) throw std::invalid_argument("JumpLaw::sum_sample: count must be >= 0");
  CompensatedSum acc;
  for (std::int64_t i = 0; i < n; ++i) acc.add(sample(rng));
  return acc.value();
}

double JumpLaw::convolution_cdf(std::int64_t, double) const {
  throw std::domain_error("JumpLaw::convolution_cdf: no closed form for " + describe());
}

DiracJump::DiracJump(double point) : point_(point) {
  if (!std::isfinite(point_)) throw std::invalid_argument("DiracJump: point must be finite");
  if (point_ >= 0.0 && point_ <= 1000000.0 && point_ == std::floor(point_)) {
    pmf_.assign(static_cast<std::size_t>(point_) + 1, 0.0);
    pmf_.back() = 1.0;
  }
}

double DiracJump::sum_sample(Rng&, std::int64_t n) const {
  if (n < 0) throw std::invalid_argument("DiracJump::sum_sample: count must be >= 0");
  return point_ * static_cast<double>(n);
}

const std::vector<double>* DiracJump::integer_pmf() const {
  return pmf_.empty() ? nullptr : &pmf_;
}

double DiracJump::convolution_cdf(std::int64_t fold, double y) const {
  if (fold < 0) throw std::invalid_argument("DiracJump::convolution_cdf: fold must be >= 0");
  return point_ * static_cast<double>(fold) <= y ? 1.0 : 0.0;
}

std::string DiracJump::describe() const { return "dirac(point=" + format_double(point_) + ")"; }

DiscreteJump::DiscreteJump(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw std::invalid_argument("DiscreteJump: weights must be non-empty");
  CompensatedSum total;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("DiscreteJump: weights must be finite and >= 0");
    }
    total.add(w);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscreteJump: weights must sum to 1 within 1e-12 (got " +
                                format_double(total.value()) + ")");
  }
  while (weights_.size() > 1 && weights_.back() == 0.0) weights_.pop_back();
  cdf_.resize(weights_.size());
  CompensatedSum run;
  CompensatedSum m1, m2;
  for (std::size_t v = 0; v < weights_.size(); ++v) {
    run.add(weights_[v]);
    cdf_[v] = run.value();
    m1.add(weights_[v] * static_cast<double>(v));
    m2.add(weights_[v] * static_cast<double>(v) * static_cast<double>(v));
  }
  cdf_.back() = 1.0;  // guards inverse lookup against rounding at the top
  mean_ = m1.value();
  second_ = m2.value();
}

double DiscreteJump::sample(Rng& rng) const {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t idx = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
  return static_cast<double>(idx);
}

double DiscreteJump::sum_sample(Rng& rng, std::int64_t n) const {
  if (n < 0) throw std::invalid_argument("DiscreteJump::sum_sample: count must be >= 0");
  if (n <= 10000) return JumpLaw::sum_sample(rng, n);
  // Multinomial split via a chain of binomials: exact and O(support size).
  std::int64_t remaining = n;
  double mass_left = 1.0;
  CompensatedSum total;
  for (std::size_t v = 0; v < weights_.size() && remaining > 0; ++v) {
    if (weights_[v] <= 0.0) continue;
    std::int64_t taken;
    if (v + 1 == weights_.size()) {
      taken = remaining;
    } else {
      const double p = std::clamp(weights_[v] / mass_left, 0.0, 1.0);
      taken = sample_binomial(rng, remaining, p);
    }
    total.add(static_cast<double>(v) * static_cast<double>(taken));
    remaining -= taken;
    mass_left -= weights_[v];
  }
  return total.value();
}

double DiscreteJump::convolution_cdf(std::int64_t fold, double y) const {
  if (fold < 0) throw std::invalid_argument("DiscreteJump::convolution_cdf: fold must be >= 0");
  if (fold > 1000000) {
    throw std::invalid_argument("DiscreteJump::convolution_cdf: fold too large for exact convolution");
  }
  if (y < 0.0) return 0.0;
  if (fold == 0) return 1.0;
  const auto cap = static_cast<std::size_t>(std::min(y, 1e9));
  std::vector<double> cur{1.0};
  for (std::int64_t j = 0; j < fold; ++j) cur = convolve_truncated(cur, weights_, cap);
  CompensatedSum acc;
  for (double p : cur) acc.add(p);
  return std::min(acc.value(), 1.0);
}

std::string DiscreteJump::describe() const {
  std::ostringstream os;
  os << "discrete(weights=[";
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (i) os << ",";
    os << format_double(weights_[i]);
  }
  os << "])";
  return os.str();
}

ExponentialJump::ExponentialJump(double rate) : rate_(rate) {
  if (!(rate_ > 0.0) || !std::isfinite(rate_)) {
    throw std::invalid_argument("ExponentialJump: rate must be finite and > 0");
  }
}

double ExponentialJump::sample(Rng& rng) const { return sample_exponential(rng, rate_); }

double ExponentialJump::sum_sample(Rng& rng, std::int64_t n) const {
  if (n < 0) throw std::invalid_argument("ExponentialJump::sum_sample: count must be >= 0");
  if (n == 0) return 0.0;
  return sample_gamma(rng, static_cast<double>(n), 1.0 / rate_);
}

double ExponentialJump::convolution_cdf(std::int64_t fold, double y) const {
  if (fold < 0) throw std::invalid_argument("ExponentialJump::convolution_cdf: fold must be >= 0");
  if (fold == 0) return y >= 0.0 ? 1.0 : 0.0;
  if (y <= 0.0) return 0.0;
  return boost::math::gamma_p(static_cast<double>(fold), rate_ * y);
}

std::string ExponentialJump::describe() const {
  return "exponential(rate=" + format_double(rate_) + ")";
}

// --- Tables and paths --------------------------------------------------------

double PokPmfTable::tail_mass() const {
  CompensatedSum acc;
  for (double p : probs) acc.add(p);
  return std::max(0.0, 1.0 - acc.value());
}

double path_value_at(const ProcessPath& path, double t) {
  if (path.times.empty() || t < path.times.front()) return 0.0;
  const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
  return path.values[static_cast<std::size_t>(it - path.times.begin()) - 1];
}

// --- Counting distribution ---------------------------------------------------

double pok_pmf_enum(const OrderKParams& params, double t, int n, std::uint64_t max_terms) {
  params.validate();
  require_finite_time(t, "pok_pmf_enum");
  if (n < 0) throw std::invalid_argument("pok_pmf_enum: n must be >= 0");
  const int k = params.order;
  const double lt = params.rate * t;

  std::vector<double> inv_fact(static_cast<std::size_t>(n) + 1, 1.0);
  for (std::size_t i = 1; i < inv_fact.size(); ++i) inv_fact[i] = inv_fact[i - 1] / static_cast<double>(i);
  std::vector<double> pow_lt(static_cast<std::size_t>(n) + 1, 1.0);
  for (std::size_t i = 1; i < pow_lt.size(); ++i) pow_lt[i] = pow_lt[i - 1] * lt;

  std::uint64_t visited = 0;
  CompensatedSum total;
  // Walk every vector (x_1,...,x_k) with sum_j j*x_j == n; each contributes
  // (lambda t)^{x_1+...+x_k} / (x_1! ... x_k!).  Sizes k..2 are chosen
  // explicitly and x_1 absorbs the remainder.
  auto visit = [&](auto&& self, int part, int remaining, int batches, double coeff) -> void {
    if (part == 1) {
      if (++visited > max_terms) {
        throw std::runtime_error("pok_pmf_enum: enumeration budget exceeded (" +
                                 std::to_string(max_terms) + " compositions) for n=" +
                                 std::to_string(n) + ", order=" + std::to_string(k));
      }
      total.add(pow_lt[static_cast<std::size_t>(batches + remaining)] * coeff *
                inv_fact[static_cast<std::size_t>(remaining)]);
      return;
    }
    for (int x = 0; part * x <= remaining; ++x) {
      self(self, part - 1, remaining - part * x, batches + x,
           coeff * inv_fact[static_cast<std::size_t>(x)]);
    }
  };
  visit(visit, k, n, 0, 1.0);
  return std::exp(-static_cast<double>(k) * lt) * total.value();
}

PokPmfTable pok_pmf(const OrderKParams& params, double t, int nmax) {
  params.validate();
  require_finite_time(t, "pok_pmf");
  if (nmax < 0) throw std::invalid_argument("pok_pmf: nmax must be >= 0");
  const int k = params.order;
  const double lt = params.rate * t;
  std::vector<double> probs(static_cast<std::size_t>(nmax) + 1, 0.0);
  probs[0] = std::exp(-static_cast<double>(k) * lt);
  for (int n = 1; n <= nmax; ++n) {
    double s = 0.0;
    const int imax = std::min(k, n);
    for (int i = 1; i <= imax; ++i) {
      s += static_cast<double>(i) * probs[static_cast<std::size_t>(n - i)];
    }
    probs[static_cast<std::size_t>(n)] = lt * s / static_cast<double>(n);
  }
  return PokPmfTable{params, t, std::move(probs)};
}

PokPmfTable pok_pmf_auto(const OrderKParams& params, double t, double tail_eps) {
  params.validate();
  require_finite_time(t, "pok_pmf_auto");
  if (!(tail_eps > 0.0)) throw std::invalid_argument("pok_pmf_auto: tail_eps must be > 0");
  const double k = params.order;
  const double lt = params.rate * t;
  const double mean = 0.5 * k * (k + 1.0) * lt;
  const double sd = std::sqrt(k * (k + 1.0) * (2.0 * k + 1.0) / 6.0 * lt);
  int nmax = static_cast<int>(std::ceil(mean + 12.0 * sd)) + 16;
  constexpr int kHardCap = 10000000;
  for (;;) {
    PokPmfTable table = pok_pmf(params, t, nmax);
    if (table.tail_mass() < tail_eps) return table;
    if (nmax >= kHardCap) {
      throw std::runtime_error("pok_pmf_auto: table size cap reached before tail mass fell below " +
                               format_double(tail_eps));
    }
    nmax = std::min(kHardCap, nmax * 2);
  }
}

// --- Path sampling -----------------------------------------------------------

namespace {

template <typename BatchValue>
ProcessPath sample_path_impl(const OrderKParams& params, double horizon, Rng& rng,
                             BatchValue&& batch_value) {
  params.validate();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("sample path: horizon must be finite and > 0");
  }
  const double driving = static_cast<double>(params.order) * params.rate;
  ProcessPath path;
  path.horizon = horizon;
  const double expected = driving * horizon;
  path.times.reserve(static_cast<std::size_t>(expected + 4.0 * std::sqrt(expected) + 8.0));
  path.values.reserve(path.times.capacity());
  std::uniform_int_distribution<int> batch_size(1, params.order);
  double t = 0.0;
  double v = 0.0;
  for (;;) {
    t += sample_exponential(rng, driving);
    if (t > horizon) break;
    v += batch_value(batch_size(rng));
    path.times.push_back(t);
    path.values.push_back(v);
  }
  return path;
}

}  // namespace

ProcessPath sample_ppok_path(const OrderKParams& params, double horizon, Rng& rng) {
  return sample_path_impl(params, horizon, rng,
                          [](int batch) { return static_cast<double>(batch); });
}

ProcessPath sample_cppok_path(const OrderKParams& params, const JumpLaw& law, double horizon,
                              Rng& rng) {
  return sample_path_impl(params, horizon, rng, [&](int batch) {
    double add = 0.0;
    for (int i = 0; i < batch; ++i) add += law.sample(rng);
    return add;
  });
}

double sample_cppok_increment(const OrderKParams& params, const JumpLaw& law, double dt,
                              Rng& rng) {
  params.validate();
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("sample_cppok_increment: dt must be finite and >= 0");
  }
  if (dt == 0.0) return 0.0;
  // Batch count over a window: sum_{j<=k} j * Poisson(lambda*dt), exact in law.
  std::int64_t count = 0;
  const double mean = params.rate * dt;
  for (int j = 1; j <= params.order; ++j) {
    count += static_cast<std::int64_t>(j) * sample_poisson(rng, mean);
  }
  return law.sum_sample(rng, count);
}

// --- Moments and dispersion ----------------------------------------------------

double cppok_mean(const OrderKParams& params, const JumpLaw& law, double t) {
  params.validate();
  require_finite_time(t, "cppok_mean");
  require_finite_moments(law, "cppok_mean");
  const double k = params.order;
  return 0.5 * k * (k + 1.0) * params.rate * t * law.mean();
}

double cppok_variance(const OrderKParams& params, const JumpLaw& law, double t) {
  params.validate();
  require_finite_time(t, "cppok_variance");
  require_finite_moments(law, "cppok_variance");
  const double k = params.order;
  const double m1 = law.mean();
  return 0.5 * k * (k + 1.0) * params.rate * t * law.variance() +
         k * (k + 1.0) * (2.0 * k + 1.0) / 6.0 * params.rate * t * m1 * m1;
}

std::string to_string(Dispersion d) {
  switch (d) {
    case Dispersion::over: return "overdispersed";
    case Dispersion::under: return "underdispersed";
    case Dispersion::equi: return "equidispersed";
  }
  return "unknown";
}

DispersionReport dispersion_report(const OrderKParams& params, const JumpLaw& law, double t) {
  params.validate();
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("dispersion_report: time must be finite and > 0 (the index is undefined at t=0)");
  }
  require_finite_moments(law, "dispersion_report");
  const double k = params.order;
  const double m1 = law.mean();
  const double m2 = law.second_moment();
  DispersionReport report;
  report.prefactor = 0.5 * k * (k + 1.0) * params.rate * t;
  report.second_moment_term = m2;
  report.mean_term = -m1;
  report.batch_term = ((2.0 * k + 1.0) / 3.0 - 1.0) * m1 * m1;
  report.gap = report.prefactor * (report.second_moment_term + report.mean_term + report.batch_term);
  if (report.gap > kEquidispersionTol) {
    report.classification = Dispersion::over;
  } else if (report.gap < -kEquidispersionTol) {
    report.classification = Dispersion::under;
  } else {
    report.classification = Dispersion::equi;
  }
  return report;
}

// --- Transform, weights, superposition ----------------------------------------

double cppok_pgf(const OrderKParams& params, const JumpLaw& law, double u, double t) {
  params.validate();
  require_finite_time(t, "cppok_pgf");
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("cppok_pgf: u must lie in [0,1]");
  const std::vector<double>* pmf = law.integer_pmf();
  if (pmf == nullptr) {
    throw std::invalid_argument("cppok_pgf: requires an integer-valued jump law, got " +
                                law.describe());
  }
  // G_Y(u) by Horner, then exp(lambda*t*(G + G^2 + ... + G^k) - k*lambda*t).
  double g = 0.0;
  for (auto it = pmf->rbegin(); it != pmf->rend(); ++it) g = g * u + *it;
  double power = 1.0;
  double sum_minus_k = 0.0;
  for (int i = 1; i <= params.order; ++i) {
    power *= g;
    sum_minus_k += power - 1.0;
  }
  return std::exp(params.rate * t * sum_minus_k);
}

LevyMeasureWeights levy_measure_weights(const OrderKParams& params, const JumpLaw& law,
                                        int jmax) {
  params.validate();
  if (jmax < 1) throw std::invalid_argument("levy_measure_weights: jmax must be >= 1");
  const std::vector<double>* pmf = law.integer_pmf();
  if (pmf == nullptr) {
    throw std::invalid_argument("levy_measure_weights: requires an integer-valued jump law, got " +
                                law.describe());
  }
  const auto cap = static_cast<std::size_t>(jmax);
  std::vector<double> acc(cap + 1, 0.0);  // acc[j] = sum over batch sizes of j-fold mass
  std::vector<double> cur(*pmf);
  if (cur.size() > cap + 1) cur.resize(cap + 1);
  for (int n = 1; n <= params.order; ++n) {
    for (std::size_t j = 0; j < cur.size(); ++j) acc[j] += cur[j];
    if (n < params.order) cur = convolve_truncated(cur, *pmf, cap);
  }
  LevyMeasureWeights out;
  out.alpha.resize(cap);
  out.nu.resize(cap);
  CompensatedSum kept;
  const double k = params.order;
  kept.add(acc[0] / k);
  for (std::size_t j = 1; j <= cap; ++j) {
    out.alpha[j - 1] = acc[j] / k;
    out.nu[j - 1] = k * params.rate * out.alpha[j - 1];
    kept.add(out.alpha[j - 1]);
  }
  out.tail_mass = std::max(0.0, 1.0 - kept.value());
  return out;
}

LevyMeasureWeights levy_measure_weights_auto(const OrderKParams& params, const JumpLaw& law,
                                             double tail_eps) {
  params.validate();
  if (!(tail_eps > 0.0)) throw std::invalid_argument("levy_measure_weights_auto: tail_eps must be > 0");
  const std::vector<double>* pmf = law.integer_pmf();
  if (pmf == nullptr) {
    throw std::invalid_argument("levy_measure_weights_auto: requires an integer-valued jump law, got " +
                                law.describe());
  }
  // A batch sums at most `order` copies of the law, so support ends at
  // order*(len-1) and the first attempt is already exact for bounded laws.
  int jmax = std::max<int>(1, params.order * static_cast<int>(pmf->size() - 1));
  constexpr int kHardCap = 1000000;
  for (;;) {
    LevyMeasureWeights w = levy_measure_weights(params, law, jmax);
    if (w.tail_mass < tail_eps) return w;
    if (jmax >= kHardCap) {
      throw std::runtime_error("levy_measure_weights_auto: truncation cap reached with tail mass " +
                               format_double(w.tail_mass));
    }
    jmax = std::min(kHardCap, jmax * 2);
  }
}

SuperpositionSampler::SuperpositionSampler(const OrderKParams& params, const JumpLaw& law,
                                           double t, int jmax, double tail_tol) {
  require_finite_time(t, "SuperpositionSampler");
  LevyMeasureWeights w = levy_measure_weights(params, law, jmax);
  if (w.tail_mass > tail_tol) {
    throw std::invalid_argument("SuperpositionSampler: truncation tail mass " +
                                format_double(w.tail_mass) + " exceeds tolerance " +
                                format_double(tail_tol));
  }
  tail_mass_ = w.tail_mass;
  poisson_means_.resize(w.nu.size());
  for (std::size_t j = 0; j < w.nu.size(); ++j) poisson_means_[j] = w.nu[j] * t;
}

SuperpositionSampler::SuperpositionSampler(const OrderKParams& params, const JumpLaw& law,
                                           double t) {
  require_finite_time(t, "SuperpositionSampler");
  LevyMeasureWeights w = levy_measure_weights_auto(params, law, 1e-10);
  tail_mass_ = w.tail_mass;
  poisson_means_.resize(w.nu.size());
  for (std::size_t j = 0; j < w.nu.size(); ++j) poisson_means_[j] = w.nu[j] * t;
}

std::int64_t SuperpositionSampler::sample(Rng& rng) const {
  std::int64_t total = 0;
  for (std::size_t j = 0; j < poisson_means_.size(); ++j) {
    if (poisson_means_[j] <= 0.0) continue;
    total += static_cast<std::int64_t>(j + 1) * sample_poisson(rng, poisson_means_[j]);
  }
  return total;
}

std::int64_t superposition_sample(const OrderKParams& params, const JumpLaw& law, double t,
                                  Rng& rng) {
  return SuperpositionSampler(params, law, t).sample(rng);
}

// --- Compensation and marginal CDF ---------------------------------------------

double martingale_compensator(const OrderKParams& params, const JumpLaw& law, double t) {
  return cppok_mean(params, law, t);
}

double martingale_residual(const ProcessPath& path, const OrderKParams& params,
                           const JumpLaw& law, double t) {
  if (!(t >= 0.0) || t > path.horizon) {
    throw std::invalid_argument("martingale_residual: t must lie in [0, horizon]");
  }
  return path_value_at(path, t) - martingale_compensator(params, law, t);
}

double marginal_cdf(const OrderKParams& params, const JumpLaw& law, double t, double y,
                    double tail_eps) {
  params.validate();
  require_finite_time(t, "marginal_cdf");
  if (std::isnan(y)) throw std::invalid_argument("marginal_cdf: y must not be NaN");
  if (y < 0.0) return 0.0;
  PokPmfTable table = pok_pmf_auto(params, t, tail_eps);
  CompensatedSum acc;
  if (const std::vector<double>* q = law.integer_pmf()) {
    // Exact truncated convolution powers; entries above floor(y) never matter.
    const auto cap = static_cast<std::size_t>(std::min(y, 1e9));
    acc.add(table.probs[0]);
    std::vector<double> cur{1.0};
    for (std::size_t j = 1; j < table.probs.size(); ++j) {
      cur = convolve_truncated(cur, *q, cap);
      double below = 0.0;
      for (double p : cur) below += p;
      if (below == 0.0) break;  // support outgrew y; heavier folds contribute nothing
      acc.add(table.probs[j] * below);
    }
  } else {
    for (std::size_t j = 0; j < table.probs.size(); ++j) {
      acc.add(table.probs[j] * law.convolution_cdf(static_cast<std::int64_t>(j), y));
    }
  }
  return std::min(acc.value(), 1.0);
}

}  // namespace cppok
