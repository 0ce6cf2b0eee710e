#include "cppok/subordinator.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace cppok {

namespace {

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require_component(double alpha, double mu, double c, const char* who) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument(std::string(who) + ": component weight must be finite and >= 0");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument(std::string(who) + ": stability index must lie in (0,1)");
  }
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    throw std::invalid_argument(std::string(who) + ": tempering must be finite and >= 0");
  }
}

}  // namespace

void MtssParams::validate() const {
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || !std::isfinite(c1) || !std::isfinite(c2)) {
    throw std::invalid_argument("MtssParams: mixture weights must be finite and >= 0");
  }
  if (std::abs((c1 + c2) - 1.0) > 1e-12) {
    throw std::invalid_argument("MtssParams: mixture weights must sum to 1 within 1e-12 (got " +
                                format_double(c1 + c2) + ")");
  }
  if (c1 > 0.0) require_component(alpha1, mu1, c1, "MtssParams(component 1)");
  if (c2 > 0.0) require_component(alpha2, mu2, c2, "MtssParams(component 2)");
}

bool MtssParams::has_zero_tempering() const {
  return (c1 > 0.0 && mu1 == 0.0) || (c2 > 0.0 && mu2 == 0.0);
}

std::vector<TemperedComponent> active_components(const MtssParams& params) {
  params.validate();
  std::vector<TemperedComponent> out;
  if (params.c1 > 0.0) out.push_back({params.c1, params.alpha1, params.mu1});
  if (params.c2 > 0.0) out.push_back({params.c2, params.alpha2, params.mu2});
  return out;
}

double laplace_exponent(const MtssParams& params, double s) {
  params.validate();
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("laplace_exponent: s must be finite and >= 0");
  }
  double f = 0.0;
  for (const TemperedComponent& comp : active_components(params)) {
    f += comp.weight * (std::pow(s + comp.mu, comp.alpha) - std::pow(comp.mu, comp.alpha));
  }
  return f;
}

double mtss_mean_rate(const MtssParams& params) {
  params.validate();
  if (params.has_zero_tempering()) {
    throw std::domain_error("mtss_mean_rate: an untempered (mu=0) component has infinite mean");
  }
  double m = 0.0;
  for (const TemperedComponent& comp : active_components(params)) {
    m += comp.weight * comp.alpha * std::pow(comp.mu, comp.alpha - 1.0);
  }
  return m;
}

double mtss_variance_rate(const MtssParams& params) {
  params.validate();
  if (params.has_zero_tempering()) {
    throw std::domain_error("mtss_variance_rate: an untempered (mu=0) component has infinite variance");
  }
  double v = 0.0;
  for (const TemperedComponent& comp : active_components(params)) {
    v += comp.weight * comp.alpha * (1.0 - comp.alpha) * std::pow(comp.mu, comp.alpha - 2.0);
  }
  return v;
}

double mtss_mean(const MtssParams& params, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("mtss_mean: time must be finite and >= 0");
  }
  return t * mtss_mean_rate(params);
}

double mtss_variance(const MtssParams& params, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("mtss_variance: time must be finite and >= 0");
  }
  return t * mtss_variance_rate(params);
}

double sample_stable_increment(double alpha, double dt, Rng& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("sample_stable_increment: stability index must lie in (0,1)");
  }
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("sample_stable_increment: dt must be finite and >= 0");
  }
  if (dt == 0.0) return 0.0;
  // Product representation of a positive stable variate A with Laplace
  // transform exp(-s^alpha):
  //   A = [sin(alpha*U) / sin(U)^{1/alpha}] * [sin((1-alpha)*U) / W]^{(1-alpha)/alpha},
  // U ~ Uniform(0, pi), W ~ Exp(1).  The increment over dt then scales as
  // dt^{1/alpha} * A, since exp(-dt*s^alpha) = exp(-(dt^{1/alpha} s)^alpha).
  const double u = std::numbers::pi * uniform_open01(rng);
  const double w = -std::log(uniform_open01(rng));
  const double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha) *
                   std::pow(std::sin((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
  return std::pow(dt, 1.0 / alpha) * a;
}

double sample_tempered_stable_increment(double alpha, double mu, double c, double dt, Rng& rng) {
  require_component(alpha, mu, c, "sample_tempered_stable_increment");
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("sample_tempered_stable_increment: dt must be finite and >= 0");
  }
  if (dt == 0.0 || c == 0.0) return 0.0;
  if (mu == 0.0) return sample_stable_increment(alpha, c * dt, rng);
  // Exponential tilting by rejection: propose X stable with transform
  // exp(-w*s^alpha), w = c*dt_sub, and accept with probability exp(-mu*X);
  // accepted draws have transform exp(-w*((s+mu)^alpha - mu^alpha)).  The
  // acceptance rate is exp(-w*mu^alpha), so dt is subdivided until
  // w*mu^alpha <= 1, keeping the expected number of proposals <= e per piece.
  const double cost = c * dt * std::pow(mu, alpha);
  const auto pieces = static_cast<std::int64_t>(std::ceil(std::max(cost, 1.0)));
  const double dt_sub = dt / static_cast<double>(pieces);
  double total = 0.0;
  for (std::int64_t i = 0; i < pieces; ++i) {
    for (;;) {
      const double x = sample_stable_increment(alpha, c * dt_sub, rng);
      if (uniform_open01(rng) < std::exp(-mu * x)) {
        total += x;
        break;
      }
    }
  }
  return total;
}

double sample_mtss_increment(const MtssParams& params, double dt, Rng& rng) {
  params.validate();
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("sample_mtss_increment: dt must be finite and >= 0");
  }
  double total = 0.0;
  for (const TemperedComponent& comp : active_components(params)) {
    total += sample_tempered_stable_increment(comp.alpha, comp.mu, comp.weight, dt, rng);
  }
  return total;
}

SubordinatorPath sample_mtss_path(const MtssParams& params, std::vector<double> grid, Rng& rng) {
  params.validate();
  if (grid.empty()) throw std::invalid_argument("sample_mtss_path: grid must be non-empty");
  double prev = 0.0;
  for (double g : grid) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("sample_mtss_path: grid must be finite and >= 0");
    }
    if (g < prev) throw std::invalid_argument("sample_mtss_path: grid must be non-decreasing");
    prev = g;
  }
  SubordinatorPath path;
  path.values.resize(grid.size());
  double t_prev = 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    s += sample_mtss_increment(params, grid[i] - t_prev, rng);
    path.values[i] = s;
    t_prev = grid[i];
  }
  path.grid = std::move(grid);
  return path;
}

InversePath sample_inverse_path(const MtssParams& params, std::vector<double> tgrid, double step,
                                Rng& rng, PassageBrackets* brackets, std::uint64_t max_steps) {
  params.validate();
  if (tgrid.empty()) throw std::invalid_argument("sample_inverse_path: tgrid must be non-empty");
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("sample_inverse_path: step must be finite and > 0");
  }
  double prev = 0.0;
  for (double t : tgrid) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
      throw std::invalid_argument("sample_inverse_path: tgrid must be finite and >= 0");
    }
    if (t < prev) throw std::invalid_argument("sample_inverse_path: tgrid must be non-decreasing");
    prev = t;
  }
  if (max_steps == 0) {
    // Generous default: ~50x the expected number of lattice steps when the
    // mean exists, otherwise a flat cap.  This is an operational-time budget
    // guard, not a statistical bound.
    if (!params.has_zero_tempering()) {
      const double expected = tgrid.back() / mtss_mean_rate(params) / step;
      max_steps = static_cast<std::uint64_t>(50.0 * expected) + 1000000ULL;
    } else {
      max_steps = 100000000ULL;
    }
  }

  InversePath path;
  path.grid = std::move(tgrid);
  path.values.resize(path.grid.size());
  path.bias_bound = step;
  if (brackets != nullptr) {
    brackets->s_below.resize(path.grid.size());
    brackets->s_at.resize(path.grid.size());
  }

  // Walk the lattice r = step, 2*step, ... recording, for each query time t,
  // the first lattice point where the subordinator exceeds t.  Since S is
  // nondecreasing the passage points are found in grid order in one sweep.
  double r = 0.0;
  double s_prev = 0.0;
  double s = 0.0;
  std::size_t i = 0;
  std::uint64_t steps = 0;
  while (i < path.grid.size()) {
    if (++steps > max_steps) {
      throw std::runtime_error("sample_inverse_path: operational-time budget exceeded after " +
                               std::to_string(max_steps) + " lattice steps");
    }
    r += step;
    s_prev = s;
    s += sample_mtss_increment(params, step, rng);
    while (i < path.grid.size() && s > path.grid[i]) {
      path.values[i] = r;
      if (brackets != nullptr) {
        brackets->s_below[i] = s_prev;
        brackets->s_at[i] = s;
      }
      ++i;
    }
  }
  return path;
}

double inverse_mean_asymptote(const MtssParams& params) { return 1.0 / mtss_mean_rate(params); }

double default_inverse_step(const MtssParams& params, double tmax) {
  if (!(tmax > 0.0) || !std::isfinite(tmax)) {
    throw std::invalid_argument("default_inverse_step: tmax must be finite and > 0");
  }
  return 0.01 * inverse_mean_asymptote(params) * tmax;
}

}  // namespace cppok
