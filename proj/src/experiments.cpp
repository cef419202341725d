#include "starnet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "starnet/seed.hpp"

namespace starnet::experiments {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

/// Golden-section minimum of f on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

chain::ChainSpec job_spec(const CampaignOptions& opts, int m) {
  chain::ChainSpec spec = opts.base;
  spec.m_chain = m;
  spec.lost_sites.clear();
  spec.disorder.reset();
  return spec;
}

void check_star_geometry(const std::vector<int>& ms, int n_outer) {
  for (int m : ms) {
    if (!chain::validate_star_geometry(n_outer, m)) {
      throw PhysicsRejection("star geometry inequality violated for N = " + std::to_string(n_outer) +
                             ", M = " + std::to_string(m));
    }
  }
}

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = std::numeric_limits<double>::infinity();
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double xm = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double ym = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  LineFit f;
  if (!(sxx > 0.0)) return f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  f.rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    f.rss += r * r;
  }
  return f;
}

struct CosineFit {
  double alpha = 0.0;  // cos coefficient
  double beta = 0.0;   // sin coefficient
  double rss = std::numeric_limits<double>::infinity();
};

CosineFit fit_cosine(const std::vector<double>& t, const std::vector<double>& v, double omega) {
  double cc = 0.0, ss = 0.0, cs = 0.0, vc = 0.0, vs = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double c = std::cos(omega * t[i]);
    const double s = std::sin(omega * t[i]);
    cc += c * c;
    ss += s * s;
    cs += c * s;
    vc += v[i] * c;
    vs += v[i] * s;
  }
  CosineFit f;
  const double det = cc * ss - cs * cs;
  if (std::abs(det) < 1e-12 * std::max(1.0, cc * ss)) return f;
  f.alpha = (vc * ss - vs * cs) / det;
  f.beta = (vs * cc - vc * cs) / det;
  double rss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = v[i] - f.alpha * std::cos(omega * t[i]) - f.beta * std::sin(omega * t[i]);
    rss += r * r;
  }
  f.rss = rss;
  return f;
}

}  // namespace

// Sweeps

std::vector<SweepRow> sweep_length(const std::vector<int>& ms, const lindblad::NoiseSpec& noise,
                                   const CampaignOptions& opts) {
  check_star_geometry(ms, opts.n_outer);
  std::vector<SweepRow> rows(ms.size());
  parallel_for(ms.size(), opts.jobs, [&](std::size_t i) {
    rows[i].m = ms[i];
    rows[i].t2_s = noise.t2_s;
    rows[i].result = entangle::max_entanglement_scan(job_spec(opts, ms[i]), noise, opts.scan);
  });
  return rows;
}

std::vector<SweepRow> sweep_grid(const std::vector<int>& ms, const std::vector<double>& t2s_s,
                                 const CampaignOptions& opts) {
  check_star_geometry(ms, opts.n_outer);
  std::vector<SweepRow> rows(ms.size() * t2s_s.size());
  parallel_for(rows.size(), opts.jobs, [&](std::size_t k) {
    const std::size_t ti = k / ms.size();
    const std::size_t mi = k % ms.size();
    rows[k].m = ms[mi];
    rows[k].t2_s = t2s_s[ti];
    rows[k].result = entangle::max_entanglement_scan(job_spec(opts, ms[mi]), lindblad::NoiseSpec{t2s_s[ti]}, opts.scan);
  });
  return rows;
}

// Exponential fit

FitResult fit_exponential(std::vector<GridPoint> points) {
  std::sort(points.begin(), points.end(), [](const GridPoint& l, const GridPoint& r) {
    return std::tie(l.m, l.t2_s, l.e_m) < std::tie(r.m, r.t2_s, r.e_m);
  });
  FitResult out;
  std::vector<double> log_rate, mm, y;
  std::set<int> distinct_m;
  std::set<double> distinct_t2;
  for (const auto& p : points) {
    if (!(p.e_m > 0.0) || !(p.t2_s > 0.0) || std::isinf(p.t2_s)) {
      ++out.n_excluded;
      continue;
    }
    log_rate.push_back(-std::log(p.t2_s));
    mm.push_back(p.m);
    y.push_back(std::log(p.e_m));
    distinct_m.insert(p.m);
    distinct_t2.insert(p.t2_s);
  }
  out.n_used = static_cast<int>(y.size());
  if (out.n_used < 6 || distinct_m.size() < 3 || distinct_t2.size() < 3) {
    throw InvalidArgument("fit_exponential: need >= 6 usable points over >= 3 distinct M and >= 3 distinct T2");
  }

  std::vector<double> x(y.size());
  auto line_at = [&](double b) {
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::exp(b * log_rate[i]) * mm[i];
    return fit_line(x, y);
  };
  auto rss_at = [&](double b) { return line_at(b).rss; };

  double lo = 0.05, hi = 3.0;
  constexpr int kGrid = 240;
  double best_b = lo;
  for (int widen = 0;; ++widen) {
    std::size_t best = 0;
    double best_rss = std::numeric_limits<double>::infinity();
    std::vector<double> grid(kGrid + 1);
    for (int k = 0; k <= kGrid; ++k) {
      grid[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / kGrid;
      const double r = rss_at(grid[static_cast<std::size_t>(k)]);
      if (r < best_rss) {
        best_rss = r;
        best = static_cast<std::size_t>(k);
      }
    }
    const bool at_lo = best == 0;
    const bool at_hi = best == static_cast<std::size_t>(kGrid);
    if ((at_lo || at_hi) && widen < 4) {
      if (at_lo) lo *= 0.5;
      if (at_hi) hi *= 2.0;
      out.bounds_widened = true;
      continue;
    }
    const double a = grid[best == 0 ? 0 : best - 1];
    const double b = grid[std::min(best + 1, static_cast<std::size_t>(kGrid))];
    best_b = golden_min(rss_at, a, b, 1e-12);
    break;
  }

  const LineFit f = line_at(best_b);
  out.b = best_b;
  out.a = -f.slope;
  out.prefactor = std::exp(f.intercept);
  out.residual = std::sqrt(f.rss / static_cast<double>(y.size()));
  return out;
}

// Disorder

std::vector<DisorderRow> disorder_monte_carlo(const std::vector<int>& ms, int runs, double variance_nm2,
                                              const lindblad::NoiseSpec& noise, std::uint64_t seed,
                                              const CampaignOptions& opts) {
  if (runs < 1) throw InvalidArgument("disorder_monte_carlo: runs must be >= 1");
  if (!(variance_nm2 >= 0.0)) throw InvalidArgument("disorder_monte_carlo: variance must be >= 0");
  check_star_geometry(ms, opts.n_outer);
  std::vector<DisorderRow> rows(ms.size());
  const auto n_runs = static_cast<std::size_t>(runs);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    rows[i].m = ms[i];
    rows[i].values.assign(n_runs, 0.0);
  }
  parallel_for(ms.size() * n_runs, opts.jobs, [&](std::size_t k) {
    const std::size_t mi = k / n_runs;
    const std::size_t run = k % n_runs;
    chain::ChainSpec spec = job_spec(opts, ms[mi]);
    chain::DisorderSpec d;
    d.variance_nm2 = variance_nm2;
    d.seed = derive_seed(seed, "disorder", {static_cast<std::uint64_t>(ms[mi]), run});
    if (opts.base.disorder) d.include_register_gaps = opts.base.disorder->include_register_gaps;
    spec.disorder = d;
    rows[mi].values[run] = entangle::max_entanglement_scan(spec, noise, opts.scan).e_m;
  });
  for (auto& row : rows) {
    const double n = static_cast<double>(row.values.size());
    row.mean = std::accumulate(row.values.begin(), row.values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : row.values) ss += (v - row.mean) * (v - row.mean);
    row.stddev = row.values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }
  return rows;
}

// Spin loss

LossReport loss_report(int m, int n_lost, const lindblad::NoiseSpec& noise, const CampaignOptions& opts) {
  if (m < 1) throw InvalidArgument("loss_report: M must be >= 1");
  LossReport rep;
  rep.m = m;
  rep.n_lost = n_lost;
  rep.configurations = chain::loss_configurations(m, n_lost);
  rep.results.resize(rep.configurations.size());
  parallel_for(rep.configurations.size(), opts.jobs, [&](std::size_t i) {
    chain::ChainSpec spec = job_spec(opts, m);
    spec.lost_sites = rep.configurations[i];
    rep.results[i] = entangle::max_entanglement_scan(spec, noise, opts.scan);
  });
  if (!rep.results.empty()) {
    double sum = 0.0;
    for (const auto& r : rep.results) sum += r.e_m;
    rep.expectation = sum / static_cast<double>(rep.results.size());
  }
  return rep;
}

LossStudy loss_study(int m, const lindblad::NoiseSpec& noise, const CampaignOptions& opts) {
  return {loss_report(m, 1, noise, opts), loss_report(m, 2, noise, opts)};
}

// Gradient sensing

void GradientSpec::validate() const {
  if (!(d_nm > 0.0)) throw InvalidArgument("GradientSpec: pair separation must be positive");
  if (!std::is_sorted(times.begin(), times.end())) throw InvalidArgument("GradientSpec: times must be ascending");
  if (!(gamma > 0.0)) throw InvalidArgument("GradientSpec: gyromagnetic ratio must be positive");
}

double transition_frequency(const GradientSpec& grad, Position p) {
  const double field = grad.b0_tesla + grad.gx * p.x_nm * 1e-9 + grad.gy * p.y_nm * 1e-9;
  return grad.omega0 + grad.gamma * field;
}

std::vector<double> gradient_coherence(const QDensity& pair, const GradientSpec& grad, Position a, Position b) {
  grad.validate();
  if (pair.dim() != 4) throw InvalidArgument("gradient_coherence: expected a two-qubit state");
  const double dx = (b.x_nm - a.x_nm) * 1e-9;
  const double dy = (b.y_nm - a.y_nm) * 1e-9;
  if (dx == 0.0 && dy == 0.0) throw InvalidArgument("gradient_coherence: zero pair separation");
  // Only the frequency difference enters <C>; omega0 and B0 cancel exactly.
  const double detuning = grad.gamma * (grad.gx * dx + grad.gy * dy);
  const cplx rho_01_10 = pair.matrix()(1, 2);
  std::vector<double> out;
  out.reserve(grad.times.size());
  for (double t : grad.times) out.push_back(2.0 * (rho_01_10 * std::polar(1.0, -detuning * t)).real());
  return out;
}

QDensity ideal_pair() {
  Matrix m = Matrix::Zero(4, 4);
  m(1, 1) = m(2, 2) = m(1, 2) = m(2, 1) = 0.5;
  return QDensity(std::move(m));
}

GradientEstimate estimate_gradient(const std::vector<double>& times, const std::vector<double>& values,
                                   double gamma, double d_nm) {
  if (times.size() != values.size()) throw InvalidArgument("estimate_gradient: times and values differ in length");
  if (times.size() < 8) throw EstimationFailure("estimate_gradient: need at least 8 samples");
  if (!(gamma > 0.0) || !(d_nm > 0.0)) throw InvalidArgument("estimate_gradient: gamma and D must be positive");
  double dt_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double d = times[i] - times[i - 1];
    if (!(d > 0.0)) throw InvalidArgument("estimate_gradient: times must be strictly increasing");
    dt_min = std::min(dt_min, d);
  }
  const double span = times.back() - times.front();
  std::vector<double> t(times.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = times[i] - times.front();

  const double pi = 3.14159265358979323846;
  const double w_lo = 0.25 * pi / span;
  const double w_hi = pi / dt_min;
  const double dw = pi / (8.0 * span);
  double best_w = w_lo;
  double best_rss = std::numeric_limits<double>::infinity();
  for (double w = w_lo; w <= w_hi; w += dw) {
    const double r = fit_cosine(t, values, w).rss;
    if (r < best_rss) {
      best_rss = r;
      best_w = w;
    }
  }
  const double w = golden_min([&](double om) { return fit_cosine(t, values, om).rss; },
                              std::max(best_w - dw, 0.5 * w_lo), best_w + dw, 1e-15 * best_w);
  const CosineFit f = fit_cosine(t, values, w);

  GradientEstimate est;
  est.omega = w;
  est.amplitude = std::hypot(f.alpha, f.beta);
  est.phase = std::atan2(-f.beta, f.alpha) - w * times.front();
  est.rms_residual = std::sqrt(f.rss / static_cast<double>(t.size()));
  if (est.amplitude < 0.05) throw EstimationFailure("estimate_gradient: oscillation amplitude below 0.05");
  if (w * span < pi) throw EstimationFailure("estimate_gradient: series spans less than half an oscillation period");
  est.gradient = w / (gamma * d_nm * 1e-9);
  return est;
}

GradientPair estimate_gradient_2d(const std::vector<double>& times, const std::vector<double>& series_x,
                                  const std::vector<double>& series_y, double gamma, double d_nm) {
  return {estimate_gradient(times, series_x, gamma, d_nm), estimate_gradient(times, series_y, gamma, d_nm)};
}

QDensity distributed_pair(int m, const lindblad::NoiseSpec& noise, const CampaignOptions& opts) {
  const auto res = entangle::max_entanglement_scan(job_spec(opts, m), noise, opts.scan);
  return QDensity(res.pair_at_peak);
}

}  // namespace starnet::experiments
