#pragma once

// Adaptive Dormand-Prince 5(4) integrator for Eigen-valued states.
//
// The step size is clamped so that every requested sample time is hit
// exactly; no interpolation is involved, which keeps sampled states
// bit-for-bit reproducible.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "starnet/qops.hpp"

namespace starnet {

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-13;
  double initial_step = 0.0;   // 0 selects a step automatically
  double min_step_fraction = 1e-13;
  long max_steps = 50'000'000;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evaluations = 0;
};

namespace detail {

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, const IntegratorOptions& opt) {
  const auto scale = (opt.atol + opt.rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
  const double sq = (err.cwiseAbs().array() / scale).square().sum();
  return std::sqrt(sq / static_cast<double>(err.size()));
}

}  // namespace detail

/// Integrates dy/dt = rhs(t, y) from t0 and calls `on_sample(k, t_k, y(t_k))`
/// for each time in `sample_times` (ascending, >= t0). `rhs` has the
/// signature State(double, const State&).
template <class State, class Rhs, class Observer>
IntegratorStats integrate_dopri5(Rhs&& rhs, State y, double t0, std::span<const double> sample_times,
                                 Observer&& on_sample, const IntegratorOptions& opt = {}) {
  // Butcher tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  IntegratorStats stats;
  if (sample_times.empty()) return stats;
  if (!std::is_sorted(sample_times.begin(), sample_times.end()) || sample_times.front() < t0) {
    throw InvalidArgument("integrate_dopri5: sample times must be ascending and not before t0");
  }

  const double span = std::max(sample_times.back() - t0, 0.0);
  double t = t0;
  State k1 = rhs(t, y);
  ++stats.rhs_evaluations;

  double h = opt.initial_step;
  if (!(h > 0.0)) {
    const double d0 = y.norm();
    const double d1 = k1.norm();
    h = (d0 > 1e-5 && d1 > 1e-5) ? 0.01 * d0 / d1 : 1e-6 * std::max(span, 1e-300);
    if (span > 0.0) h = std::min(h, span);
  }
  const double h_floor = opt.min_step_fraction * std::max(span, std::abs(t0));

  std::size_t next = 0;
  while (next < sample_times.size() && sample_times[next] <= t) {
    on_sample(next, t, static_cast<const State&>(y));
    ++next;
  }

  while (next < sample_times.size()) {
    if (stats.accepted + stats.rejected >= opt.max_steps) throw NumericalFailure("integrate_dopri5: step budget exhausted");
    const double target = sample_times[next];
    const bool clamped = t + h >= target;
    const double step = clamped ? target - t : h;
    if (step < h_floor && !clamped) throw NumericalFailure("integrate_dopri5: step size underflow");

    const State k2 = rhs(t + c2 * step, State(y + step * (a21 * k1)));
    const State k3 = rhs(t + c3 * step, State(y + step * (a31 * k1 + a32 * k2)));
    const State k4 = rhs(t + c4 * step, State(y + step * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = rhs(t + c5 * step, State(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 = rhs(t + step, State(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    State y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    State k7 = rhs(t + step, y_new);
    stats.rhs_evaluations += 6;

    const State err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = detail::error_norm(err, y, y_new, opt);
    if (!std::isfinite(en)) throw NumericalFailure("integrate_dopri5: non-finite state");

    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    if (en <= 1.0) {
      ++stats.accepted;
      t = clamped ? target : t + step;
      y = std::move(y_new);
      k1 = std::move(k7);
      // A clamped step says nothing about the natural step size unless it failed.
      h = clamped ? std::max(h, step * factor) : step * factor;
      if (clamped) {
        on_sample(next, t, static_cast<const State&>(y));
        ++next;
      }
    } else {
      ++stats.rejected;
      h = step * std::max(factor, 0.2);
      if (h < h_floor) throw NumericalFailure("integrate_dopri5: step size underflow");
    }
  }
  return stats;
}

}  // namespace starnet
