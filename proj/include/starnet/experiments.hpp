#pragma once

// Campaign drivers: length sweeps, the exponential E_m fit, disorder Monte
// Carlo, spin-loss statistics and the field-gradient sensing protocol.
// Every campaign is a set of independent jobs whose results are stored by
// index, so output does not depend on the worker count.

#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "starnet/chain.hpp"
#include "starnet/entangle.hpp"
#include "starnet/lindblad.hpp"

namespace starnet::experiments {

/// Runs job(i) for i in [0, n) on up to `jobs` threads (0 = hardware
/// concurrency). Rethrows the exception of the lowest failing index.
template <class Job>
void parallel_for(std::size_t n, int jobs, Job&& job) {
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs) : std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            job(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct CampaignOptions {
  chain::ChainSpec base{};  // m_chain, lost_sites and disorder are overwritten per job
  int n_outer = 3;
  int jobs = 0;
  entangle::ScanOptions scan{};
};

struct SweepRow {
  int m = 0;
  double t2_s = 0.0;
  entangle::EmResult result;
};

/// One E_m scan per chain length; every (N, M) must satisfy the star-geometry
/// inequality.
std::vector<SweepRow> sweep_length(const std::vector<int>& ms, const lindblad::NoiseSpec& noise,
                                   const CampaignOptions& opts = {});

/// Sweep over the (M, T2) grid, ordered by T2 then M.
std::vector<SweepRow> sweep_grid(const std::vector<int>& ms, const std::vector<double>& t2s_s,
                                 const CampaignOptions& opts = {});

struct GridPoint {
  int m = 0;
  double t2_s = 0.0;
  double e_m = 0.0;
};

struct FitResult {
  double prefactor = 0.0;
  double a = 0.0;
  double b = 0.0;
  double residual = 0.0;  // RMS on log E_m
  int n_used = 0;
  int n_excluded = 0;
  bool bounds_widened = false;
};

/// Least squares for log E_m = log c - a (1/T2)^b M with T2 in seconds.
FitResult fit_exponential(std::vector<GridPoint> points);

struct DisorderRow {
  int m = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single run
  std::vector<double> values;
};

std::vector<DisorderRow> disorder_monte_carlo(const std::vector<int>& ms, int runs, double variance_nm2,
                                              const lindblad::NoiseSpec& noise, std::uint64_t seed,
                                              const CampaignOptions& opts = {});

struct LossReport {
  int m = 0;
  int n_lost = 0;
  std::vector<std::vector<int>> configurations;
  std::vector<entangle::EmResult> results;
  double expectation = 0.0;

  bool empty() const { return configurations.empty(); }
};

struct LossStudy {
  LossReport one;
  LossReport two;
};

LossReport loss_report(int m, int n_lost, const lindblad::NoiseSpec& noise, const CampaignOptions& opts = {});
LossStudy loss_study(int m, const lindblad::NoiseSpec& noise, const CampaignOptions& opts = {});

// Field-gradient sensing.

struct GradientSpec {
  double b0_tesla = 0.0;
  double gx = 0.0;  // T/m
  double gy = 0.0;  // T/m
  double gamma = 2.0 * 3.14159265358979323846 * 28.024951e9;  // rad s^-1 T^-1, NV electron
  double omega0 = 0.0;                                         // rad/s
  double d_nm = 50.0;
  std::vector<double> times;  // s

  void validate() const;
};

struct Position {
  double x_nm = 0.0;
  double y_nm = 0.0;
};

/// Transition frequency omega0 + gamma B(x, y).
double transition_frequency(const GradientSpec& grad, Position p);

/// Tr(rho(t) C) with C = |10><01| + |01><10|, where each qubit's |1> level
/// accumulates phase at its local transition frequency.
std::vector<double> gradient_coherence(const QDensity& pair, const GradientSpec& grad, Position a, Position b);

/// (|01> + |10>)/sqrt(2)
QDensity ideal_pair();

class EstimationFailure : public NumericalFailure {
public:
  using NumericalFailure::NumericalFailure;
};

struct GradientEstimate {
  double gradient = 0.0;  // |G| in T/m
  double omega = 0.0;     // fitted angular frequency
  double amplitude = 0.0;
  double phase = 0.0;
  double rms_residual = 0.0;
};

/// Least-squares fit of A cos(w t + phi) to the series; G = w / (gamma D).
/// Throws EstimationFailure for short series, spans under half a period and
/// amplitudes below 0.05.
GradientEstimate estimate_gradient(const std::vector<double>& times, const std::vector<double>& values,
                                   double gamma, double d_nm);

struct GradientPair {
  GradientEstimate x;
  GradientEstimate y;
};

/// Two-round protocol: the first pair lies along x, the second along y.
GradientPair estimate_gradient_2d(const std::vector<double>& times, const std::vector<double>& series_x,
                                  const std::vector<double>& series_y, double gamma, double d_nm);

/// Noisy register pair at the E_m peak of a chain of length m.
QDensity distributed_pair(int m, const lindblad::NoiseSpec& noise, const CampaignOptions& opts = {});

}  // namespace starnet::experiments
