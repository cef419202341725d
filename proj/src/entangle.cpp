#include "starnet/entangle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace starnet::entangle {

namespace {

constexpr double kClampNegative = 1e-10;

Matrix sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  RealVector w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix spin_flip(const Matrix& rho) {
  const Matrix yy = kron(pauli(Pauli::Y), pauli(Pauli::Y)).matrix();
  return yy * rho.conjugate() * yy;
}

/// Golden-section search for the maximum of f on [a, b].
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

double concurrence(const QDensity& rho) {
  if (rho.dim() != 4) throw InvalidArgument("concurrence: expected a two-qubit state");
  const Matrix s = sqrt_psd(rho.matrix());
  const Matrix r = s * spin_flip(rho.matrix()) * s;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
  RealVector mu = es.eigenvalues();
  if (mu.minCoeff() < -kClampNegative) {
    throw NumericalFailure("concurrence: product matrix has a significantly negative eigenvalue");
  }
  RealVector lam = mu.cwiseMax(0.0).cwiseSqrt();
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::clamp(lam(0) - lam(1) - lam(2) - lam(3), 0.0, 1.0);
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double eof_from_concurrence(double c) {
  if (c < 0.0 || c > 1.0 + 1e-12) throw InvalidArgument("eof_from_concurrence: concurrence outside [0, 1]");
  c = std::min(c, 1.0);
  return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))));
}

double eof(const QDensity& rho) { return eof_from_concurrence(concurrence(rho)); }

Matrix register_pair_matrix(const lindblad::SectorState& s) {
  const Eigen::Index n = s.n_sites();
  if (n < 2) throw InvalidArgument("register_pair_matrix: need two register sites");
  const Eigen::Index last = n - 1;
  // Basis |r0 r1>: 0 = |00>, 1 = |01>, 2 = |10>, 3 = |11>.
  Matrix p = Matrix::Zero(4, 4);
  p(0, 0) = s.block00 + s.block11.trace().real() - s.block11(0, 0).real() - s.block11(last, last).real();
  p(0, 2) = s.block01(0);
  p(2, 0) = std::conj(s.block01(0));
  p(0, 1) = s.block01(last);
  p(1, 0) = std::conj(s.block01(last));
  p(2, 2) = s.block11(0, 0);
  p(1, 1) = s.block11(last, last);
  p(2, 1) = s.block11(0, last);
  p(1, 2) = s.block11(last, 0);
  return p;
}

Matrix register_pair_matrix(const Matrix& rho_full) {
  const int n = qubit_count(rho_full.rows());
  if (n < 2) throw InvalidArgument("register_pair_matrix: need two register sites");
  return partial_trace_matrix(rho_full, n, {0, n - 1});
}

std::vector<QDensity> register_pair_state(const lindblad::Trajectory& traj) {
  std::vector<QDensity> out;
  out.reserve(traj.states.size());
  for (const auto& rho : traj.states) out.emplace_back(register_pair_matrix(rho));
  return out;
}

std::vector<QDensity> register_pair_state(const lindblad::SectorTrajectory& traj) {
  std::vector<QDensity> out;
  out.reserve(traj.states.size());
  for (const auto& s : traj.states) out.emplace_back(register_pair_matrix(s));
  return out;
}

EmResult max_entanglement_scan(const chain::ChainSpec& chain, const lindblad::NoiseSpec& noise,
                               const ScanOptions& opts) {
  const auto graph = chain::build_coupling_graph(chain);
  const auto rho0 = lindblad::initial_transfer_sector(chain);
  lindblad::EvolveOptions evo = opts.evolve;
  evo.time_unit = chain.kappa_angular();

  double window = opts.window_s > 0.0 ? opts.window_s : lindblad::default_window_s(chain);
  EmResult res;
  lindblad::SectorTrajectory traj;
  std::size_t best = 0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    traj = lindblad::evolve_sector(rho0, graph, noise, window, opts.n_samples, evo);
    res.e_f.clear();
    for (const auto& s : traj.states) res.e_f.push_back(eof(QDensity(register_pair_matrix(s))));
    best = 0;
    for (std::size_t k = 1; k < res.e_f.size(); ++k) {
      if (res.e_f[k] > res.e_f[best]) best = k;
    }
    const bool in_tail = static_cast<double>(best) >= 0.95 * static_cast<double>(res.e_f.size() - 1);
    if (!in_tail || attempt == 1) break;
    window *= 2.0;
    res.window_extended = true;
  }
  res.tau_s = traj.times_s;
  res.tau_dimensionless = traj.times_dimensionless;
  res.coarse_e_m = res.e_f[best];
  res.e_m = res.coarse_e_m;
  res.tau_star_s = traj.times_s[best];
  res.pair_at_peak = register_pair_matrix(traj.states[best]);
  res.interior = best > 0 && best + 1 < res.e_f.size();

  if (opts.refine && res.interior) {
    const std::size_t lo = best - 1;
    const double t_lo = traj.times_s[lo];
    const double t_hi = traj.times_s[best + 1];
    const auto& start = traj.states[lo];
    Matrix peak_pair;
    auto value_at = [&](double t) {
      if (t <= t_lo) return eof(QDensity(register_pair_matrix(start)));
      const double times[] = {t_lo, t};
      auto seg = lindblad::evolve_sector(start, graph, noise, std::span<const double>(times), evo);
      return eof(QDensity(register_pair_matrix(seg.states.back())));
    };
    const double tol_s = opts.tau_tolerance / evo.time_unit;
    const auto [t_best, f_best] = golden_max(value_at, t_lo, t_hi, tol_s);
    if (f_best > res.e_m) {
      res.e_m = f_best;
      res.tau_star_s = t_best;
      const double times[] = {t_lo, t_best};
      auto seg = lindblad::evolve_sector(start, graph, noise, std::span<const double>(times), evo);
      res.pair_at_peak = register_pair_matrix(seg.states.back());
    }
  }
  res.tau_star_dimensionless = res.tau_star_s * evo.time_unit;
  return res;
}

}  // namespace starnet::entangle
