#pragma once

#include <vector>

#include "starnet/chain.hpp"
#include "starnet/lindblad.hpp"
#include "starnet/qops.hpp"

namespace starnet::entangle {

/// Wootters concurrence of a two-qubit state.
double concurrence(const QDensity& rho);

/// h(p) = -p log2 p - (1-p) log2 (1-p)
double binary_entropy(double p);

/// Entanglement of formation from a concurrence value in [0, 1].
double eof_from_concurrence(double c);

/// Entanglement of formation (base 2) of a two-qubit state.
double eof(const QDensity& rho);

/// Two-register reduced state (first and last surviving site).
Matrix register_pair_matrix(const lindblad::SectorState& s);
Matrix register_pair_matrix(const Matrix& rho_full);

std::vector<QDensity> register_pair_state(const lindblad::Trajectory& traj);
std::vector<QDensity> register_pair_state(const lindblad::SectorTrajectory& traj);

struct ScanOptions {
  int n_samples = 2001;
  /// Evolution window in seconds; 0 selects the default window.
  double window_s = 0.0;
  bool refine = true;
  /// Golden-section tolerance in dimensionless time.
  double tau_tolerance = 1e-4;
  lindblad::EvolveOptions evolve{};
};

struct EmResult {
  double tau_star_dimensionless = 0.0;
  double tau_star_s = 0.0;
  double e_m = 0.0;
  double coarse_e_m = 0.0;
  /// False when the maximum sits at the edge of the window.
  bool interior = false;
  bool window_extended = false;
  std::vector<double> tau_dimensionless;
  std::vector<double> tau_s;
  std::vector<double> e_f;
  /// Register pair at tau*.
  Matrix pair_at_peak;
};

/// E_F(tau) over the evolution window, refined around its maximum.
EmResult max_entanglement_scan(const chain::ChainSpec& chain, const lindblad::NoiseSpec& noise,
                               const ScanOptions& opts = {});

}  // namespace starnet::entangle
