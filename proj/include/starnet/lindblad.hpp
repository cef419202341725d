#pragma once

// Markovian dephasing dynamics of the register-chain-register system.
//
// Two execution paths share the same physics:
//   * full space: the 2^n x 2^n density matrix under the Lindblad generator
//     with explicit jump operators;
//   * sector form: the flip-flop Hamiltonian and Z dephasing both conserve
//     the excitation number, so a state in the 0 (+) 1 excitation span stays
//     there and is carried by a scalar, a vector and an n x n block.

#include <limits>
#include <vector>

#include <Eigen/Sparse>

#include "starnet/chain.hpp"
#include "starnet/integrator.hpp"
#include "starnet/qops.hpp"

namespace starnet::lindblad {

struct NoiseSpec {
  double t2_s = 1e-3;  // infinity disables dephasing

  static NoiseSpec noiseless() { return {std::numeric_limits<double>::infinity()}; }
  void validate() const;
  /// Per-site rate Gamma = 1/T2 in 1/s.
  double rate() const;
};

/// A general Lindblad generator with Hermitian Hamiltonian and a list of
/// jump operators L_k at rates gamma_k.
class Liouvillian {
public:
  Liouvillian(QOperator hamiltonian, std::vector<QOperator> jumps, std::vector<double> rates);

  /// Z dephasing on every site at the rate given by `noise`.
  static Liouvillian dephasing(QOperator hamiltonian, const NoiseSpec& noise);

  Matrix apply(const Matrix& rho) const;
  /// Same as apply() for Hermitian rho, using rho H = (H rho)^dag.
  Matrix apply_hermitian(const Matrix& rho) const;
  Eigen::Index dim() const { return h_.rows(); }

private:
  Eigen::SparseMatrix<cplx> h_;
  std::vector<Matrix> jumps_;
  std::vector<double> rates_;
  Matrix anticommutator_;         // sum_k gamma_k L_k^dag L_k over non-diagonal jumps
  Eigen::MatrixXd diagonal_kernel_;  // elementwise action of the real diagonal jumps
};

/// d rho / dt for the chain Hamiltonian with Z dephasing on every site.
Matrix lindblad_rhs(const Matrix& rho, const QOperator& h, const NoiseSpec& noise);

struct SectorState {
  double block00 = 0.0;  // vacuum population
  Vector block01;        // <vac| rho |e_j>
  Matrix block11;        // <e_i| rho |e_j>

  Eigen::Index n_sites() const { return block01.size(); }
  /// Checks the trace, Hermiticity and positivity invariants.
  void validate(double tol = 1e-8) const;
  /// Full 2^n density matrix; site k of the sector maps to qubit k.
  Matrix to_matrix() const;
  /// Extracts the sector blocks; rejects weight outside the 0 (+) 1 span.
  static SectorState from_matrix(const Matrix& rho, double tol = 1e-12);
};

struct EvolveOptions {
  IntegratorOptions integrator{};
  /// Angular frequency used to report dimensionless times (kappa t).
  double time_unit = 1.0;
  double max_trace_drift = 1e-6;
};

struct Trajectory {
  std::vector<double> times_s;
  std::vector<double> times_dimensionless;
  std::vector<Matrix> states;
  std::vector<int> site_map;  // original lattice label of each qubit
  IntegratorStats stats;
};

struct SectorTrajectory {
  std::vector<double> times_s;
  std::vector<double> times_dimensionless;
  std::vector<SectorState> states;
  std::vector<int> site_map;
  IntegratorStats stats;
};

/// Register 0 in |+>, every other site in |0>, on the surviving sites of `spec`.
QDensity initial_transfer_state(const chain::ChainSpec& spec);
SectorState initial_transfer_sector(const chain::ChainSpec& spec);

/// Equally spaced times 0..t_end with n_samples >= 2 entries.
std::vector<double> sample_grid(double t_end, int n_samples);
std::vector<double> sample_grid(double t_begin, double t_end, int n_samples);

Trajectory evolve(const QDensity& rho0, const QOperator& h, const NoiseSpec& noise, double t_end,
                  int n_samples, const EvolveOptions& opts = {});

/// Sector dynamics: d rho01/dt = i rho01 h - 2 Gamma rho01 and
/// d rho11/dt = -i[h, rho11] - 4 Gamma offdiag(rho11).
SectorState sector_rhs(const SectorState& s, const Eigen::MatrixXd& hopping, double rate);

SectorTrajectory evolve_sector(const SectorState& rho0, const chain::CouplingGraph& graph,
                               const NoiseSpec& noise, double t_end, int n_samples,
                               const EvolveOptions& opts = {});
SectorTrajectory evolve_sector(const SectorState& rho0, const chain::CouplingGraph& graph,
                               const NoiseSpec& noise, std::span<const double> times,
                               const EvolveOptions& opts = {});

/// Site-local observables understood by both trajectory kinds.
struct SiteObservable {
  enum class Kind { Identity, Z, Excitation, TotalExcitation } kind = Kind::Identity;
  int slot = 0;  // qubit index within the surviving register
};

std::vector<double> observable_expectation(const Trajectory& traj, const QOperator& op);
std::vector<double> observable_expectation(const Trajectory& traj, SiteObservable obs);
std::vector<double> observable_expectation(const SectorTrajectory& traj, SiteObservable obs);

/// Default window 40/kappa scaled by (M+2)/5.
double default_window_s(const chain::ChainSpec& spec);

}  // namespace starnet::lindblad
