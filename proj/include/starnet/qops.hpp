#pragma once

// Hilbert-space primitives for registers of spin-1/2 sites.
//
// Conventions used throughout the library:
//   * |0> = (1,0)^T is the unexcited level, |1> = (0,1)^T carries one excitation.
//   * Pauli matrices are the textbook ones, so Z|0> = +|0>.
//   * Site 0 is the leftmost tensor factor (most significant bit of a basis index).

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace starnet {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Raised when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when the physics of a request is rejected (disconnected chain,
/// violated star-geometry inequality, ...).
class PhysicsRejection : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised by the integrators (step underflow, trace drift).
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double hamiltonian_hermitian = 1e-12;
  double density_hermitian = 1e-10;
  double density_trace = 1e-8;
  double density_min_eigenvalue = -1e-8;
  double pure_norm = 1e-10;
  double partial_trace = 1e-10;
  double measure_zero_probability = 1e-12;
};

/// Process-wide default tolerances. Callers may pass their own instance.
inline constexpr Tolerances kDefaultTolerances{};

/// Largest register that is stored densely.
inline constexpr int kMaxDenseQubits = 14;

/// Number of qubits of a power-of-two dimension, or -1.
int qubit_count(Eigen::Index dim);

/// A square complex operator on an n-qubit register.
class QOperator {
public:
  QOperator() = default;
  explicit QOperator(Matrix m);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  int n_qubits() const { return qubit_count(m_.rows()); }

  bool is_hermitian(double tol = kDefaultTolerances.hamiltonian_hermitian) const;

  QOperator operator*(const QOperator& rhs) const;
  QOperator operator+(const QOperator& rhs) const;
  QOperator operator-(const QOperator& rhs) const;
  QOperator operator*(cplx s) const;

private:
  Matrix m_;
};

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
class QDensity {
public:
  QDensity() = default;
  explicit QDensity(Matrix m, const Tolerances& tol = kDefaultTolerances);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  int n_qubits() const { return qubit_count(m_.rows()); }

  double purity() const;
  cplx trace() const { return m_.trace(); }

private:
  Matrix m_;
};

/// A normalized state vector.
class QPureState {
public:
  QPureState() = default;
  explicit QPureState(Vector amplitudes, const Tolerances& tol = kDefaultTolerances);

  const Vector& amplitudes() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }
  int n_qubits() const { return qubit_count(v_.size()); }

  QDensity density() const;
  /// |<this|other>|^2
  double fidelity(const QPureState& other) const;

private:
  Vector v_;
};

enum class Pauli { X, Y, Z, Plus, Minus, Identity };

/// 2x2 Pauli matrix. Plus/Minus are (X +- iY)/2.
QOperator pauli(Pauli kind);

QOperator kron(const QOperator& a, const QOperator& b);

/// `op` acting on `site` of an `n_sites` register, identity elsewhere.
QOperator embed(const QOperator& op, int site, int n_sites);

/// Computational basis vector for the bit string `bits` (site 0 first).
QPureState basis_state(const std::vector<int>& bits);

/// Reduced state on the sites in `keep`; kept sites appear in increasing order.
QDensity partial_trace(const QDensity& rho, std::vector<int> keep);

/// Same as `partial_trace` on a raw matrix, without validation of the input.
Matrix partial_trace_matrix(const Matrix& rho, int n_sites, std::vector<int> keep);

struct EigenSystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns are eigenvectors
};

/// Spectral decomposition of a Hermitian operator. Rejects non-Hermitian input.
EigenSystem eig_hermitian(const QOperator& op);
EigenSystem eig_hermitian(const Matrix& m, double tol = 1e-10);

struct MeasureResult {
  double probability = 0.0;
  /// Empty when the outcome is impossible (probability below threshold).
  std::optional<QDensity> post_state;

  bool possible() const { return post_state.has_value(); }
};

/// Projective Z-basis measurement of one site.
MeasureResult project_measure(const QDensity& state, int site, int outcome);

/// Total excitation count operator sum_i |1><1|_i.
QOperator excitation_number(int n_sites);

/// Number of set bits in a basis index.
int popcount(std::size_t index);

}  // namespace starnet
