#include "starnet/qops.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace starnet {

namespace {

void require_square_power_of_two(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw InvalidArgument(std::string(what) + ": matrix is not square");
  }
  if (qubit_count(m.rows()) < 0) {
    throw InvalidArgument(std::string(what) + ": dimension is not a power of two");
  }
}

double hermitian_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

int qubit_count(Eigen::Index dim) {
  if (dim <= 0) return -1;
  auto d = static_cast<std::size_t>(dim);
  if (!std::has_single_bit(d)) return -1;
  return std::countr_zero(d);
}

int popcount(std::size_t index) { return std::popcount(index); }

// QOperator

QOperator::QOperator(Matrix m) : m_(std::move(m)) {
  require_square_power_of_two(m_, "QOperator");
}

bool QOperator::is_hermitian(double tol) const { return hermitian_defect(m_) <= tol; }

QOperator QOperator::operator*(const QOperator& rhs) const {
  if (dim() != rhs.dim()) throw InvalidArgument("QOperator product: dimension mismatch");
  return QOperator(m_ * rhs.m_);
}

QOperator QOperator::operator+(const QOperator& rhs) const {
  if (dim() != rhs.dim()) throw InvalidArgument("QOperator sum: dimension mismatch");
  return QOperator(m_ + rhs.m_);
}

QOperator QOperator::operator-(const QOperator& rhs) const {
  if (dim() != rhs.dim()) throw InvalidArgument("QOperator difference: dimension mismatch");
  return QOperator(m_ - rhs.m_);
}

QOperator QOperator::operator*(cplx s) const { return QOperator(m_ * s); }

// QDensity

QDensity::QDensity(Matrix m, const Tolerances& tol) : m_(std::move(m)) {
  require_square_power_of_two(m_, "QDensity");
  if (hermitian_defect(m_) > tol.density_hermitian) {
    throw InvalidArgument("QDensity: matrix is not Hermitian");
  }
  const cplx tr = m_.trace();
  if (std::abs(tr - 1.0) > tol.density_trace) {
    throw InvalidArgument("QDensity: trace " + std::to_string(tr.real()) + " differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < tol.density_min_eigenvalue) {
    throw InvalidArgument("QDensity: matrix is not positive semidefinite (min eigenvalue " +
                          std::to_string(es.eigenvalues().minCoeff()) + ")");
  }
}

double QDensity::purity() const { return (m_ * m_).trace().real(); }

// QPureState

QPureState::QPureState(Vector amplitudes, const Tolerances& tol) : v_(std::move(amplitudes)) {
  if (qubit_count(v_.size()) < 0) {
    throw InvalidArgument("QPureState: dimension is not a power of two");
  }
  if (std::abs(v_.squaredNorm() - 1.0) > tol.pure_norm) {
    throw InvalidArgument("QPureState: state is not normalized");
  }
}

QDensity QPureState::density() const { return QDensity(v_ * v_.adjoint()); }

double QPureState::fidelity(const QPureState& other) const {
  if (dim() != other.dim()) throw InvalidArgument("fidelity: dimension mismatch");
  return std::norm(v_.dot(other.v_));
}

// Operators

QOperator pauli(Pauli kind) {
  using namespace std::complex_literals;
  Matrix m = Matrix::Zero(2, 2);
  switch (kind) {
    case Pauli::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Pauli::Y:
      m(0, 1) = -1.0i;
      m(1, 0) = 1.0i;
      break;
    case Pauli::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case Pauli::Plus:
      m(0, 1) = 1.0;
      break;
    case Pauli::Minus:
      m(1, 0) = 1.0;
      break;
    case Pauli::Identity:
      m = Matrix::Identity(2, 2);
      break;
  }
  return QOperator(std::move(m));
}

QOperator kron(const QOperator& a, const QOperator& b) {
  const auto& A = a.matrix();
  const auto& B = b.matrix();
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return QOperator(std::move(out));
}

QOperator embed(const QOperator& op, int site, int n_sites) {
  if (op.dim() != 2) throw InvalidArgument("embed: operator must be 2x2");
  if (n_sites < 1 || n_sites > kMaxDenseQubits) {
    throw InvalidArgument("embed: register size out of range");
  }
  if (site < 0 || site >= n_sites) throw InvalidArgument("embed: site index out of range");

  const std::size_t dim = std::size_t{1} << n_sites;
  const int shift = n_sites - 1 - site;
  const auto& o = op.matrix();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    const int bit = static_cast<int>((col >> shift) & 1U);
    for (int nb = 0; nb < 2; ++nb) {
      const cplx amp = o(nb, bit);
      if (amp == cplx{}) continue;
      const std::size_t row = (col & ~(std::size_t{1} << shift)) |
                              (static_cast<std::size_t>(nb) << shift);
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = amp;
    }
  }
  return QOperator(std::move(out));
}

QPureState basis_state(const std::vector<int>& bits) {
  if (bits.empty() || static_cast<int>(bits.size()) > kMaxDenseQubits) {
    throw InvalidArgument("basis_state: register size out of range");
  }
  std::size_t index = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw InvalidArgument("basis_state: bits must be 0 or 1");
    index = (index << 1) | static_cast<std::size_t>(b);
  }
  Vector v = Vector::Zero(Eigen::Index{1} << bits.size());
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return QPureState(std::move(v));
}

Matrix partial_trace_matrix(const Matrix& rho, int n_sites, std::vector<int> keep) {
  if (keep.empty()) throw InvalidArgument("partial_trace: keep set is empty");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
    throw InvalidArgument("partial_trace: duplicate site in keep set");
  }
  if (keep.front() < 0 || keep.back() >= n_sites) {
    throw InvalidArgument("partial_trace: site index out of range");
  }
  if (rho.rows() != (Eigen::Index{1} << n_sites) || rho.cols() != rho.rows()) {
    throw InvalidArgument("partial_trace: matrix dimension does not match register size");
  }

  std::vector<int> traced;
  for (int s = 0, k = 0; s < n_sites; ++s) {
    if (k < static_cast<int>(keep.size()) && keep[k] == s) {
      ++k;
    } else {
      traced.push_back(s);
    }
  }

  const int nk = static_cast<int>(keep.size());
  const int nt = static_cast<int>(traced.size());
  // Scatter a (kept, traced) pair of sub-indices into a full basis index.
  auto compose = [&](std::size_t kept_idx, std::size_t traced_idx) {
    std::size_t full = 0;
    for (int i = 0; i < nk; ++i) {
      const std::size_t bit = (kept_idx >> (nk - 1 - i)) & 1U;
      full |= bit << (n_sites - 1 - keep[i]);
    }
    for (int i = 0; i < nt; ++i) {
      const std::size_t bit = (traced_idx >> (nt - 1 - i)) & 1U;
      full |= bit << (n_sites - 1 - traced[i]);
    }
    return static_cast<Eigen::Index>(full);
  };

  const std::size_t dk = std::size_t{1} << nk;
  const std::size_t dt = std::size_t{1} << nt;
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t a = 0; a < dk; ++a) {
    for (std::size_t b = 0; b < dk; ++b) {
      cplx acc{};
      for (std::size_t t = 0; t < dt; ++t) acc += rho(compose(a, t), compose(b, t));
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = acc;
    }
  }
  return out;
}

QDensity partial_trace(const QDensity& rho, std::vector<int> keep) {
  return QDensity(partial_trace_matrix(rho.matrix(), rho.n_qubits(), std::move(keep)));
}

EigenSystem eig_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw InvalidArgument("eig_hermitian: matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermitian_defect(m) > tol * scale) {
    throw InvalidArgument("eig_hermitian: input is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw NumericalFailure("eig_hermitian: solver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

EigenSystem eig_hermitian(const QOperator& op) { return eig_hermitian(op.matrix()); }

MeasureResult project_measure(const QDensity& state, int site, int outcome) {
  const int n = state.n_qubits();
  if (site < 0 || site >= n) throw InvalidArgument("project_measure: site index out of range");
  if (outcome != 0 && outcome != 1) throw InvalidArgument("project_measure: outcome must be 0 or 1");

  const int shift = n - 1 - site;
  const auto dim = state.dim();
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (static_cast<int>((static_cast<std::size_t>(i) >> shift) & 1U) == outcome) support.push_back(i);
  }

  const Matrix& rho = state.matrix();
  double p = 0.0;
  for (auto i : support) p += rho(i, i).real();
  p = std::clamp(p, 0.0, 1.0);

  MeasureResult result;
  result.probability = p;
  if (p <= kDefaultTolerances.measure_zero_probability) return result;

  Matrix post = Matrix::Zero(dim, dim);
  for (auto i : support) {
    for (auto j : support) post(i, j) = rho(i, j) / p;
  }
  result.post_state = QDensity(std::move(post));
  return result;
}

QOperator excitation_number(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxDenseQubits) {
    throw InvalidArgument("excitation_number: register size out of range");
  }
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  Matrix m = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = popcount(static_cast<std::size_t>(i));
  return QOperator(std::move(m));
}

}  // namespace starnet
