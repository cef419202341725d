#include "starnet/lindblad.hpp"

#include <cmath>
#include <complex>

namespace starnet::lindblad {

namespace {

using namespace std::complex_literals;

Eigen::Index single_excitation_index(Eigen::Index slot, Eigen::Index n) {
  return Eigen::Index{1} << (n - 1 - slot);
}

Vector pack(const SectorState& s) {
  const Eigen::Index n = s.n_sites();
  Vector v(1 + n + n * n);
  v(0) = s.block00;
  v.segment(1, n) = s.block01;
  v.segment(1 + n, n * n) = s.block11.reshaped();
  return v;
}

SectorState unpack(const Vector& v, Eigen::Index n) {
  SectorState s;
  s.block00 = v(0).real();
  s.block01 = v.segment(1, n);
  s.block11 = v.segment(1 + n, n * n).reshaped(n, n);
  return s;
}

void check_trace(double trace, double t, const EvolveOptions& opts) {
  if (std::abs(trace - 1.0) > opts.max_trace_drift) {
    throw NumericalFailure("trace drift " + std::to_string(trace - 1.0) + " at t = " + std::to_string(t) + " s");
  }
}

bool is_diagonal(const Matrix& m) {
  return (m - Matrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(t2_s > 0.0)) throw InvalidArgument("NoiseSpec: T2 must be positive (or infinite)");
}

double NoiseSpec::rate() const {
  validate();
  return std::isinf(t2_s) ? 0.0 : 1.0 / t2_s;
}

// Liouvillian

Liouvillian::Liouvillian(QOperator hamiltonian, std::vector<QOperator> jumps, std::vector<double> rates) {
  if (!hamiltonian.is_hermitian()) throw InvalidArgument("Liouvillian: Hamiltonian is not Hermitian");
  if (jumps.size() != rates.size()) throw InvalidArgument("Liouvillian: one rate per jump operator required");
  const Matrix& h = hamiltonian.matrix();
  h_ = h.sparseView();
  const Eigen::Index dim = h.rows();
  anticommutator_ = Matrix::Zero(dim, dim);
  diagonal_kernel_ = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const Matrix& l = jumps[k].matrix();
    if (l.rows() != dim) throw InvalidArgument("Liouvillian: jump operator dimension mismatch");
    if (rates[k] < 0.0) throw InvalidArgument("Liouvillian: negative rate");
    if (rates[k] == 0.0) continue;
    if (is_diagonal(l) && l.diagonal().imag().cwiseAbs().maxCoeff() == 0.0) {
      // L rho L^dag - {L^2, rho}/2 acts elementwise: d_i d_j - (d_i^2 + d_j^2)/2
      const RealVector d = l.diagonal().real();
      const RealVector d2 = d.cwiseProduct(d);
      diagonal_kernel_ += rates[k] * (d * d.transpose() - 0.5 * (d2 * RealVector::Ones(dim).transpose() +
                                                                   RealVector::Ones(dim) * d2.transpose()));
    } else {
      anticommutator_ += rates[k] * (l.adjoint() * l);
      jumps_.push_back(l);
      rates_.push_back(rates[k]);
    }
  }
}

Liouvillian Liouvillian::dephasing(QOperator hamiltonian, const NoiseSpec& noise) {
  const int n = hamiltonian.n_qubits();
  const double gamma = noise.rate();
  std::vector<QOperator> jumps;
  std::vector<double> rates;
  for (int i = 0; i < n; ++i) {
    jumps.push_back(embed(pauli(Pauli::Z), i, n));
    rates.push_back(gamma);
  }
  return Liouvillian(std::move(hamiltonian), std::move(jumps), std::move(rates));
}

Matrix Liouvillian::apply(const Matrix& rho) const {
  if (rho.rows() != h_.rows() || rho.cols() != h_.cols()) {
    throw InvalidArgument("Liouvillian: density matrix dimension mismatch");
  }
  Matrix out = h_ * rho;
  out -= rho * h_;
  out *= -1.0i;
  out.array() += diagonal_kernel_.array().cast<cplx>() * rho.array();
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    out.noalias() += rates_[k] * (jumps_[k] * rho * jumps_[k].adjoint());
  }
  if (!jumps_.empty()) out -= 0.5 * (anticommutator_ * rho + rho * anticommutator_);
  return out;
}

Matrix Liouvillian::apply_hermitian(const Matrix& rho) const {
  if (!jumps_.empty()) return apply(rho);
  if (rho.rows() != h_.rows() || rho.cols() != h_.cols()) {
    throw InvalidArgument("Liouvillian: density matrix dimension mismatch");
  }
  const Matrix hr = h_ * rho;
  Matrix out = -1.0i * (hr - hr.adjoint());
  out.array() += diagonal_kernel_.array().cast<cplx>() * rho.array();
  return out;
}

Matrix lindblad_rhs(const Matrix& rho, const QOperator& h, const NoiseSpec& noise) {
  if (rho.rows() != h.dim() || rho.cols() != h.dim()) {
    throw InvalidArgument("lindblad_rhs: dimension mismatch between state and Hamiltonian");
  }
  return Liouvillian::dephasing(h, noise).apply(rho);
}

// SectorState

void SectorState::validate(double tol) const {
  const Eigen::Index n = n_sites();
  if (block11.rows() != n || block11.cols() != n) throw InvalidArgument("SectorState: block shapes disagree");
  const double trace = block00 + block11.trace().real();
  if (std::abs(trace - 1.0) > tol) throw InvalidArgument("SectorState: trace differs from 1");
  if ((block11 - block11.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw InvalidArgument("SectorState: one-excitation block is not Hermitian");
  }
  // PSD of the (1 + n)-dimensional restricted density matrix.
  Matrix full(n + 1, n + 1);
  full(0, 0) = block00;
  full.block(0, 1, 1, n) = block01.transpose();
  full.block(1, 0, n, 1) = block01.conjugate();
  full.block(1, 1, n, n) = block11;
  Eigen::SelfAdjointEigenSolver<Matrix> es(full, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) throw InvalidArgument("SectorState: state is not positive semidefinite");
}

Matrix SectorState::to_matrix() const {
  const Eigen::Index n = n_sites();
  if (n > kMaxDenseQubits) throw InvalidArgument("SectorState::to_matrix: register too large for dense storage");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix rho = Matrix::Zero(dim, dim);
  rho(0, 0) = block00;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto bj = single_excitation_index(j, n);
    rho(0, bj) = block01(j);
    rho(bj, 0) = std::conj(block01(j));
    for (Eigen::Index i = 0; i < n; ++i) rho(single_excitation_index(i, n), bj) = block11(i, j);
  }
  return rho;
}

SectorState SectorState::from_matrix(const Matrix& rho, double tol) {
  const int n = qubit_count(rho.rows());
  if (n < 1 || rho.rows() != rho.cols()) throw InvalidArgument("SectorState::from_matrix: invalid dimension");
  for (Eigen::Index a = 0; a < rho.rows(); ++a) {
    if (popcount(static_cast<std::size_t>(a)) <= 1) continue;
    if (rho.row(a).cwiseAbs().maxCoeff() > tol || rho.col(a).cwiseAbs().maxCoeff() > tol) {
      throw InvalidArgument("SectorState::from_matrix: state has weight outside the 0 (+) 1 excitation span");
    }
  }
  SectorState s;
  s.block00 = rho(0, 0).real();
  s.block01.resize(n);
  s.block11.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto bj = single_excitation_index(j, n);
    s.block01(j) = rho(0, bj);
    for (Eigen::Index i = 0; i < n; ++i) s.block11(i, j) = rho(single_excitation_index(i, n), bj);
  }
  return s;
}

// Initial states

QDensity initial_transfer_state(const chain::ChainSpec& spec) {
  spec.validate();
  const int n = spec.n_surviving();
  if (n > kMaxDenseQubits) throw InvalidArgument("initial_transfer_state: register too large for dense storage");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Vector psi = Vector::Zero(dim);
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(single_excitation_index(0, n)) = 1.0 / std::sqrt(2.0);
  return QDensity(psi * psi.adjoint());
}

SectorState initial_transfer_sector(const chain::ChainSpec& spec) {
  spec.validate();
  const Eigen::Index n = spec.n_surviving();
  SectorState s;
  s.block00 = 0.5;
  s.block01 = Vector::Zero(n);
  s.block01(0) = 0.5;
  s.block11 = Matrix::Zero(n, n);
  s.block11(0, 0) = 0.5;
  return s;
}

// Evolution

std::vector<double> sample_grid(double t_begin, double t_end, int n_samples) {
  if (n_samples < 2) throw InvalidArgument("sample_grid: need at least two samples");
  if (!(t_end > t_begin)) throw InvalidArgument("sample_grid: t_end must exceed the start time");
  std::vector<double> t(static_cast<std::size_t>(n_samples));
  for (int k = 0; k < n_samples; ++k) t[static_cast<std::size_t>(k)] = t_begin + (t_end - t_begin) * k / (n_samples - 1);
  t.back() = t_end;
  return t;
}

std::vector<double> sample_grid(double t_end, int n_samples) { return sample_grid(0.0, t_end, n_samples); }

Trajectory evolve(const QDensity& rho0, const QOperator& h, const NoiseSpec& noise, double t_end,
                  int n_samples, const EvolveOptions& opts) {
  if (!(t_end > 0.0)) throw InvalidArgument("evolve: t_end must be positive");
  if (rho0.dim() != h.dim()) throw InvalidArgument("evolve: dimension mismatch between state and Hamiltonian");
  const Liouvillian gen = Liouvillian::dephasing(h, noise);
  const auto times = sample_grid(t_end, n_samples);

  Trajectory traj;
  traj.states.reserve(times.size());
  auto rhs = [&gen](double, const Matrix& rho) { return gen.apply_hermitian(rho); };
  auto observe = [&](std::size_t, double t, const Matrix& rho) {
    check_trace(rho.trace().real(), t, opts);
    traj.times_s.push_back(t);
    traj.times_dimensionless.push_back(t * opts.time_unit);
    traj.states.push_back(rho);
  };
  traj.stats = integrate_dopri5(rhs, rho0.matrix(), 0.0, std::span<const double>(times), observe, opts.integrator);
  for (int i = 0; i < rho0.n_qubits(); ++i) traj.site_map.push_back(i);
  return traj;
}

SectorState sector_rhs(const SectorState& s, const Eigen::MatrixXd& hopping, double rate) {
  const Eigen::Index n = s.n_sites();
  if (hopping.rows() != n || hopping.cols() != n) throw InvalidArgument("sector_rhs: hopping matrix dimension mismatch");
  const Matrix h = hopping.cast<cplx>();
  SectorState d;
  d.block00 = 0.0;
  d.block01 = 1.0i * (h.transpose() * s.block01) - 2.0 * rate * s.block01;
  d.block11 = -1.0i * (h * s.block11 - s.block11 * h);
  Matrix off = s.block11;
  off.diagonal().setZero();
  d.block11 -= 4.0 * rate * off;
  return d;
}

SectorTrajectory evolve_sector(const SectorState& rho0, const chain::CouplingGraph& graph,
                               const NoiseSpec& noise, std::span<const double> times, const EvolveOptions& opts) {
  const Eigen::MatrixXd hop = chain::hopping_matrix(graph);
  const Eigen::Index n = hop.rows();
  if (rho0.n_sites() != n) throw InvalidArgument("evolve_sector: state does not match the coupling graph");
  rho0.validate();
  const double gamma = noise.rate();
  const Matrix h = hop.cast<cplx>();

  auto rhs = [&](double, const Vector& v) {
    Vector out(v.size());
    const auto c = v.segment(1, n);
    const auto b = v.segment(1 + n, n * n).reshaped(n, n);
    out(0) = 0.0;
    // c is a row vector: d c / dt = i c h - 2 Gamma c, with h symmetric.
    out.segment(1, n) = 1.0i * (h * c) - 2.0 * gamma * c;
    Matrix db = -1.0i * (h * b - b * h);
    Matrix off = b;
    off.diagonal().setZero();
    db -= 4.0 * gamma * off;
    out.segment(1 + n, n * n) = db.reshaped();
    return out;
  };

  SectorTrajectory traj;
  traj.states.reserve(times.size());
  auto observe = [&](std::size_t, double t, const Vector& v) {
    SectorState s = unpack(v, n);
    check_trace(s.block00 + s.block11.trace().real(), t, opts);
    traj.times_s.push_back(t);
    traj.times_dimensionless.push_back(t * opts.time_unit);
    traj.states.push_back(std::move(s));
  };
  traj.stats = integrate_dopri5(rhs, pack(rho0), times.front(), times, observe,
                                opts.integrator);
  traj.site_map = graph.site_map;
  return traj;
}

SectorTrajectory evolve_sector(const SectorState& rho0, const chain::CouplingGraph& graph,
                               const NoiseSpec& noise, double t_end, int n_samples, const EvolveOptions& opts) {
  if (!(t_end > 0.0)) throw InvalidArgument("evolve_sector: t_end must be positive");
  const auto times = sample_grid(t_end, n_samples);
  return evolve_sector(rho0, graph, noise, std::span<const double>(times), opts);
}

// Observables

std::vector<double> observable_expectation(const Trajectory& traj, const QOperator& op) {
  std::vector<double> out;
  out.reserve(traj.states.size());
  const bool hermitian = op.is_hermitian(1e-10);
  for (const auto& rho : traj.states) {
    if (rho.rows() != op.dim()) throw InvalidArgument("observable_expectation: dimension mismatch");
    const cplx v = (rho * op.matrix()).trace();
    if (hermitian && std::abs(v.imag()) > 1e-8) {
      throw NumericalFailure("observable_expectation: imaginary residue for a Hermitian observable");
    }
    out.push_back(v.real());
  }
  return out;
}

std::vector<double> observable_expectation(const Trajectory& traj, SiteObservable obs) {
  if (traj.states.empty()) return {};
  const int n = qubit_count(traj.states.front().rows());
  using K = SiteObservable::Kind;
  if (obs.kind != K::Identity && obs.kind != K::TotalExcitation && (obs.slot < 0 || obs.slot >= n)) {
    throw InvalidArgument("observable_expectation: site out of range");
  }
  switch (obs.kind) {
    case K::Identity:
      return observable_expectation(traj, QOperator(Matrix::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n)));
    case K::Z:
      return observable_expectation(traj, embed(pauli(Pauli::Z), obs.slot, n));
    case K::Excitation: {
      Matrix number = Matrix::Zero(2, 2);
      number(1, 1) = 1.0;
      return observable_expectation(traj, embed(QOperator(number), obs.slot, n));
    }
    case K::TotalExcitation:
      return observable_expectation(traj, excitation_number(n));
  }
  return {};
}

std::vector<double> observable_expectation(const SectorTrajectory& traj, SiteObservable obs) {
  std::vector<double> out;
  out.reserve(traj.states.size());
  using K = SiteObservable::Kind;
  for (const auto& s : traj.states) {
    const Eigen::Index n = s.n_sites();
    if (obs.kind != K::Identity && obs.kind != K::TotalExcitation && (obs.slot < 0 || obs.slot >= n)) {
      throw InvalidArgument("observable_expectation: site out of range");
    }
    switch (obs.kind) {
      case K::Identity:
        out.push_back(s.block00 + s.block11.trace().real());
        break;
      case K::Z:
        out.push_back(s.block00 + s.block11.trace().real() - 2.0 * s.block11(obs.slot, obs.slot).real());
        break;
      case K::Excitation:
        out.push_back(s.block11(obs.slot, obs.slot).real());
        break;
      case K::TotalExcitation:
        out.push_back(s.block11.trace().real());
        break;
    }
  }
  return out;
}

double default_window_s(const chain::ChainSpec& spec) {
  return 40.0 / spec.kappa_angular() * (spec.m_chain + 2) / 5.0;
}

}  // namespace starnet::lindblad
