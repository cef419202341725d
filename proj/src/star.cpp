#include "starnet/star.hpp"

#include <algorithm>
#include <cmath>

namespace starnet::star {

namespace {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Outer-register ket |N/2, m> lifted to the central-spin register with the
/// central spin in `central`.
Vector with_central(int central, const Vector& outer) {
  const Eigen::Index d = outer.size();
  Vector v = Vector::Zero(2 * d);
  v.segment(central * d, d) = outer;
  return v;
}

}  // namespace

void StarSpec::validate() const {
  if (n_outer < 1) throw InvalidArgument("StarSpec: n_outer must be >= 1");
  if (n_outer + 1 > kMaxDenseQubits) throw InvalidArgument("StarSpec: too many outer spins for dense storage");
  if (!(coupling >= 0.0) || !std::isfinite(coupling)) {
    throw InvalidArgument("StarSpec: coupling must be finite and non-negative");
  }
}

CollectiveOperators collective_operators(int n) {
  if (n < 1 || n > kMaxDenseQubits) throw InvalidArgument("collective_operators: size out of range");
  const Eigen::Index dim = Eigen::Index{1} << n;
  // Minus = |1><0| adds an excitation under the library basis convention.
  const QOperator add = pauli(Pauli::Minus);
  const QOperator remove = pauli(Pauli::Plus);
  Matrix jp = Matrix::Zero(dim, dim);
  Matrix jm = Matrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    jp += embed(add, i, n).matrix();
    jm += embed(remove, i, n).matrix();
  }
  Matrix jz = excitation_number(n).matrix() - 0.5 * n * Matrix::Identity(dim, dim);
  Matrix j2 = 0.5 * (jp * jm + jm * jp) + jz * jz;
  return {QOperator(std::move(jz)), QOperator(std::move(jp)), QOperator(std::move(jm)),
          QOperator(std::move(j2))};
}

QOperator build_star_hamiltonian(const StarSpec& spec, Normalization norm) {
  spec.validate();
  const int n = spec.n_outer + 1;
  const QOperator sp0 = embed(pauli(Pauli::Plus), 0, n);
  const QOperator sm0 = embed(pauli(Pauli::Minus), 0, n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix h = Matrix::Zero(dim, dim);
  for (int i = 1; i < n; ++i) {
    h += (sp0 * embed(pauli(Pauli::Minus), i, n)).matrix();
    h += (sm0 * embed(pauli(Pauli::Plus), i, n)).matrix();
  }
  const double scale = norm == Normalization::Cartesian ? 2.0 : 1.0;
  return QOperator(spec.coupling * scale * h);
}

long long multiplet_count(int n, double j) {
  const double k = 0.5 * n - j;
  const long long ki = std::llround(k);
  if (std::abs(k - static_cast<double>(ki)) > 1e-9 || ki < 0) return 0;
  return binomial(n, static_cast<int>(ki)) - binomial(n, static_cast<int>(ki) - 1);
}

std::vector<SpectrumEntry> star_spectrum_analytic(const StarSpec& spec) {
  spec.validate();
  const int n = spec.n_outer;
  std::vector<SpectrumEntry> out;
  for (int twice_j = n; twice_j >= 0; twice_j -= 2) {
    const double j = 0.5 * twice_j;
    const auto count = static_cast<int>(multiplet_count(n, j));
    if (count == 0) continue;
    out.push_back({j, -j, 0.0, 2 * count});
    for (int twice_m = -twice_j + 2; twice_m <= twice_j; twice_m += 2) {
      const double m = 0.5 * twice_m;
      const double e = spec.coupling * std::sqrt((j + m) * (j - m + 1.0));
      out.push_back({j, m, -e, count});
      out.push_back({j, m, e, count});
    }
  }
  return out;
}

std::vector<double> expand_spectrum(const std::vector<SpectrumEntry>& entries) {
  std::vector<double> values;
  for (const auto& e : entries) values.insert(values.end(), static_cast<std::size_t>(e.multiplicity), e.energy);
  std::sort(values.begin(), values.end());
  return values;
}

QPureState dicke_state(int n, int k) {
  if (n < 1 || n > kMaxDenseQubits) throw InvalidArgument("dicke_state: size out of range");
  if (k < 0 || k > n) throw InvalidArgument("dicke_state: excitation count out of range");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Vector v = Vector::Zero(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(binomial(n, k)));
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (popcount(static_cast<std::size_t>(i)) == k) v(i) = amp;
  }
  return QPureState(std::move(v));
}

std::vector<QPureState> ground_states(const StarSpec& spec) {
  spec.validate();
  if (!(spec.coupling > 0.0)) throw InvalidArgument("ground_states: coupling must be positive");
  const int n = spec.n_outer;
  // |N/2, m> is the Dicke state with m + N/2 excitations; the ground branch
  // pairs |0>|m> with |1>|m-1> at relative sign -1.
  auto branch = [n](int excitations) {
    const Vector upper = dicke_state(n, excitations).amplitudes();
    const Vector lower = dicke_state(n, excitations - 1).amplitudes();
    Vector v = (with_central(0, upper) - with_central(1, lower)) / std::sqrt(2.0);
    return QPureState(std::move(v));
  };
  if (n % 2 == 1) return {branch((n + 1) / 2)};
  return {branch(n / 2), branch(n / 2 + 1)};
}

WStateOutcome w_state_protocol(const QPureState& star_state, int central_outcome) {
  if (central_outcome != 0 && central_outcome != 1) {
    throw InvalidArgument("w_state_protocol: outcome must be 0 or 1");
  }
  if (star_state.n_qubits() < 2) throw InvalidArgument("w_state_protocol: need a central and an outer spin");
  const Eigen::Index half = star_state.dim() / 2;
  Vector outer = star_state.amplitudes().segment(central_outcome * half, half);
  const double p = outer.squaredNorm();
  if (p <= kDefaultTolerances.measure_zero_probability) {
    throw PhysicsRejection("w_state_protocol: impossible measurement outcome");
  }
  outer /= std::sqrt(p);
  return {p, QPureState(std::move(outer))};
}

WStateOutcome w_state_protocol(const StarSpec& spec, int central_outcome) {
  spec.validate();
  if (spec.n_outer % 2 == 0) {
    throw InvalidArgument("w_state_protocol: degenerate ground state for even N; specify manifold vector");
  }
  return w_state_protocol(ground_states(spec).front(), central_outcome);
}

}  // namespace starnet::star
