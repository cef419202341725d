#include <doctest.h>

#include <random>

#include "starnet/qops.hpp"
#include "starnet/star.hpp"
#include "support.hpp"

using namespace starnet;
using starnet::testing::max_abs;

namespace {

Matrix m2(cplx a, cplx b, cplx c, cplx d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector bell_phi_plus() {
  Vector v = Vector::Zero(4);
  v[0] = v[3] = 1.0 / std::sqrt(2.0);
  return v;
}

}  // namespace

TEST_SUITE("qops") {
  TEST_CASE("pauli matrices") {
    const cplx i(0, 1);
    CHECK(max_abs(pauli(Pauli::X).matrix() - m2(0, 1, 1, 0)) == 0.0);
    CHECK(max_abs(pauli(Pauli::Y).matrix() - m2(0, -i, i, 0)) == 0.0);
    CHECK(max_abs(pauli(Pauli::Z).matrix() - m2(1, 0, 0, -1)) == 0.0);
    CHECK(max_abs(pauli(Pauli::Plus).matrix() - m2(0, 1, 0, 0)) == 0.0);
    CHECK(max_abs(pauli(Pauli::Minus).matrix() - m2(0, 0, 1, 0)) == 0.0);
    CHECK(max_abs(pauli(Pauli::Identity).matrix() - Matrix::Identity(2, 2)) == 0.0);
    CHECK(max_abs((pauli(Pauli::Plus) + pauli(Pauli::Minus)).matrix() - pauli(Pauli::X).matrix()) == 0.0);
  }

  TEST_CASE("z expectation on |0> is +1") {
    const auto rho = basis_state({0}).density();
    CHECK((pauli(Pauli::Z).matrix() * rho.matrix()).trace().real() == doctest::Approx(1.0));
  }

  TEST_CASE("embed") {
    const auto z = pauli(Pauli::Z);
    const auto x = pauli(Pauli::X);
    CHECK(max_abs(embed(z, 0, 1).matrix() - z.matrix()) == 0.0);
    CHECK(max_abs(embed(z, 0, 2).matrix() - kron(z, pauli(Pauli::Identity)).matrix()) == 0.0);

    // dense 4x4 oracle for X (x) X
    Matrix xx = Matrix::Zero(4, 4);
    xx(0, 3) = xx(1, 2) = xx(2, 1) = xx(3, 0) = 1.0;
    CHECK(max_abs((embed(x, 0, 2) * embed(x, 1, 2)).matrix() - xx) == 0.0);

    CHECK_THROWS_AS(embed(z, 2, 2), InvalidArgument);
    CHECK_THROWS_AS(embed(z, -1, 2), InvalidArgument);
    CHECK_THROWS_AS(embed(QOperator(Matrix::Identity(4, 4)), 0, 2), InvalidArgument);
  }

  TEST_CASE("site 0 is the most significant bit") {
    const auto s = basis_state({1, 0, 0});
    CHECK(std::abs(s.amplitudes()[4] - cplx(1.0)) == 0.0);
  }

  TEST_CASE("embeddings on distinct sites commute") {
    std::mt19937_64 rng(11);
    for (int n = 2; n <= 4; ++n) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          const QOperator a(starnet::testing::random_hermitian(2, rng));
          const QOperator b(starnet::testing::random_unitary(2, rng));
          const auto ea = embed(a, i, n);
          const auto eb = embed(b, j, n);
          CHECK(max_abs((ea * eb - eb * ea).matrix()) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("partial trace examples") {
    const auto rho00 = basis_state({0, 0}).density();
    const auto r = partial_trace(rho00, {0});
    CHECK(max_abs(r.matrix() - basis_state({0}).density().matrix()) < 1e-15);

    const QPureState phi(bell_phi_plus());
    const auto marg = partial_trace(phi.density(), {0});
    CHECK(max_abs(marg.matrix() - Matrix::Identity(2, 2) / 2.0) < 1e-15);
  }

  TEST_CASE("partial trace keeps sites in increasing order") {
    // |0> (x) |1> (x) |+>, keep {2, 0} -> |0><0| (x) |+><+|
    Vector v = Vector::Zero(8);
    v[2] = v[3] = 1.0 / std::sqrt(2.0);
    const auto r = partial_trace(QPureState(v).density(), {2, 0});
    Vector expect = Vector::Zero(4);
    expect[0] = expect[1] = 1.0 / std::sqrt(2.0);
    CHECK(max_abs(r.matrix() - starnet::testing::projector(expect)) < 1e-15);
  }

  TEST_CASE("partial trace over all sites is the identity map") {
    std::mt19937_64 rng(3);
    const QDensity rho(starnet::testing::random_density(8, rng));
    CHECK(max_abs(partial_trace(rho, {0, 1, 2}).matrix() - rho.matrix()) < 1e-14);
  }

  TEST_CASE("partial trace preserves trace and hermiticity") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
      const QDensity rho(starnet::testing::random_density(16, rng));
      for (const auto& keep : std::vector<std::vector<int>>{{0}, {3}, {1, 2}, {0, 3}, {0, 1, 3}}) {
        const auto r = partial_trace(rho, keep);
        CHECK(std::abs(r.trace() - cplx(1.0)) < 1e-12);
        CHECK(max_abs(r.matrix() - r.matrix().adjoint()) < 1e-14);
      }
    }
  }

  TEST_CASE("partial trace rejects bad keep sets") {
    const auto rho = basis_state({0, 0}).density();
    CHECK_THROWS_AS(partial_trace(rho, {}), InvalidArgument);
    CHECK_THROWS_AS(partial_trace(rho, {0, 0}), InvalidArgument);
    CHECK_THROWS_AS(partial_trace(rho, {2}), InvalidArgument);
  }

  TEST_CASE("eig_hermitian") {
    const auto ez = eig_hermitian(pauli(Pauli::Z));
    CHECK(ez.values[0] == doctest::Approx(-1.0));
    CHECK(ez.values[1] == doctest::Approx(1.0));
    const auto ex = eig_hermitian(pauli(Pauli::X));
    CHECK(ex.values[0] == doctest::Approx(-1.0));
    CHECK(ex.values[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(eig_hermitian(pauli(Pauli::Plus)), InvalidArgument);

    const auto es = eig_hermitian(star::build_star_hamiltonian({3, 1.0}));
    const std::vector<double> allowed = {0.0, 1.0, -1.0, std::sqrt(3.0), -std::sqrt(3.0), 2.0, -2.0};
    for (Eigen::Index k = 0; k < es.values.size(); ++k) {
      double best = 1e9;
      for (double a : allowed) best = std::min(best, std::abs(es.values[k] - a));
      CHECK(best < 1e-9);
    }
  }

  TEST_CASE("eigenvalues are invariant under unitary conjugation") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix h = starnet::testing::random_hermitian(8, rng);
      const Matrix u = starnet::testing::random_unitary(8, rng);
      const auto a = eig_hermitian(QOperator(h)).values;
      const auto b = eig_hermitian(Matrix(u * h * u.adjoint()), 1e-10).values;
      CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("eigenvectors are unitary") {
    std::mt19937_64 rng(19);
    const auto es = eig_hermitian(QOperator(starnet::testing::random_hermitian(16, rng)));
    CHECK(max_abs(es.vectors.adjoint() * es.vectors - Matrix::Identity(16, 16)) < 1e-12);
  }

  TEST_CASE("projective measurement") {
    const auto r0 = project_measure(basis_state({0}).density(), 0, 0);
    CHECK(r0.probability == doctest::Approx(1.0));
    REQUIRE(r0.possible());
    CHECK(max_abs(r0.post_state->matrix() - basis_state({0}).density().matrix()) < 1e-15);

    const auto r1 = project_measure(basis_state({0}).density(), 0, 1);
    CHECK(r1.probability == doctest::Approx(0.0));
    CHECK_FALSE(r1.possible());

    const auto phi = QPureState(bell_phi_plus()).density();
    const auto rb = project_measure(phi, 0, 1);
    CHECK(rb.probability == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(rb.possible());
    CHECK(max_abs(rb.post_state->matrix() - basis_state({1, 1}).density().matrix()) < 1e-14);
  }

  TEST_CASE("measurement probabilities sum to one") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
      const QDensity rho(starnet::testing::random_density(8, rng));
      for (int site = 0; site < 3; ++site) {
        const double p = project_measure(rho, site, 0).probability + project_measure(rho, site, 1).probability;
        CHECK(std::abs(p - 1.0) < 1e-10);
      }
    }
  }

  TEST_CASE("density validation") {
    CHECK_THROWS_AS(QDensity(Matrix::Identity(3, 3) / 3.0), InvalidArgument);
    CHECK_THROWS_AS(QDensity(Matrix::Identity(2, 2)), InvalidArgument);
    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(QDensity{neg}, InvalidArgument);
    CHECK_THROWS_AS(QDensity(pauli(Pauli::Plus).matrix() + Matrix::Identity(2, 2) / 2.0), InvalidArgument);
    CHECK_THROWS_AS(QPureState(Vector::Ones(2)), InvalidArgument);
  }

  TEST_CASE("excitation number counts |1> levels") {
    const auto n = excitation_number(3);
    for (Eigen::Index k = 0; k < 8; ++k) {
      CHECK(n.matrix()(k, k).real() == doctest::Approx(popcount(static_cast<std::size_t>(k))));
    }
  }
}
