#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "starnet/experiments.hpp"
#include "support.hpp"

using namespace starnet;
using namespace starnet::experiments;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGamma = 2.0 * kPi * 28.024951e9;

std::vector<GridPoint> planted(double c, double a, double b) {
  std::vector<GridPoint> pts;
  for (int m : {3, 5, 7, 9, 11}) {
    for (double t2 : {0.5e-3, 1e-3, 2e-3}) pts.push_back({m, t2, c * std::exp(-a * std::pow(1.0 / t2, b) * m)});
  }
  return pts;
}

std::vector<double> grid(double t_end, int n) { return lindblad::sample_grid(t_end, n); }

std::vector<double> scaled_cos(const std::vector<double>& t, double amp, double w, double phase = 0.0) {
  std::vector<double> v;
  for (double x : t) v.push_back(amp * std::cos(w * x + phase));
  return v;
}

// E_F(tau) with the |+> excitation injected at the last register instead of the first.
std::vector<double> reversed_injection_curve(const chain::ChainSpec& spec, const lindblad::NoiseSpec& noise) {
  const auto graph = chain::build_coupling_graph(spec);
  auto s = lindblad::initial_transfer_sector(spec);
  const Eigen::Index last = s.n_sites() - 1;
  s.block01.setZero();
  s.block11.setZero();
  s.block01(last) = 0.5;
  s.block11(last, last) = 0.5;
  const auto traj = lindblad::evolve_sector(s, graph, noise, lindblad::default_window_s(spec), 2001);
  std::vector<double> out;
  for (const auto& st : traj.states) out.push_back(entangle::eof(QDensity(entangle::register_pair_matrix(st))));
  return out;
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("parallel_for is order independent and rethrows the lowest failure") {
    std::vector<double> a(200), b(200);
    parallel_for(a.size(), 1, [&](std::size_t i) { a[i] = std::sin(static_cast<double>(i)); });
    parallel_for(b.size(), 4, [&](std::size_t i) { b[i] = std::sin(static_cast<double>(i)); });
    CHECK(a == b);
    try {
      parallel_for(50, 4, [](std::size_t i) {
        if (i == 17 || i == 31) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "17");
    }
  }

  TEST_CASE("length sweep") {
    const auto rows = sweep_length({3, 5, 7, 9, 11}, lindblad::NoiseSpec{1e-3});
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].result.e_m < rows[i - 1].result.e_m);
    chain::ChainSpec s3;
    s3.m_chain = 3;
    CHECK(rows[0].result.e_m == entangle::max_entanglement_scan(s3, lindblad::NoiseSpec{1e-3}).e_m);
  }

  TEST_CASE("noise lowers E_m") {
    const auto clean = sweep_length({5}, lindblad::NoiseSpec::noiseless());
    const auto noisy = sweep_length({5}, lindblad::NoiseSpec{1e-3});
    CHECK(clean[0].result.e_m > noisy[0].result.e_m);
  }

  TEST_CASE("sweeps reject star geometries that violate the inequality") {
    CampaignOptions opts;
    opts.n_outer = 38;
    CHECK_THROWS_AS(sweep_length({3, 38}, lindblad::NoiseSpec{}, opts), PhysicsRejection);
  }

  TEST_CASE("fit recovers planted parameters") {
    const auto f = fit_exponential(planted(1.0, 2e-4, 1.0));
    CHECK(std::abs(f.a - 2e-4) / 2e-4 < 1e-4);
    CHECK(std::abs(f.b - 1.0) < 1e-4);
    CHECK(std::abs(f.prefactor - 1.0) < 1e-4);
    CHECK(f.residual < 1e-6);
    CHECK(f.n_used == 15);

    const auto g = fit_exponential(planted(0.3, 0.02, 0.45));
    CHECK(std::abs(g.a - 0.02) / 0.02 < 1e-4);
    CHECK(std::abs(g.b - 0.45) / 0.45 < 1e-4);
  }

  TEST_CASE("fit widens the search bounds when the optimum pins one") {
    const auto f = fit_exponential(planted(1.0, 2e-12, 3.5));
    CHECK(f.bounds_widened);
    CHECK(std::abs(f.b - 3.5) / 3.5 < 1e-4);
  }

  TEST_CASE("fit is independent of row order") {
    auto pts = planted(0.8, 3e-3, 0.6);
    std::mt19937_64 rng(5);
    for (auto& p : pts) p.e_m *= 1.0 + 0.05 * std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto a = fit_exponential(pts);
    std::shuffle(pts.begin(), pts.end(), rng);
    const auto b = fit_exponential(pts);
    CHECK(a.a == b.a);
    CHECK(a.b == b.b);
    CHECK(a.prefactor == b.prefactor);
    CHECK(a.residual == b.residual);
  }

  TEST_CASE("fit exclusions and rejections") {
    auto pts = planted(1.0, 2e-4, 1.0);
    pts.push_back({13, 1e-3, 0.0});
    pts.push_back({13, std::numeric_limits<double>::infinity(), 0.5});
    const auto f = fit_exponential(pts);
    CHECK(f.n_excluded == 2);
    CHECK(std::abs(f.b - 1.0) < 1e-4);

    std::vector<GridPoint> few(pts.begin(), pts.begin() + 5);
    CHECK_THROWS_AS(fit_exponential(few), InvalidArgument);
    std::vector<GridPoint> two_t2;
    for (const auto& p : planted(1.0, 2e-4, 1.0)) {
      if (p.t2_s != 2e-3) two_t2.push_back(p);
    }
    CHECK_THROWS_AS(fit_exponential(two_t2), InvalidArgument);
  }

  TEST_CASE("fit on the simulated grid has positive parameters") {
    const auto rows = sweep_grid({3, 5, 7, 9, 11}, {0.5e-3, 1e-3, 2e-3});
    std::vector<GridPoint> pts;
    for (const auto& r : rows) pts.push_back({r.m, r.t2_s, r.result.e_m});
    const auto f = fit_exponential(pts);
    CHECK(f.a > 0.0);
    CHECK(f.b > 0.0);
    CHECK(f.prefactor > 0.0);

    // E_m is nonincreasing in M and in the dephasing rate across the grid.
    auto em = [&](int m, double t2) {
      for (const auto& r : rows) {
        if (r.m == m && r.t2_s == t2) return r.result.e_m;
      }
      return -1.0;
    };
    for (double t2 : {0.5e-3, 1e-3, 2e-3}) {
      for (int m : {5, 7, 9, 11}) CHECK(em(m, t2) <= em(m - 2, t2));
    }
    for (int m : {3, 5, 7, 9, 11}) {
      CHECK(em(m, 0.5e-3) <= em(m, 1e-3));
      CHECK(em(m, 1e-3) <= em(m, 2e-3));
    }
  }

  TEST_CASE("disorder with zero variance reproduces the clean chain") {
    const auto clean = sweep_length({3, 5}, lindblad::NoiseSpec{1e-3});
    const auto rows = disorder_monte_carlo({3, 5}, 4, 0.0, lindblad::NoiseSpec{1e-3}, 7);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].mean == doctest::Approx(clean[i].result.e_m).epsilon(1e-12));
      CHECK(rows[i].stddev == doctest::Approx(0.0).epsilon(1e-14));
    }
  }

  TEST_CASE("disorder is deterministic under a fixed seed") {
    CampaignOptions serial;
    serial.jobs = 1;
    CampaignOptions pooled;
    pooled.jobs = 3;
    const auto a = disorder_monte_carlo({3}, 12, 0.25, lindblad::NoiseSpec{1e-3}, 42, serial);
    const auto b = disorder_monte_carlo({3}, 12, 0.25, lindblad::NoiseSpec{1e-3}, 42, pooled);
    CHECK(a[0].values == b[0].values);
    const auto c = disorder_monte_carlo({3}, 12, 0.25, lindblad::NoiseSpec{1e-3}, 43, serial);
    CHECK(a[0].values != c[0].values);
  }

  TEST_CASE("disorder mean is continuous as the variance vanishes") {
    const double clean = sweep_length({3}, lindblad::NoiseSpec{1e-3})[0].result.e_m;
    double prev = std::numeric_limits<double>::infinity();
    for (double var : {0.25, 0.01, 0.0}) {
      const auto rows = disorder_monte_carlo({3}, 20, var, lindblad::NoiseSpec{1e-3}, 9);
      const double dev = std::abs(rows[0].mean - clean);
      CHECK(dev <= prev);
      prev = dev;
    }
    CHECK(prev < 1e-12);
  }

  TEST_CASE("one-loss report for M=5") {
    const auto rep = loss_report(5, 1, lindblad::NoiseSpec{1e-3});
    REQUIRE(rep.configurations.size() == 5);
    REQUIRE(rep.results.size() == 5);
    double sum = 0.0;
    for (const auto& r : rep.results) sum += r.e_m;
    CHECK(std::abs(rep.expectation - sum / 5.0) < 1e-12);
    // positions I, II, III give distinct curves
    CHECK(std::abs(rep.results[0].e_m - rep.results[1].e_m) > 1e-3);
    CHECK(std::abs(rep.results[1].e_m - rep.results[2].e_m) > 1e-3);
  }

  TEST_CASE("mirror-image loss equals the reversed injection") {
    // The initial state |+>|0..0> breaks the mirror symmetry of the chain, so
    // lost {s} and lost {M+1-s} are related by swapping which register
    // receives the excitation.
    const lindblad::NoiseSpec noise{1e-3};
    for (const auto& [s, mirror] : {std::pair{1, 5}, std::pair{2, 4}}) {
      chain::ChainSpec spec;
      spec.m_chain = 5;
      spec.lost_sites = {mirror};
      const auto forward = entangle::max_entanglement_scan(spec, noise, {.refine = false});
      spec.lost_sites = {s};
      const auto reversed = reversed_injection_curve(spec, noise);
      REQUIRE(forward.e_f.size() == reversed.size());
      for (std::size_t k = 0; k < reversed.size(); ++k) CHECK(std::abs(forward.e_f[k] - reversed[k]) < 1e-6);
    }
    const auto rep = loss_report(5, 1, noise);
    CHECK(std::abs(rep.results[0].e_m - rep.results[4].e_m) > 1e-3);
  }

  TEST_CASE("two-end loss is the best M=5 two-loss configuration") {
    const auto rep = loss_report(5, 2, lindblad::NoiseSpec{1e-3});
    REQUIRE(rep.configurations.size() == 6);
    std::size_t best = 0;
    for (std::size_t i = 1; i < rep.results.size(); ++i) {
      if (rep.results[i].e_m > rep.results[best].e_m) best = i;
    }
    CHECK(rep.configurations[best] == std::vector<int>{1, 5});
  }

  TEST_CASE("empty two-loss report") {
    const auto rep = loss_report(2, 2, lindblad::NoiseSpec{1e-3});
    CHECK(rep.empty());
    CHECK(rep.results.empty());
    CHECK(rep.expectation == 0.0);
  }

  TEST_CASE("odd chains are more robust against spin loss") {
    std::vector<double> one, two;
    for (int m = 3; m <= 8; ++m) {
      const auto study = loss_study(m, lindblad::NoiseSpec{1e-3});
      one.push_back(study.one.expectation);
      two.push_back(study.two.expectation);
    }
    // index i <-> M = i + 3; odd M at i = 2 (M=5) and i = 4 (M=7)
    for (const auto* e : {&one, &two}) {
      for (std::size_t i : {2u, 4u}) CHECK((*e)[i] > 0.5 * ((*e)[i - 1] + (*e)[i + 1]));
    }
  }

  TEST_CASE("ideal-pair coherence is an exact cosine") {
    GradientSpec g;
    g.b0_tesla = 0.01;
    g.omega0 = 2.0 * kPi * 2.87e9;
    g.gx = 10.0;
    g.gy = 5.0;
    g.gamma = kGamma;
    const double w = kGamma * 10.0 * 50e-9;
    g.times = grid(6.0 * kPi / w, 601);
    g.times.push_back(kPi / w);
    std::sort(g.times.begin(), g.times.end());
    const auto c = gradient_coherence(ideal_pair(), g, {0, 0}, {50, 0});
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(c[k] - std::cos(w * g.times[k])) < 1e-10);
    CHECK(c.front() == doctest::Approx(1.0));
    const auto at_pi = std::find(g.times.begin(), g.times.end(), kPi / w) - g.times.begin();
    CHECK(c[static_cast<std::size_t>(at_pi)] == doctest::Approx(-1.0).epsilon(1e-10));

    const auto cy = gradient_coherence(ideal_pair(), g, {0, 0}, {0, 50});
    const double wy = kGamma * 5.0 * 50e-9;
    for (std::size_t k = 0; k < cy.size(); ++k) CHECK(std::abs(cy[k] - std::cos(wy * g.times[k])) < 1e-10);

    CHECK_THROWS_AS(gradient_coherence(ideal_pair(), g, {3, 4}, {3, 4}), InvalidArgument);
  }

  TEST_CASE("transition frequency follows the linear field") {
    GradientSpec g;
    g.b0_tesla = 0.02;
    g.gx = 3.0;
    g.gy = -1.0;
    g.omega0 = 1e10;
    const double expect = 1e10 + g.gamma * (0.02 + 3.0 * 100e-9 - 1.0 * 20e-9);
    CHECK(transition_frequency(g, {100, 20}) == doctest::Approx(expect).epsilon(1e-15));
  }

  TEST_CASE("gradient recovery") {
    const double d = 50.0;
    const double w = kGamma * 10.0 * d * 1e-9;
    const auto t = grid(8.0 * kPi / w, 401);
    const auto e = estimate_gradient(t, scaled_cos(t, 1.0, w), kGamma, d);
    CHECK(std::abs(e.gradient - 10.0) / 10.0 < 1e-6);
    CHECK(e.amplitude == doctest::Approx(1.0).epsilon(1e-9));

    const auto damped = estimate_gradient(t, scaled_cos(t, 0.4, w, 0.3), kGamma, d);
    CHECK(std::abs(damped.gradient - 10.0) / 10.0 < 1e-3);
    CHECK(damped.amplitude == doctest::Approx(0.4).epsilon(1e-6));

    const auto both = estimate_gradient_2d(t, scaled_cos(t, 1.0, w), scaled_cos(t, 1.0, w / 2.0), kGamma, d);
    CHECK(std::abs(both.x.gradient - 10.0) / 10.0 < 1e-6);
    CHECK(std::abs(both.y.gradient - 5.0) / 5.0 < 1e-6);
  }

  TEST_CASE("gradient estimation failures") {
    const double w = kGamma * 10.0 * 50e-9;
    const auto t = grid(8.0 * kPi / w, 401);
    CHECK_THROWS_AS(estimate_gradient(t, scaled_cos(t, 0.01, w), kGamma, 50.0), EstimationFailure);
    const auto short_t = grid(8.0 * kPi / w, 7);
    CHECK_THROWS_AS(estimate_gradient(short_t, scaled_cos(short_t, 1.0, w), kGamma, 50.0), EstimationFailure);
    const auto narrow = grid(0.5 * kPi / w, 101);
    CHECK_THROWS_AS(estimate_gradient(narrow, scaled_cos(narrow, 1.0, w), kGamma, 50.0), EstimationFailure);
    CHECK_THROWS_AS(estimate_gradient(t, std::vector<double>(3), kGamma, 50.0), InvalidArgument);
  }

  TEST_CASE("noisy pairs from longer chains oscillate less") {
    const auto p3 = distributed_pair(3, lindblad::NoiseSpec{1e-3});
    const auto p7 = distributed_pair(7, lindblad::NoiseSpec{1e-3});
    GradientSpec g;
    g.gx = 10.0;
    const double w = g.gamma * 10.0 * 50e-9;
    g.times = grid(8.0 * kPi / w, 401);
    const auto a3 = estimate_gradient(g.times, gradient_coherence(p3, g, {0, 0}, {50, 0}), g.gamma, 50.0);
    const auto a7 = estimate_gradient(g.times, gradient_coherence(p7, g, {0, 0}, {50, 0}), g.gamma, 50.0);
    CHECK(a7.amplitude < a3.amplitude);
    CHECK(std::abs(a3.gradient - 10.0) / 10.0 < 1e-6);
    CHECK(std::abs(a7.gradient - 10.0) / 10.0 < 1e-6);
  }
}
