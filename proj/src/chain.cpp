#include "starnet/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace starnet::chain {

namespace {

constexpr int kMaxResamplesPerSpacing = 100;

double draw_positive(std::mt19937_64& rng, double mean, double sigma, int& resamples) {
  std::normal_distribution<double> dist(mean, sigma);
  for (int attempt = 0; attempt <= kMaxResamplesPerSpacing; ++attempt) {
    const double s = dist(rng);
    if (s > 0.0) return s;
    ++resamples;
  }
  throw NumericalFailure("build_geometry: could not draw a positive spacing");
}

const char* rule_name(NeighborRule rule) {
  return rule == NeighborRule::SurvivorOrder ? "survivor_order" : "lattice_index";
}

}  // namespace

void ChainSpec::validate() const {
  if (m_chain < 1) throw InvalidArgument("ChainSpec: m_chain must be >= 1");
  if (!(spacing_nm > 0.0) || !std::isfinite(spacing_nm)) throw InvalidArgument("ChainSpec: spacing_nm must be > 0");
  if (!(delta_ratio > 0.0) || delta_ratio > 1.0) throw InvalidArgument("ChainSpec: delta_ratio must lie in (0, 1]");
  if (!(kappa_hz > 0.0) || !std::isfinite(kappa_hz)) throw InvalidArgument("ChainSpec: kappa_hz must be > 0");
  if (disorder && !(disorder->variance_nm2 >= 0.0)) {
    throw InvalidArgument("ChainSpec: disorder variance must be >= 0");
  }
  if (lost_sites.size() > 2) throw InvalidArgument("ChainSpec: at most two lost sites are supported");
  if (!std::is_sorted(lost_sites.begin(), lost_sites.end()) ||
      std::adjacent_find(lost_sites.begin(), lost_sites.end()) != lost_sites.end()) {
    throw InvalidArgument("ChainSpec: lost_sites must be strictly increasing");
  }
  for (int s : lost_sites) {
    if (s < 1 || s > m_chain) throw InvalidArgument("ChainSpec: lost site outside chain range 1..M");
  }
  for (std::size_t k = 1; k < lost_sites.size(); ++k) {
    if (lost_sites[k] - lost_sites[k - 1] == 1) {
      throw PhysicsRejection("ChainSpec: two neighbouring spins lost, the chain is disconnected");
    }
  }
}

double ChainSpec::kappa_angular() const { return 2.0 * std::numbers::pi * kappa_hz; }

double ChainSpec::register_gap_nm() const { return spacing_nm * std::cbrt(1.0 / delta_ratio); }

Geometry build_geometry(const ChainSpec& spec) {
  spec.validate();
  const int m = spec.m_chain;
  Geometry g;
  std::vector<double> gaps(static_cast<std::size_t>(m + 1), spec.spacing_nm);
  gaps.front() = spec.register_gap_nm();
  gaps.back() = spec.register_gap_nm();

  if (spec.disorder && spec.disorder->variance_nm2 > 0.0) {
    const double sigma = std::sqrt(spec.disorder->variance_nm2);
    std::mt19937_64 rng(spec.disorder->seed);
    for (int k = 1; k < m; ++k) gaps[static_cast<std::size_t>(k)] = draw_positive(rng, spec.spacing_nm, sigma, g.resamples);
    if (spec.disorder->include_register_gaps) {
      gaps.front() = draw_positive(rng, spec.register_gap_nm(), sigma, g.resamples);
      gaps.back() = draw_positive(rng, spec.register_gap_nm(), sigma, g.resamples);
    }
  }

  g.positions_nm.resize(static_cast<std::size_t>(m + 2));
  g.positions_nm[0] = 0.0;
  for (int k = 0; k <= m; ++k) {
    g.positions_nm[static_cast<std::size_t>(k + 1)] = g.positions_nm[static_cast<std::size_t>(k)] + gaps[static_cast<std::size_t>(k)];
  }
  return g;
}

double coupling_from_distance(double d_nm, const ChainSpec& spec) {
  if (!(d_nm > 0.0)) throw InvalidArgument("coupling_from_distance: distance must be > 0");
  const double ratio = spec.spacing_nm / d_nm;
  return spec.kappa_angular() * ratio * ratio * ratio;
}

CouplingGraph build_coupling_graph(const ChainSpec& spec, const Geometry& geometry) {
  spec.validate();
  if (static_cast<int>(geometry.positions_nm.size()) != spec.n_sites()) {
    throw InvalidArgument("build_coupling_graph: geometry does not match the chain length");
  }
  CouplingGraph graph;
  for (int s = 0; s < spec.n_sites(); ++s) {
    if (!std::binary_search(spec.lost_sites.begin(), spec.lost_sites.end(), s)) graph.site_map.push_back(s);
  }
  const int reach = spec.include_nnn ? 2 : 1;
  const auto& x = geometry.positions_nm;
  auto add = [&](int a, int b) {
    const double d = std::abs(x[static_cast<std::size_t>(b)] - x[static_cast<std::size_t>(a)]);
    graph.edges.push_back({a, b, coupling_from_distance(d, spec)});
  };

  const int n = static_cast<int>(graph.site_map.size());
  if (spec.neighbor_rule == NeighborRule::SurvivorOrder) {
    for (int k = 0; k < n; ++k) {
      for (int step = 1; step <= reach && k + step < n; ++step) {
        add(graph.site_map[static_cast<std::size_t>(k)], graph.site_map[static_cast<std::size_t>(k + step)]);
      }
    }
  } else {
    for (int a : graph.site_map) {
      for (int step = 1; step <= reach; ++step) {
        const int b = a + step;
        if (std::binary_search(graph.site_map.begin(), graph.site_map.end(), b)) add(a, b);
      }
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end(),
            [](const Edge& l, const Edge& r) { return std::tie(l.i, l.j) < std::tie(r.i, r.j); });

  // Connectivity over surviving sites.
  std::vector<int> parent(static_cast<std::size_t>(spec.n_sites()));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  for (const auto& e : graph.edges) parent[static_cast<std::size_t>(find(e.i))] = find(e.j);
  const int root = find(graph.site_map.front());
  for (int s : graph.site_map) {
    if (find(s) != root) throw PhysicsRejection("coupling graph is disconnected; entanglement cannot be distributed");
  }
  return graph;
}

CouplingGraph build_coupling_graph(const ChainSpec& spec) {
  return build_coupling_graph(spec, build_geometry(spec));
}

Eigen::MatrixXd hopping_matrix(const CouplingGraph& graph) {
  const auto n = static_cast<Eigen::Index>(graph.site_map.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  auto slot = [&](int site) {
    auto it = std::lower_bound(graph.site_map.begin(), graph.site_map.end(), site);
    return static_cast<Eigen::Index>(it - graph.site_map.begin());
  };
  for (const auto& e : graph.edges) {
    const auto a = slot(e.i);
    const auto b = slot(e.j);
    h(a, b) += e.strength;
    h(b, a) += e.strength;
  }
  return h;
}

ChainHamiltonian build_chain_hamiltonian(const CouplingGraph& graph) {
  const int n = static_cast<int>(graph.site_map.size());
  if (n > kMaxDenseQubits) {
    throw InvalidArgument("build_chain_hamiltonian: register too large for dense storage; use the sector path");
  }
  // Flip-flop terms only move one excitation between two sites, so fill the
  // matrix directly from the hopping amplitudes.
  const Eigen::MatrixXd hop = hopping_matrix(graph);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix h = Matrix::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const auto c = static_cast<std::size_t>(col);
    for (int a = 0; a < n; ++a) {
      const std::size_t bit_a = std::size_t{1} << (n - 1 - a);
      if (!(c & bit_a)) continue;
      for (int b = 0; b < n; ++b) {
        const std::size_t bit_b = std::size_t{1} << (n - 1 - b);
        if (a == b || (c & bit_b) || hop(a, b) == 0.0) continue;
        const auto row = static_cast<Eigen::Index>((c & ~bit_a) | bit_b);
        h(row, col) += hop(b, a);
      }
    }
  }
  return {QOperator(std::move(h)), graph.site_map};
}

ChainHamiltonian build_chain_hamiltonian(const ChainSpec& spec) {
  return build_chain_hamiltonian(build_coupling_graph(spec));
}

bool validate_star_geometry(int n_outer, int m_chain) {
  if (n_outer < 1 || m_chain < 1) throw InvalidArgument("validate_star_geometry: N and M must be >= 1");
  const double bound = 1.0 / (m_chain + 20.0 * std::sqrt(10.0) / 3.0);
  return std::sin(std::numbers::pi / (2.0 * n_outer)) > bound;
}

std::vector<std::vector<int>> loss_configurations(int m_chain, int n_lost) {
  if (n_lost != 1 && n_lost != 2) throw InvalidArgument("loss_configurations: n_lost must be 1 or 2");
  std::vector<std::vector<int>> out;
  for (int a = 1; a <= m_chain; ++a) {
    if (n_lost == 1) {
      out.push_back({a});
      continue;
    }
    for (int b = a + 2; b <= m_chain; ++b) out.push_back({a, b});
  }
  return out;
}

nlohmann::json to_json(const ChainSpec& spec) {
  nlohmann::json j;
  j["m_chain"] = spec.m_chain;
  j["spacing_nm"] = spec.spacing_nm;
  j["delta_ratio"] = spec.delta_ratio;
  j["kappa_hz"] = spec.kappa_hz;
  j["include_nnn"] = spec.include_nnn;
  j["lost_sites"] = spec.lost_sites;
  j["neighbor_rule"] = rule_name(spec.neighbor_rule);
  if (spec.disorder) {
    j["disorder"] = {{"variance_nm2", spec.disorder->variance_nm2},
                     {"seed", spec.disorder->seed},
                     {"include_register_gaps", spec.disorder->include_register_gaps}};
  } else {
    j["disorder"] = nullptr;
  }
  return j;
}

nlohmann::json to_json(const Geometry& geometry, const CouplingGraph& graph) {
  nlohmann::json j;
  j["positions_nm"] = geometry.positions_nm;
  j["resamples"] = geometry.resamples;
  j["surviving_sites"] = graph.site_map;
  auto& edges = j["edges"] = nlohmann::json::array();
  for (const auto& e : graph.edges) edges.push_back({{"i", e.i}, {"j", e.j}, {"strength_rad_s", e.strength}});
  return j;
}

}  // namespace starnet::chain
