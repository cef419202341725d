#pragma once

// Register-chain-register geometry and its flip-flop Hamiltonian.
//
// Sites are indexed on the original lattice: register 0, chain spins 1..M,
// register M+1. Lost chain spins are removed from the Hilbert space; the
// surviving sites keep their original labels in `site_map`.

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "starnet/qops.hpp"

namespace starnet::chain {

/// How nearest and second-nearest neighbours are chosen once sites are lost.
enum class NeighborRule {
  /// Consecutive surviving sites are nearest neighbours, surviving sites two
  /// apart in that order are second-nearest.
  SurvivorOrder,
  /// Pairs whose original lattice index differs by 1 or 2.
  LatticeIndex,
};

struct DisorderSpec {
  double variance_nm2 = 0.25;
  std::uint64_t seed = 0;
  bool include_register_gaps = false;
};

struct ChainSpec {
  int m_chain = 3;
  double spacing_nm = 10.0;
  double delta_ratio = 0.9;
  double kappa_hz = 26e3;
  bool include_nnn = true;
  std::vector<int> lost_sites;
  std::optional<DisorderSpec> disorder;
  NeighborRule neighbor_rule = NeighborRule::SurvivorOrder;

  /// Throws InvalidArgument for malformed fields and PhysicsRejection for
  /// loss patterns that cut the chain (two adjacent lost spins).
  void validate() const;

  int n_sites() const { return m_chain + 2; }
  int n_surviving() const { return n_sites() - static_cast<int>(lost_sites.size()); }
  /// Chain coupling kappa as an angular frequency, rad/s.
  double kappa_angular() const;
  /// Distance between a register and the first chain spin with no disorder.
  double register_gap_nm() const;
};

struct Geometry {
  std::vector<double> positions_nm;  // all M+2 lattice sites, lost ones included
  int resamples = 0;                 // non-positive spacings redrawn
};

struct Edge {
  int i = 0;  // original site labels, i < j
  int j = 0;
  double strength = 0.0;  // rad/s
};

struct CouplingGraph {
  std::vector<int> site_map;  // surviving original labels, ascending
  std::vector<Edge> edges;
};

struct ChainHamiltonian {
  QOperator h;
  std::vector<int> site_map;
};

Geometry build_geometry(const ChainSpec& spec);

/// kappa (r/d)^3 in rad/s.
double coupling_from_distance(double d_nm, const ChainSpec& spec);

CouplingGraph build_coupling_graph(const ChainSpec& spec, const Geometry& geometry);
CouplingGraph build_coupling_graph(const ChainSpec& spec);

/// Single-excitation hopping matrix over the surviving sites.
Eigen::MatrixXd hopping_matrix(const CouplingGraph& graph);

/// Dense Hamiltonian sum_edges g (s+^i s-^j + h.c.) over surviving sites.
ChainHamiltonian build_chain_hamiltonian(const ChainSpec& spec);
ChainHamiltonian build_chain_hamiltonian(const CouplingGraph& graph);

/// sin(pi / 2N) > 1 / (M + 20 sqrt(10) / 3)
bool validate_star_geometry(int n_outer, int m_chain);

/// All n_lost-subsets of {1..M} with no two adjacent members, lexicographic.
std::vector<std::vector<int>> loss_configurations(int m_chain, int n_lost);

nlohmann::json to_json(const ChainSpec& spec);
nlohmann::json to_json(const Geometry& geometry, const CouplingGraph& graph);

}  // namespace starnet::chain
