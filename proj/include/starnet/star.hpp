#pragma once

// Spin-star model: one central spin (site 0) coupled to N outer spins
// (sites 1..N) through H = lambda (s0+ J- + s0- J+).

#include <vector>

#include "starnet/qops.hpp"

namespace starnet::star {

/// Normalization of the star coupling. `RaisingLowering` is
/// lambda (s0+ J- + s0- J+); `Cartesian` is lambda (X0 Jx + Y0 Jy), which is
/// twice as large.
enum class Normalization { RaisingLowering, Cartesian };

struct StarSpec {
  int n_outer = 3;
  double coupling = 1.0;  // rad/s

  void validate() const;
};

/// Collective operators on the N outer spins, written in the excitation
/// convention: J+ adds one excitation and Jz = (excitations) - N/2.
struct CollectiveOperators {
  QOperator jz;
  QOperator jplus;
  QOperator jminus;
  QOperator j2;
};

CollectiveOperators collective_operators(int n);

QOperator build_star_hamiltonian(const StarSpec& spec,
                                 Normalization norm = Normalization::RaisingLowering);

struct SpectrumEntry {
  double j = 0.0;
  double m = 0.0;
  double energy = 0.0;
  int multiplicity = 0;
};

/// Closed-form spectrum E = +-lambda sqrt((j+m)(j-m+1)), m = -j+1..j, for
/// every total-spin multiplet j of the outer spins. Each multiplet also has
/// two uncoupled zero-energy states; they are listed once as (j, -j, 0) with
/// their combined multiplicity.
std::vector<SpectrumEntry> star_spectrum_analytic(const StarSpec& spec);

/// Flattened, ascending eigenvalue list of the analytic spectrum.
std::vector<double> expand_spectrum(const std::vector<SpectrumEntry>& entries);

/// Number of spin-j multiplets in the coupling of n spin-1/2 particles.
long long multiplet_count(int n, double j);

/// Equal-amplitude superposition of all n-bit strings with k ones.
QPureState dicke_state(int n, int k);

/// Ground states of the star. One state for odd N, two orthonormal states
/// (m = 0 branch first, then m = 1) for even N.
std::vector<QPureState> ground_states(const StarSpec& spec);

struct WStateOutcome {
  double probability = 0.0;
  QPureState outer_state;
};

/// Measures the central spin of the unique (odd-N) ground state and returns
/// the projected outer register. Even N is rejected.
WStateOutcome w_state_protocol(const StarSpec& spec, int central_outcome);

/// Measures the central spin of an arbitrary star state.
WStateOutcome w_state_protocol(const QPureState& star_state, int central_outcome);

}  // namespace starnet::star
