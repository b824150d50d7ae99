#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace rismux {

// Dense complex matrix, the common currency of all channel/receiver math.
using ComplexMatrix = Eigen::MatrixXcd;

// L real phase shifts in radians. Unconstrained: phases enter only through
// e^{i*theta}, which is 2*pi periodic, so no wrapping is applied.
using PhaseVector = Eigen::VectorXd;

// One real entry per phase shift, objective units per radian.
using GradientVector = Eigen::VectorXd;

// Phase-shift selection strategies. The first two are optimized criteria;
// random_phase and no_ris are the baselines they are compared against.
enum class Criterion { effective_rank, min_singular, random_phase, no_ris };

struct SystemConfig {
  int num_antennas = 4;     // M, base-station antennas
  int num_users = 4;        // K, single-antenna users (requires M >= K)
  int num_elements = 64;    // L, RIS reflecting elements
  double alpha = 0.5;       // fraction of received power through the RIS, in [0, 1]
  double noise_var = 0.1;   // sigma_n^2, linear power units, > 0
  std::uint64_t seed = 0;   // master seed for all derived random streams

  // Throws std::invalid_argument on violated bounds.
  void validate() const;
};

// One draw of the static random part of the link: the direct channel and the
// two RIS hops. Entries are i.i.d. CN(0,1).
struct ChannelRealization {
  ComplexMatrix direct;        // D, M x K, users -> base station
  ComplexMatrix ris_to_bs;     // F, M x L
  ComplexMatrix users_to_ris;  // G, L x K

  int num_antennas() const { return static_cast<int>(direct.rows()); }
  int num_users() const { return static_cast<int>(direct.cols()); }
  int num_elements() const { return static_cast<int>(ris_to_bs.cols()); }

  // Throws std::invalid_argument on inconsistent dimensions or non-finite entries.
  void validate() const;
};

bool all_finite(const ComplexMatrix& m);
bool all_finite(const Eigen::VectorXd& v);

}  // namespace rismux
