#pragma once

#include <cstdint>

#include "rismux/types.hpp"

namespace rismux {

// Draws D (M x K), F (M x L), G (L x K) with i.i.d. CN(0,1) entries.
// Deterministic function of (config.seed, trial_index); distinct trials get
// independent Philox streams, so draw order does not matter.
ChannelRealization sample_channels(const SystemConfig& config, std::uint64_t trial_index);

// Effective uplink channel
//   H_eff = sqrt(1-alpha) * D + sqrt(alpha/L) * F * diag(e^{i theta}) * G.
ComplexMatrix assemble_effective(const ChannelRealization& real, const PhaseVector& theta,
                                 double alpha);

// dH_eff / d theta_ell = sqrt(alpha/L) * e^{i(theta_ell + pi/2)} * f_ell g_ell
// where f_ell is column ell of F and g_ell is row ell of G. Rank <= 1.
// ell is zero-based, in [0, L).
ComplexMatrix channel_partial(const ChannelRealization& real, const PhaseVector& theta, int ell,
                              double alpha);

// Seeded uniform draw on [0, 2*pi)^L for a given purpose tag + salt.
PhaseVector random_phases(std::uint64_t key, std::uint64_t tag, std::uint64_t salt, int count);

}  // namespace rismux
