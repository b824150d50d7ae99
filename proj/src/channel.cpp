#include "rismux/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rismux/rng.hpp"

namespace rismux {

namespace {

ComplexMatrix sample_matrix(std::uint64_t key, std::uint64_t tag, std::uint64_t trial_index,
                            Eigen::Index rows, Eigen::Index cols) {
  PhiloxStream rng(key, stream_id(tag, trial_index));
  ComplexMatrix m(rows, cols);
  // Row-major fill order; part of the reproducibility contract.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = rng.next_cn01();
    }
  }
  return m;
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must be in [0, 1], got " + std::to_string(alpha));
  }
}

void check_theta(const ChannelRealization& real, const PhaseVector& theta) {
  if (theta.size() != real.num_elements()) {
    throw std::invalid_argument("theta length " + std::to_string(theta.size()) +
                                " does not match L=" + std::to_string(real.num_elements()));
  }
}

}  // namespace

ChannelRealization sample_channels(const SystemConfig& config, std::uint64_t trial_index) {
  config.validate();
  const auto m = static_cast<Eigen::Index>(config.num_antennas);
  const auto k = static_cast<Eigen::Index>(config.num_users);
  const auto l = static_cast<Eigen::Index>(config.num_elements);
  ChannelRealization real;
  real.direct = sample_matrix(config.seed, stream_tag::direct, trial_index, m, k);
  real.ris_to_bs = sample_matrix(config.seed, stream_tag::ris_to_bs, trial_index, m, l);
  real.users_to_ris = sample_matrix(config.seed, stream_tag::users_to_ris, trial_index, l, k);
  return real;
}

ComplexMatrix assemble_effective(const ChannelRealization& real, const PhaseVector& theta,
                                 double alpha) {
  check_alpha(alpha);
  check_theta(real, theta);
  const int l = real.num_elements();
  const double direct_gain = std::sqrt(1.0 - alpha);
  const double ris_gain = std::sqrt(alpha) / std::sqrt(static_cast<double>(l));

  Eigen::VectorXcd reflect(l);
  for (int i = 0; i < l; ++i) {
    reflect(i) = std::polar(1.0, theta(i));
  }
  ComplexMatrix h = direct_gain * real.direct;
  if (alpha > 0.0) {
    h.noalias() += ris_gain * (real.ris_to_bs * reflect.asDiagonal() * real.users_to_ris);
  }
  return h;
}

ComplexMatrix channel_partial(const ChannelRealization& real, const PhaseVector& theta, int ell,
                              double alpha) {
  check_alpha(alpha);
  check_theta(real, theta);
  const int l = real.num_elements();
  if (ell < 0 || ell >= l) {
    throw std::out_of_range("channel_partial: element index " + std::to_string(ell) +
                            " outside [0, " + std::to_string(l) + ")");
  }
  const double ris_gain = std::sqrt(alpha) / std::sqrt(static_cast<double>(l));
  const std::complex<double> coeff = ris_gain * std::polar(1.0, theta(ell) + M_PI / 2.0);
  ComplexMatrix partial = coeff * (real.ris_to_bs.col(ell) * real.users_to_ris.row(ell));
  return partial;
}

PhaseVector random_phases(std::uint64_t key, std::uint64_t tag, std::uint64_t salt, int count) {
  PhiloxStream rng(key, stream_id(tag, salt));
  PhaseVector theta(count);
  for (int i = 0; i < count; ++i) {
    theta(i) = rng.next_uniform(0.0, 2.0 * M_PI);
  }
  return theta;
}

}  // namespace rismux
