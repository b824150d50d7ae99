#include "rismux/types.hpp"

#include <stdexcept>
#include <string>

namespace rismux {

bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

bool all_finite(const Eigen::VectorXd& v) {
  return v.allFinite();
}

void SystemConfig::validate() const {
  if (num_users < 1 || num_antennas < num_users) {
    throw std::invalid_argument("SystemConfig: requires M >= K >= 1, got M=" +
                                std::to_string(num_antennas) +
                                " K=" + std::to_string(num_users));
  }
  if (num_elements < 1) {
    throw std::invalid_argument("SystemConfig: requires L >= 1, got L=" +
                                std::to_string(num_elements));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("SystemConfig: alpha must be in [0, 1], got " +
                                std::to_string(alpha));
  }
  if (!(noise_var > 0.0)) {
    throw std::invalid_argument("SystemConfig: noise_var must be > 0, got " +
                                std::to_string(noise_var));
  }
}

void ChannelRealization::validate() const {
  const auto m = direct.rows();
  const auto k = direct.cols();
  const auto l = ris_to_bs.cols();
  if (ris_to_bs.rows() != m || users_to_ris.rows() != l || users_to_ris.cols() != k) {
    throw std::invalid_argument("ChannelRealization: inconsistent dimensions");
  }
  if (!all_finite(direct) || !all_finite(ris_to_bs) || !all_finite(users_to_ris)) {
    throw std::invalid_argument("ChannelRealization: non-finite entries");
  }
}

}  // namespace rismux
