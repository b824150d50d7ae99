#include "rismux/receivers.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace rismux {

namespace {

void check_noise(double noise_var) {
  if (!(noise_var > 0.0)) {
    throw std::invalid_argument("noise_var must be > 0");
  }
}

}  // namespace

ComplexMatrix mmse_weights(const ComplexMatrix& h, double noise_var) {
  check_noise(noise_var);
  ComplexMatrix gram = h.adjoint() * h;
  gram.diagonal().array() += noise_var;
  // Hermitian positive definite for noise_var > 0.
  return gram.llt().solve(h.adjoint());
}

ComplexMatrix mf_weights(const ComplexMatrix& h) {
  return h.adjoint();
}

SinrVector post_sinr(const ComplexMatrix& w, const ComplexMatrix& h, double noise_var) {
  check_noise(noise_var);
  if (w.cols() != h.rows() || w.rows() != h.cols()) {
    throw std::invalid_argument("post_sinr: W must be K x M for an M x K channel");
  }
  const auto k_users = h.cols();
  const ComplexMatrix cross = w * h;  // (k, j) = w_k^H h_j
  SinrVector gamma(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const double w_norm_sq = w.row(k).squaredNorm();
    if (w_norm_sq == 0.0) {
      gamma(k) = 0.0;
      continue;
    }
    const double signal = std::norm(cross(k, k));
    const double interference = cross.row(k).squaredNorm() - signal;
    const double noise = static_cast<double>(k_users) * noise_var * w_norm_sq;
    gamma(k) = signal / (interference + noise);
  }
  return gamma;
}

double linear_sum_rate(const SinrVector& gamma) {
  double rate = 0.0;
  for (Eigen::Index k = 0; k < gamma.size(); ++k) {
    rate += std::log2(1.0 + gamma(k));
  }
  return rate;
}

double joint_decoding_rate(const ComplexMatrix& h, double noise_var) {
  check_noise(noise_var);
  const auto k_users = h.cols();
  ComplexMatrix a = h.adjoint() * h / (static_cast<double>(k_users) * noise_var);
  a.diagonal().array() += 1.0;
  const auto llt = a.llt();
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("joint_decoding_rate: Cholesky factorization failed");
  }
  const ComplexMatrix l = llt.matrixL();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < k_users; ++i) {
    log_det += 2.0 * std::log(std::abs(l(i, i)));
  }
  return log_det / std::log(2.0);
}

double effective_noise(const ComplexMatrix& h, double noise_var) {
  return static_cast<double>(h.cols()) * noise_var;
}

double receiver_sum_rate(Receiver kind, const ComplexMatrix& h, double noise_var) {
  switch (kind) {
    case Receiver::mmse:
      return linear_sum_rate(
          post_sinr(mmse_weights(h, effective_noise(h, noise_var)), h, noise_var));
    case Receiver::mf:
      return linear_sum_rate(post_sinr(mf_weights(h), h, noise_var));
    case Receiver::joint:
      return joint_decoding_rate(h, noise_var);
  }
  throw std::invalid_argument("unknown receiver kind");
}

}  // namespace rismux
