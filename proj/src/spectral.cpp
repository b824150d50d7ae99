#include "rismux/spectral.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rismux/channel.hpp"

namespace rismux {

namespace {

constexpr double kZeroPartialClamp = 1e12;
constexpr double kTieThreshold = 1e-9;

void check_spectrum(const Eigen::VectorXd& lambda) {
  if (lambda.size() == 0) {
    throw std::invalid_argument("empty singular value vector");
  }
  if (!(lambda.sum() > 0.0)) {
    throw std::domain_error("effective rank undefined for an all-zero spectrum");
  }
}

double ris_gain(const ChannelRealization& real, double alpha) {
  return std::sqrt(alpha) / std::sqrt(static_cast<double>(real.num_elements()));
}

}  // namespace

SvdResult svd_thin(const ComplexMatrix& h) {
  if (!all_finite(h)) {
    throw std::invalid_argument("svd_thin: non-finite input");
  }
  if (h.rows() < h.cols()) {
    throw std::invalid_argument("svd_thin: requires rows >= cols, got " +
                                std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw std::runtime_error("svd_thin: factorization failed (||H||_F = " +
                             std::to_string(h.norm()) + ")");
  }
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

double effective_rank(const Eigen::VectorXd& lambda) {
  check_spectrum(lambda);
  const double nuclear = lambda.sum();
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double p = lambda(i) / nuclear;
    if (p > 0.0) {
      entropy -= p * std::log(p);
    }
  }
  return std::exp(entropy);
}

double effective_rank_partial_lambda(const Eigen::VectorXd& lambda, int k) {
  check_spectrum(lambda);
  if (k < 0 || k >= lambda.size()) {
    throw std::out_of_range("effective_rank_partial_lambda: index out of range");
  }
  const double nuclear = lambda.sum();
  const double xi = effective_rank(lambda);

  // The k-th diagonal coefficient is sum_{i != k} lambda_i; off-diagonal
  // coefficients are -lambda_j. A zero lambda_j (j != k) kills its own term;
  // a zero lambda_k makes the one-sided derivative unbounded, so clamp.
  double acc = 0.0;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    const double coeff = (j == k) ? nuclear - lambda(k) : -lambda(j);
    if (coeff == 0.0) {
      continue;
    }
    if (lambda(j) == 0.0) {
      return kZeroPartialClamp;  // only reachable for j == k
    }
    acc += coeff / (nuclear * nuclear) * (1.0 + std::log(lambda(j) / nuclear));
  }
  return -acc * xi;
}

double gram_offdiag_ratio(const ComplexMatrix& h) {
  if (!(h.norm() > 0.0)) {
    throw std::domain_error("gram_offdiag_ratio undefined for the zero matrix");
  }
  const ComplexMatrix gram = h.adjoint() * h;
  const double diag_norm = gram.diagonal().norm();
  const double off_sq = gram.squaredNorm() - gram.diagonal().squaredNorm();
  return std::sqrt(std::max(off_sq, 0.0)) / diag_norm;
}

GradientVector singular_value_grad(const SvdResult& svd, const PartialProvider& partials,
                                   int num_elements, int k) {
  if (k < 0 || k >= svd.values.size()) {
    throw std::out_of_range("singular_value_grad: singular value index out of range");
  }
  GradientVector g(num_elements);
  const Eigen::VectorXcd u = svd.left.col(k);
  const Eigen::VectorXcd v = svd.right.col(k);
  for (int ell = 0; ell < num_elements; ++ell) {
    g(ell) = (u.adjoint() * partials(ell) * v).value().real();
  }
  return g;
}

GradientVector singular_value_grad(const SvdResult& svd, const ChannelRealization& real,
                                   const PhaseVector& theta, double alpha, int k) {
  if (k < 0 || k >= svd.values.size()) {
    throw std::out_of_range("singular_value_grad: singular value index out of range");
  }
  const int l = real.num_elements();
  if (theta.size() != l) {
    throw std::invalid_argument("singular_value_grad: theta length does not match L");
  }
  const double gain = ris_gain(real, alpha);
  // a_ell = u_k^H f_ell, b_ell = g_ell v_k.
  const Eigen::RowVectorXcd a = svd.left.col(k).adjoint() * real.ris_to_bs;
  const Eigen::VectorXcd b = real.users_to_ris * svd.right.col(k);
  GradientVector g(l);
  for (int ell = 0; ell < l; ++ell) {
    const std::complex<double> coeff = gain * std::polar(1.0, theta(ell) + M_PI / 2.0);
    g(ell) = (coeff * a(ell) * b(ell)).real();
  }
  return g;
}

GradientVector effective_rank_grad(const ChannelRealization& real, const PhaseVector& theta,
                                   double alpha) {
  const ComplexMatrix h = assemble_effective(real, theta, alpha);
  const SvdResult svd = svd_thin(h);
  const int k_count = static_cast<int>(svd.values.size());
  const int l = real.num_elements();
  const double gain = ris_gain(real, alpha);

  Eigen::VectorXd xi_partials(k_count);
  for (int k = 0; k < k_count; ++k) {
    xi_partials(k) = effective_rank_partial_lambda(svd.values, k);
  }

  // A(k, ell) = u_k^H f_ell, B(ell, k) = g_ell v_k; one pass instead of K
  // rank-1 sweeps.
  const ComplexMatrix a = svd.left.adjoint() * real.ris_to_bs;   // K x L
  const ComplexMatrix b = real.users_to_ris * svd.right;         // L x K

  GradientVector g = GradientVector::Zero(l);
  for (int ell = 0; ell < l; ++ell) {
    const std::complex<double> coeff = gain * std::polar(1.0, theta(ell) + M_PI / 2.0);
    double acc = 0.0;
    for (int k = 0; k < k_count; ++k) {
      acc += xi_partials(k) * (coeff * a(k, ell) * b(ell, k)).real();
    }
    g(ell) = acc;
  }
  return g;
}

GradientVector min_singular_grad(const ChannelRealization& real, const PhaseVector& theta,
                                 double alpha, bool* degenerate_out) {
  const ComplexMatrix h = assemble_effective(real, theta, alpha);
  const SvdResult svd = svd_thin(h);
  const int k_min = static_cast<int>(svd.values.size()) - 1;
  if (degenerate_out != nullptr) {
    *degenerate_out =
        k_min > 0 && (svd.values(k_min - 1) - svd.values(k_min)) < kTieThreshold * svd.values(0);
  }
  return singular_value_grad(svd, real, theta, alpha, k_min);
}

double effective_rank_of(const ComplexMatrix& h) {
  Eigen::JacobiSVD<ComplexMatrix> svd(h);
  return effective_rank(svd.singularValues());
}

double min_singular_of(const ComplexMatrix& h) {
  Eigen::JacobiSVD<ComplexMatrix> svd(h);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace rismux
