#pragma once

#include <functional>

#include "rismux/types.hpp"

namespace rismux {

// Thin SVD, H = U * diag(values) * V^H, singular values sorted descending.
struct SvdResult {
  ComplexMatrix left;       // U, M x K, orthonormal columns
  Eigen::VectorXd values;   // K, descending, nonnegative
  ComplexMatrix right;      // V, K x K, orthonormal columns
};

// Throws std::invalid_argument for non-finite input or M < K,
// std::runtime_error if the factorization does not converge.
SvdResult svd_thin(const ComplexMatrix& h);

// Effective rank: exp of the Shannon entropy of the normalized singular value
// distribution p_i = lambda_i / sum(lambda). In [1, K] for any nonzero matrix;
// equals K iff all singular values coincide. Terms with p_i = 0 contribute 0.
// Throws std::domain_error on an all-zero spectrum.
double effective_rank(const Eigen::VectorXd& singular_values);

// d(effective rank)/d(lambda_k), zero-based k. Zero singular values follow the
// p*ln(p) -> 0 limit; the directional derivative at lambda_k = 0 itself is
// unbounded and is clamped to 1e12.
double effective_rank_partial_lambda(const Eigen::VectorXd& singular_values, int k);

// ||offdiag(H^H H)||_F / ||diag(H^H H)||_F. Zero iff columns are orthogonal.
// Throws std::domain_error for the zero matrix.
double gram_offdiag_ratio(const ComplexMatrix& h);

// Generic form of the singular value derivative: entry ell is
// Re{ u_k^H * partial(ell) * v_k }, with partial(ell) = dH/d(theta_ell).
using PartialProvider = std::function<ComplexMatrix(int ell)>;
GradientVector singular_value_grad(const SvdResult& svd, const PartialProvider& partials,
                                   int num_elements, int k);

// Same quantity through the rank-1 structure of the channel partials:
//   Re{ sqrt(alpha/L) e^{i(theta_ell + pi/2)} (u_k^H f_ell)(g_ell v_k) },
// O(M + K) per element after two thin products.
GradientVector singular_value_grad(const SvdResult& svd, const ChannelRealization& real,
                                   const PhaseVector& theta, double alpha, int k);

// Chain rule over all K singular values:
//   grad_ell(xi) = sum_k d(lambda_k)/d(theta_ell) * d(xi)/d(lambda_k).
GradientVector effective_rank_grad(const ChannelRealization& real, const PhaseVector& theta,
                                   double alpha);

// Gradient (or Clarke subgradient near a tie of the two smallest singular
// values) of lambda_min. When degenerate_out is non-null it is set to whether
// lambda_{K-1} - lambda_K < 1e-9 * lambda_1 at this iterate.
GradientVector min_singular_grad(const ChannelRealization& real, const PhaseVector& theta,
                                 double alpha, bool* degenerate_out = nullptr);

// Convenience evaluations used by the optimizer and diagnostics.
double effective_rank_of(const ComplexMatrix& h);
double min_singular_of(const ComplexMatrix& h);

}  // namespace rismux
