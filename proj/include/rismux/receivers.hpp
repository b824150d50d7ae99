#pragma once

#include "rismux/types.hpp"

namespace rismux {

enum class Receiver { mmse, mf, joint };

// Per-user post-equalization SINR, linear scale.
using SinrVector = Eigen::VectorXd;

// W = (H^H H + noise_var I)^{-1} H^H, K x M. Solved through a Cholesky
// factorization of the regularized Gram matrix, never an explicit inverse.
// Note: post_sinr's noise term is K * noise_var per user, so the receiver
// that actually maximizes that ratio is mmse_weights(h, K * noise_var);
// receiver_sum_rate and effective_noise handle this scaling.
ComplexMatrix mmse_weights(const ComplexMatrix& h, double noise_var);

// The noise floor entering the SINR denominator: K * noise_var under the
// per-user unit-power convention.
double effective_noise(const ComplexMatrix& h, double noise_var);

// Matched filter, W = H^H.
ComplexMatrix mf_weights(const ComplexMatrix& h);

// gamma_k = |w_k^H h_k|^2 / (sum_{j != k} |w_k^H h_j|^2 + K noise_var ||w_k||^2)
// with w_k^H the k-th row of W. A zero row yields gamma_k = 0.
SinrVector post_sinr(const ComplexMatrix& w, const ComplexMatrix& h, double noise_var);

// sum_k log2(1 + gamma_k), bits per channel use.
double linear_sum_rate(const SinrVector& gamma);

// log2 det(I + H^H H / (K noise_var)): joint-decoding sum rate with per-user
// unit power and the same noise scaling as post_sinr.
double joint_decoding_rate(const ComplexMatrix& h, double noise_var);

// Sum rate for one receiver kind on a given channel.
double receiver_sum_rate(Receiver kind, const ComplexMatrix& h, double noise_var);

}  // namespace rismux
