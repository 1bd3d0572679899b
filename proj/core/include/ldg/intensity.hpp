#pragma once

#include "ldg/tensor.hpp"

namespace ldg {

/// Trainable pieces of the conditional intensity. `rate_raw` is the
/// pre-softplus rate: psi_k = softplus(rate_raw_k) keeps the rate positive.
/// Both interaction variants are carried so a config flag can switch them.
struct IntensityParams {
  Tensor rate_raw[2];        // {1} each
  Tensor compat_concat[2];   // {2d} each
  Tensor compat_bilinear[2]; // {d, d, 1} each
};

/// psi_k for kind k (positive by construction).
Tensor intensity_rate(const IntensityParams& p, int k);

/// lambda = psi_k * log(1 + exp(w_k . [z_u, z_v] / psi_k)); embeddings are
/// the rows as of just before the event's own update.
Tensor intensity_concat(const Tensor& z_u, const Tensor& z_v, int k,
                        const IntensityParams& p);

/// lambda = psi_k * log(1 + exp(z_u' Omega_k z_v / psi_k)).
Tensor intensity_bilinear(const Tensor& z_u, const Tensor& z_v, int k,
                          const IntensityParams& p);

}  // namespace ldg
