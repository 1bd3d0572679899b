#pragma once

#include <vector>

#include "ldg/attention.hpp"
#include "ldg/rng.hpp"
#include "ldg/tensor.hpp"

namespace ldg {

enum class PriorKind { kUniform, kSparse };

/// Prior over edge types. Sparse priors carry r+1 entries whose first
/// component is the discarded "non-edge" type.
struct PriorConfig {
  PriorKind kind = PriorKind::kUniform;
  std::vector<double> theta;

  static PriorConfig uniform(int r);
  /// theta = [0.90, 0.10/r, ...]: dominant non-edge mass, the rest split
  /// evenly over the r usable types.
  static PriorConfig sparse(int r);

  int out_dim(int r) const { return kind == PriorKind::kSparse ? r + 1 : r; }
};

/// Two-layer MLP applied row-wise: relu(x W1 + b1) W2 + b2.
struct Mlp {
  Tensor w1, b1, w2, b2;
};

Tensor mlp_apply(const Mlp& m, const Tensor& x);

/// Weights of the two-pass edge encoder.
struct EncoderParams {
  Mlp node1, edge1, node2, edge2;
  Tensor pair1;  // {d, d, d} bilinear mixing node features into edge features
  Tensor pair2;  // {d, d, d}
};

/// Intermediate activations of the two passes (shapes {N,d}, {N,N,d},
/// {N,d}, {out}); kept around for inspection and sensitivity tests.
struct EncoderTrace {
  Tensor h1_nodes;
  Tensor h1_edges;
  Tensor h2_nodes;
  Tensor h2_edge;
};

struct EncodeResult {
  Tensor logits;     // {r} or {r+1}
  Tensor posterior;  // softmax of logits
  EncoderTrace trace;
};

/// Runs both passes over all nodes and all ordered pairs and returns the
/// edge-type posterior for (u, v). Every node's embedding influences the
/// result through the second pass. Pre: u != v.
EncodeResult encode_edge(int u, int v, const Tensor& z, const EncoderParams& p,
                         int out_dim);

struct AttentionSample {
  Tensor fiber;    // {r}: one-hot, all-zero (non-edge), or soft
  int hard_index;  // argmax over the sampled categories; -1 in soft mode
};

/// Gumbel sample of an edge-type fiber from raw encoder logits. With a
/// sparse prior the first category is the non-edge type and maps to the
/// all-zero fiber.
AttentionSample sample_attention_logits(const Tensor& logits,
                                        const PriorConfig& prior, int r,
                                        double temperature, bool hard, Rng& rng);

/// Same, but from a posterior on the simplex (log-probabilities are used
/// as logits; a tiny clamp guards log(0)).
AttentionSample sample_attention(const Tensor& posterior,
                                 const PriorConfig& prior, int r,
                                 double temperature, bool hard, Rng& rng);

/// Uniform-prior KL collapses to the negated entropy sum (constant log r
/// dropped): sum_p sum_c q log q. Always <= 0.
Tensor kl_uniform(const std::vector<Tensor>& posteriors);

/// KL against an explicit sparse prior: sum_p KL(q_p || theta). Always >= 0.
Tensor kl_sparse(const std::vector<Tensor>& posteriors, const PriorConfig& prior);

/// Attention tensor with every off-diagonal unordered pair's fiber drawn
/// independently from the prior (mirrored to keep S symmetric). Serves both
/// as the learned-mode initialization and as the frozen random baseline.
AttentionState init_random_attention(int n_nodes, int r, const PriorConfig& prior,
                                     Rng& rng);

}  // namespace ldg
