#include "ldg/encoder.hpp"

#include <cmath>

namespace ldg {

PriorConfig PriorConfig::uniform(int r) {
  PriorConfig p;
  p.kind = PriorKind::kUniform;
  p.theta.assign(static_cast<size_t>(r), 1.0 / r);
  return p;
}

PriorConfig PriorConfig::sparse(int r) {
  PriorConfig p;
  p.kind = PriorKind::kSparse;
  p.theta.resize(static_cast<size_t>(r) + 1);
  p.theta[0] = 0.90;
  for (int i = 1; i <= r; ++i) p.theta[static_cast<size_t>(i)] = 0.10 / r;
  return p;
}

Tensor mlp_apply(const Mlp& m, const Tensor& x) {
  Tensor h = relu_t(add_rowvec(matmul(x, m.w1), m.b1));
  return add_rowvec(matmul(h, m.w2), m.b2);
}

EncodeResult encode_edge(int u, int v, const Tensor& z, const EncoderParams& p,
                         int out_dim) {
  require(u != v, "encode_edge: u == v");
  const int n = z.dim(0);
  const int d = z.dim(1);

  // pass 1: node transform, then edge embeddings for all ordered pairs
  Tensor h1 = mlp_apply(p.node1, z);                         // {N, d}
  Tensor raw_edges = pairwise_bilinear(h1, p.pair1);         // {N, N, d}
  Tensor e1 = mlp_apply(p.edge1, reshape(raw_edges, {n * n, d}));
  // self-pairs carry no edge; zero their fibers before the incoming sum
  std::vector<double> mask(static_cast<size_t>(n) * n * d, 1.0);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c)
      mask[(static_cast<size_t>(i) * n + i) * d + c] = 0.0;
  Tensor e1_masked = mask_mul(reshape(e1, {n, n, d}), mask);

  // pass 2: edge-to-node over incoming edges, then the (u,v) edge
  Tensor pooled = sum_axis0_3d(e1_masked);                   // {N, d}
  Tensor h2 = mlp_apply(p.node2, pooled);                    // {N, d}
  Tensor hu = reshape(gather_rows(h2, {u}), {d});
  Tensor hv = reshape(gather_rows(h2, {v}), {d});
  Tensor pair = bilinear_form(hu, p.pair2, hv);              // {d}
  Tensor logits = reshape(mlp_apply(p.edge2, reshape(pair, {1, d})), {out_dim});

  EncodeResult result;
  result.logits = logits;
  result.posterior = softmax_vec(logits);
  result.trace = {h1, e1_masked, h2, logits};
  return result;
}

AttentionSample sample_attention_logits(const Tensor& logits,
                                        const PriorConfig& prior, int r,
                                        double temperature, bool hard, Rng& rng) {
  require(logits.size() == prior.out_dim(r), "sample_attention: logit count mismatch");
  Tensor sampled = gumbel_softmax_sample(logits, temperature, hard, rng);
  AttentionSample out;
  if (prior.kind == PriorKind::kSparse) {
    out.fiber = slice_vec(sampled, 1, r);  // drop the non-edge coordinate
  } else {
    out.fiber = sampled;
  }
  if (hard) {
    int arg = 0;
    for (int i = 1; i < sampled.size(); ++i)
      if (sampled.data()[i] > sampled.data()[arg]) arg = i;
    out.hard_index = arg;
  } else {
    out.hard_index = -1;
  }
  return out;
}

AttentionSample sample_attention(const Tensor& posterior,
                                 const PriorConfig& prior, int r,
                                 double temperature, bool hard, Rng& rng) {
  std::vector<double> logit_vals(posterior.values());
  for (double& q : logit_vals) q = std::log(std::max(q, 1e-12));
  Tensor logits = Tensor::from(posterior.shape(), std::move(logit_vals));
  return sample_attention_logits(logits, prior, r, temperature, hard, rng);
}

Tensor kl_uniform(const std::vector<Tensor>& posteriors) {
  Tensor acc = Tensor::scalar(0.0);
  for (const Tensor& q : posteriors) acc = add(acc, sum(xlogx(q)));
  return acc;
}

Tensor kl_sparse(const std::vector<Tensor>& posteriors, const PriorConfig& prior) {
  require(prior.kind == PriorKind::kSparse, "kl_sparse: prior must be sparse");
  const int theta_len = static_cast<int>(prior.theta.size());
  std::vector<double> log_theta(prior.theta.size());
  for (size_t i = 0; i < prior.theta.size(); ++i)
    log_theta[i] = std::log(prior.theta[i]);
  Tensor log_theta_t = Tensor::from({theta_len}, std::move(log_theta));
  Tensor acc = Tensor::scalar(0.0);
  for (const Tensor& q : posteriors) {
    require(q.size() == static_cast<int>(prior.theta.size()),
            "kl_sparse: posterior length does not match prior");
    acc = add(acc, sub(sum(xlogx(q)), dot(q, log_theta_t)));
  }
  return acc;
}

AttentionState init_random_attention(int n_nodes, int r, const PriorConfig& prior,
                                     Rng& rng) {
  AttentionState state(n_nodes, r);
  double* s = state.s.data();
  const int out_dim = prior.out_dim(r);
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = i + 1; j < n_nodes; ++j) {
      // categorical draw from theta
      double u01 = rng.uniform01();
      int cat = 0;
      double cum = 0.0;
      for (int c = 0; c < out_dim; ++c) {
        cum += prior.theta[static_cast<size_t>(c)];
        if (u01 < cum) {
          cat = c;
          break;
        }
        cat = c;
      }
      int type = -1;  // -1 encodes non-edge
      if (prior.kind == PriorKind::kSparse) {
        if (cat > 0) type = cat - 1;
      } else {
        type = cat;
      }
      if (type >= 0) {
        s[(static_cast<size_t>(i) * n_nodes + j) * r + type] = 1.0;
        s[(static_cast<size_t>(j) * n_nodes + i) * r + type] = 1.0;
      }
    }
  }
  return state;
}

}  // namespace ldg
