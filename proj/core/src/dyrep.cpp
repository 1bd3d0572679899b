#include "ldg/dyrep.hpp"

#include <algorithm>
#include <cmath>

namespace ldg {

Tensor aggregate_attention(int u, const NodeState& state, const AttentionState& attn,
                           const AssociationState& assoc, const DyrepParams& params,
                           int edge_type, AttentionMode mode, Aggregator aggregator) {
  const int d = state.z.dim(1);
  std::vector<int> partners = mode == AttentionMode::kDyrep
                                  ? assoc.neighbors(u)
                                  : attn.nonzero_partners(u, edge_type);
  if (partners.empty()) return Tensor::zeros({1, d});

  Tensor weights = softmax_vec(gather_attn(attn.s, u, partners, edge_type));
  Tensor projected = matmul(gather_rows(state.z, partners), params.neigh_proj);
  const int k = static_cast<int>(partners.size());
  if (aggregator == Aggregator::kSum)
    return matmul(reshape(weights, {1, k}), projected);

  // elementwise max over weighted rows
  Tensor spread = matmul(reshape(weights, {k, 1}), Tensor::full({1, d}, 1.0));
  Tensor weighted = mul(projected, spread);
  Tensor acc = gather_rows(weighted, {0});
  for (int i = 1; i < k; ++i) acc = emax(acc, gather_rows(weighted, {i}));
  return acc;
}

Tensor update_node(int v, const std::vector<Tensor>& partner_aggs,
                   const NodeState& state, const DyrepParams& params, double tau,
                   const UpdateConfig& cfg) {
  const double dt = tau - state.last_time[static_cast<size_t>(v)];
  require(dt >= 0.0, "update_node: negative waiting time");
  const double dt_scaled = std::min(dt / cfg.time_scale, cfg.dt_clamp);

  Tensor agg = partner_aggs.size() == 1 ? partner_aggs[0] : concat_vec(partner_aggs);
  const int rd = agg.size();
  Tensor pre = add(matmul(reshape(agg, {1, rd}), params.attn_in),
                   matmul(gather_rows(state.z, {v}), params.self_prop));
  pre = add(pre, scale(params.time_shift, dt_scaled));
  return cfg.sigma == Nonlinearity::kTanh ? tanh_t(pre) : sigmoid_t(pre);
}

namespace {

void renormalize_row(double* s, int n, int r, int u,
                     const std::vector<int>& neighbors) {
  double total = 0.0;
  for (int i : neighbors) total += s[(static_cast<size_t>(u) * n + i) * r];
  if (total <= 0.0) {
    // degenerate row: fall back to uniform
    for (int i : neighbors)
      s[(static_cast<size_t>(u) * n + i) * r] = 1.0 / static_cast<double>(neighbors.size());
    return;
  }
  for (int i : neighbors) s[(static_cast<size_t>(u) * n + i) * r] /= total;
}

void reset_row_uniform(double* s, int n, int r, int u,
                       const std::vector<int>& neighbors) {
  for (int i = 0; i < n; ++i) s[(static_cast<size_t>(u) * n + i) * r] = 0.0;
  if (neighbors.empty()) return;
  const double w = 1.0 / static_cast<double>(neighbors.size());
  for (int i : neighbors) s[(static_cast<size_t>(u) * n + i) * r] = w;
}

}  // namespace

AttentionState dyrep_attention_update(const Event& e, double lambda,
                                      const AttentionState& attn,
                                      const AssociationState& assoc) {
  require(lambda > 0.0, "dyrep_attention_update: lambda must be positive");
  require(attn.r() == 1, "dyrep_attention_update: expects r == 1");
  const int n = attn.n();

  if (e.k == 1 && !assoc.has_edge(e.u, e.v)) return attn;  // case (a)

  AttentionState next;
  next.s = attn.s.detach();
  double* s = next.s.data();

  if (e.k == 1) {  // case (b): associated communication
    s[(static_cast<size_t>(e.u) * n + e.v)] += lambda;
    s[(static_cast<size_t>(e.v) * n + e.u)] += lambda;
    renormalize_row(s, n, 1, e.u, assoc.neighbors(e.u));
    renormalize_row(s, n, 1, e.v, assoc.neighbors(e.v));
  } else {  // case (c): new association; assoc already contains the edge
    reset_row_uniform(s, n, 1, e.u, assoc.neighbors(e.u));
    reset_row_uniform(s, n, 1, e.v, assoc.neighbors(e.v));
  }
  return next;
}

AttentionState init_dyrep_attention(const AssociationState& assoc) {
  const int n = assoc.n_nodes();
  AttentionState state(n, 1);
  double* s = state.s.data();
  for (int u = 0; u < n; ++u) reset_row_uniform(s, n, 1, u, assoc.neighbors(u));
  return state;
}

}  // namespace ldg
