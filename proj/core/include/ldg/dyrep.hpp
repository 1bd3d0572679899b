#pragma once

#include <vector>

#include "ldg/attention.hpp"
#include "ldg/event.hpp"
#include "ldg/tensor.hpp"

namespace ldg {

enum class AttentionMode { kDyrep, kLdgLearned, kLdgRandomFrozen };
enum class Aggregator { kSum, kMax };
enum class Nonlinearity { kTanh, kSigmoid };

/// Per-node recursive state: current embeddings plus each node's previous
/// event time/index (drives the waiting-time term).
struct NodeState {
  Tensor z;  // {N, d}
  std::vector<double> last_time;
  std::vector<long> last_index;

  NodeState() = default;
  NodeState(int n_nodes, int d)
      : z(Tensor::zeros({n_nodes, d})),
        last_time(static_cast<size_t>(n_nodes), 0.0),
        last_index(static_cast<size_t>(n_nodes), -1) {}

  void detach() { z = z.detach(); }
};

/// Weights of the recursive node update.
struct DyrepParams {
  Tensor attn_in;     // {r*d, d}: acts on concatenated per-type aggregates
  Tensor self_prop;   // {d, d}
  Tensor time_shift;  // {1, d}
  Tensor neigh_proj;  // {d, d}: shared across edge types
};

struct UpdateConfig {
  Aggregator aggregator = Aggregator::kSum;
  Nonlinearity sigma = Nonlinearity::kTanh;
  double time_scale = 1.0;  // median inter-event gap of the training stream
  double dt_clamp = 100.0;
};

/// Attention-weighted aggregate of u's neighbors for one edge type:
/// softmax over the neighbor-restricted attention row, weights applied to
/// projected neighbor embeddings. The neighbor set is the association
/// neighborhood in DyRep mode and the nonzero-attention partners otherwise.
/// Returns the zero vector when the set is empty.
Tensor aggregate_attention(int u, const NodeState& state, const AttentionState& attn,
                           const AssociationState& assoc, const DyrepParams& params,
                           int edge_type, AttentionMode mode,
                           Aggregator aggregator = Aggregator::kSum);

/// New embedding row for node v: sigma(agg_concat W_attn + z_v W_self +
/// dt_scaled * w_time). `partner_aggs` holds the other endpoint's aggregate
/// per edge type. Pre: tau >= last_time[v].
Tensor update_node(int v, const std::vector<Tensor>& partner_aggs,
                   const NodeState& state, const DyrepParams& params, double tau,
                   const UpdateConfig& cfg);

/// The hard-coded attention rule. Communication events touch S only when
/// the endpoints are associated: both symmetric entries grow by lambda and
/// the touched rows are renormalized over their association neighborhoods.
/// Association events reset both endpoint rows to uniform over the enlarged
/// neighborhood. `assoc` must already include the event's edge when e.k == 0.
/// No learned parameter contributes; the result carries plain values.
AttentionState dyrep_attention_update(const Event& e, double lambda,
                                      const AttentionState& attn,
                                      const AssociationState& assoc);

/// Initial attention for DyRep mode (r = 1): each row uniform over its
/// association neighbors.
AttentionState init_dyrep_attention(const AssociationState& assoc);

}  // namespace ldg
