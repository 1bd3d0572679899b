#include "ldg/dyrep.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ldg/model.hpp"

namespace ldg {
namespace {

DyrepParams make_params(int d, int r, uint64_t seed, double scale = 0.4) {
  Rng rng(seed);
  auto mat = [&](int rows, int cols) {
    std::vector<double> v(static_cast<size_t>(rows) * cols);
    for (double& x : v) x = scale * rng.normal();
    return Tensor::leaf({rows, cols}, std::move(v));
  };
  return {mat(r * d, d), mat(d, d), mat(1, d), mat(d, d)};
}

AttentionState uniform_attention(const AssociationState& assoc) {
  return init_dyrep_attention(assoc);
}

TEST(AggregateAttention, SingleNeighborIsProjection) {
  const int d = 3;
  NodeState state(4, d);
  Rng rng(1);
  for (double& x : state.z.values()) x = rng.normal();

  AssociationState assoc(4);
  assoc.add_edge(1, 3);
  AttentionState attn = uniform_attention(assoc);
  DyrepParams p = make_params(d, 1, 2);

  Tensor h = aggregate_attention(1, state, attn, assoc, p, 0, AttentionMode::kDyrep);
  Tensor expect = matmul(gather_rows(state.z, {3}), p.neigh_proj);
  for (int i = 0; i < d; ++i) EXPECT_NEAR(h.data()[i], expect.data()[i], 1e-12);
}

TEST(AggregateAttention, EqualAttentionGivesHalfHalf) {
  const int d = 2;
  NodeState state(5, d);
  state.z.values() = {1, 0, 0, 1, 2, 2, -1, 3, 0, 0};
  AssociationState assoc(5);
  assoc.add_edge(0, 1);
  assoc.add_edge(0, 2);
  AttentionState attn = uniform_attention(assoc);  // both entries 0.5
  DyrepParams p = make_params(d, 1, 3);
  std::vector<double> eye = {1, 0, 0, 1};
  p.neigh_proj = Tensor::leaf({d, d}, eye);

  Tensor h = aggregate_attention(0, state, attn, assoc, p, 0, AttentionMode::kDyrep);
  // softmax of equal values is uniform: h = 0.5 z_1 + 0.5 z_2
  EXPECT_NEAR(h.data()[0], 0.5 * 0.0 + 0.5 * 2.0, 1e-12);
  EXPECT_NEAR(h.data()[1], 0.5 * 1.0 + 0.5 * 2.0, 1e-12);
}

TEST(AggregateAttention, EmptyNeighborhoodGivesZero) {
  const int d = 4;
  NodeState state(3, d);
  AssociationState assoc(3);
  AttentionState attn = uniform_attention(assoc);
  DyrepParams p = make_params(d, 1, 4);
  Tensor h = aggregate_attention(2, state, attn, assoc, p, 0, AttentionMode::kDyrep);
  for (int i = 0; i < d; ++i) EXPECT_DOUBLE_EQ(h.data()[i], 0.0);
}

TEST(AggregateAttention, LdgModeUsesNonzeroPartnersPerType) {
  const int d = 2, r = 2, n = 4;
  NodeState state(n, d);
  state.z.values() = {1, 1, 2, 2, 3, 3, 4, 4};
  AssociationState assoc(n);  // empty: must be ignored in LDG mode
  AttentionState attn(n, r);
  // u=0 attends to node 2 on type 0 and node 3 on type 1
  attn.s.data()[(0 * n + 2) * r + 0] = 1.0;
  attn.s.data()[(0 * n + 3) * r + 1] = 1.0;
  DyrepParams p = make_params(d, r, 5);
  std::vector<double> eye = {1, 0, 0, 1};
  p.neigh_proj = Tensor::leaf({d, d}, eye);

  Tensor h0 = aggregate_attention(0, state, attn, assoc, p, 0, AttentionMode::kLdgLearned);
  Tensor h1 = aggregate_attention(0, state, attn, assoc, p, 1, AttentionMode::kLdgLearned);
  EXPECT_NEAR(h0.data()[0], 3.0, 1e-12);
  EXPECT_NEAR(h1.data()[0], 4.0, 1e-12);
}

TEST(UpdateNode, AllZeroInputsGiveZeroWithTanh) {
  const int d = 3;
  NodeState state(2, d);
  DyrepParams p = make_params(d, 1, 6);
  UpdateConfig cfg;
  Tensor out = update_node(0, {Tensor::zeros({1, d})}, state, p, 0.0, cfg);
  for (int i = 0; i < d; ++i) EXPECT_DOUBLE_EQ(out.data()[i], 0.0);
}

TEST(UpdateNode, ZeroTimeShiftRemovesWaitingTimeDependence) {
  const int d = 3;
  NodeState state(2, d);
  Rng rng(7);
  for (double& x : state.z.values()) x = rng.normal();
  DyrepParams p = make_params(d, 1, 8);
  p.time_shift = Tensor::leaf({1, d}, std::vector<double>(static_cast<size_t>(d), 0.0));
  UpdateConfig cfg;
  Tensor agg = Tensor::from({1, d}, {0.1, -0.2, 0.3});
  Tensor a = update_node(0, {agg}, state, p, 1.0, cfg);
  Tensor b = update_node(0, {agg}, state, p, 57.0, cfg);
  for (int i = 0; i < d; ++i) EXPECT_DOUBLE_EQ(a.data()[i], b.data()[i]);
}

TEST(UpdateNode, NegativeWaitingTimeRejected) {
  const int d = 2;
  NodeState state(2, d);
  state.last_time[0] = 10.0;
  DyrepParams p = make_params(d, 1, 9);
  UpdateConfig cfg;
  EXPECT_THROW(update_node(0, {Tensor::zeros({1, d})}, state, p, 5.0, cfg),
               ContractError);
}

// straight-line re-evaluation of the update equation
TEST(UpdateNode, MatchesHandRecomputation) {
  const int d = 2, n = 3;
  NodeState state(n, d);
  Rng rng(10);
  for (double& x : state.z.values()) x = rng.normal();
  state.last_time[1] = 2.0;
  DyrepParams p = make_params(d, 1, 11);
  UpdateConfig cfg;
  cfg.time_scale = 2.0;

  Tensor agg = Tensor::from({1, d}, {0.4, -0.6});
  const double tau = 5.0;
  Tensor out = update_node(1, {agg}, state, p, tau, cfg);

  const double dt_scaled = (tau - 2.0) / 2.0;
  for (int j = 0; j < d; ++j) {
    double pre = 0.0;
    for (int i = 0; i < d; ++i) {
      pre += agg.data()[i] * p.attn_in.data()[i * d + j];
      pre += state.z.data()[1 * d + i] * p.self_prop.data()[i * d + j];
    }
    pre += dt_scaled * p.time_shift.data()[j];
    EXPECT_NEAR(out.data()[j], std::tanh(pre), 1e-12);
  }
}

TEST(UpdateNode, TermIsolation) {
  const int d = 3;
  NodeState state(2, d);
  Rng rng(12);
  for (double& x : state.z.values()) x = rng.normal();
  UpdateConfig cfg;
  Tensor agg1 = Tensor::from({1, d}, {1.0, 2.0, 3.0});
  Tensor agg2 = Tensor::from({1, d}, {-5.0, 0.5, 9.0});

  // zero attention weight: output invariant to the aggregate
  DyrepParams p = make_params(d, 1, 13);
  p.attn_in = Tensor::leaf({d, d}, std::vector<double>(static_cast<size_t>(d) * d, 0.0));
  Tensor a = update_node(0, {agg1}, state, p, 1.0, cfg);
  Tensor b = update_node(0, {agg2}, state, p, 1.0, cfg);
  for (int i = 0; i < d; ++i) EXPECT_DOUBLE_EQ(a.data()[i], b.data()[i]);

  // zero self-propagation: output invariant to the old embedding
  DyrepParams q = make_params(d, 1, 14);
  q.self_prop = Tensor::leaf({d, d}, std::vector<double>(static_cast<size_t>(d) * d, 0.0));
  Tensor c = update_node(0, {agg1}, state, q, 1.0, cfg);
  state.z.data()[0] += 3.5;
  Tensor e = update_node(0, {agg1}, state, q, 1.0, cfg);
  for (int i = 0; i < d; ++i) EXPECT_DOUBLE_EQ(c.data()[i], e.data()[i]);
}

Event make_event(int u, int v, double tau, int k) {
  Event e;
  e.u = u;
  e.v = v;
  e.tau = tau;
  e.k = k;
  return e;
}

TEST(DyrepAttentionUpdate, NonAssociatedCommunicationLeavesSBitwise) {
  AssociationState assoc(4);
  assoc.add_edge(0, 1);
  AttentionState s = uniform_attention(assoc);
  std::vector<double> before = s.s.values();
  AttentionState after = dyrep_attention_update(make_event(2, 3, 1.0, 1), 0.8, s, assoc);
  EXPECT_EQ(after.s.values(), before);
}

TEST(DyrepAttentionUpdate, AssociatedCommunicationRenormalizesTouchedRows) {
  AssociationState assoc(4);
  assoc.add_edge(0, 1);
  assoc.add_edge(0, 2);
  AttentionState s = uniform_attention(assoc);
  AttentionState after = dyrep_attention_update(make_event(0, 1, 1.0, 1), 0.7, s, assoc);

  // increment then renormalize: row 0 had (0.5, 0.5), becomes (1.2, 0.5)/1.7
  EXPECT_NEAR(after.at(0, 1, 0), 1.2 / 1.7, 1e-12);
  EXPECT_NEAR(after.at(0, 2, 0), 0.5 / 1.7, 1e-12);
  // row 1 had a single neighbor: stays exactly 1
  EXPECT_DOUBLE_EQ(after.at(1, 0, 0), 1.0);
}

TEST(DyrepAttentionUpdate, FirstAssociationGivesAttentionExactlyOne) {
  AssociationState assoc(3);
  AttentionState s = init_dyrep_attention(assoc);
  Event e = make_event(0, 2, 4.0, 0);
  AssociationState assoc_after = assoc.apply_association_event(e);
  AttentionState after = dyrep_attention_update(e, 0.5, s, assoc_after);
  EXPECT_DOUBLE_EQ(after.at(0, 2, 0), 1.0);
  EXPECT_DOUBLE_EQ(after.at(2, 0, 0), 1.0);
}

TEST(DyrepAttentionUpdate, RowsSumToOneOverRandomStreams) {
  Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + rng.uniform_int(5);
    AssociationState assoc(n);
    AttentionState s = init_dyrep_attention(assoc);
    double tau = 0.0;
    for (int step = 0; step < 120; ++step) {
      tau += rng.uniform01();
      int u = rng.uniform_int(n);
      int v;
      do {
        v = rng.uniform_int(n);
      } while (v == u);
      const int k = rng.uniform01() < 0.3 ? 0 : 1;
      Event e = make_event(u, v, tau, k);
      if (k == 0) assoc = assoc.apply_association_event(e);
      s = dyrep_attention_update(e, 0.1 + rng.uniform01(), s, assoc);

      for (int node = 0; node < n; ++node) {
        auto nb = assoc.neighbors(node);
        if (nb.empty()) continue;
        double total = 0.0;
        for (int i : nb) total += s.at(node, i, 0);
        ASSERT_NEAR(total, 1.0, 1e-9) << "trial " << trial << " step " << step;
      }
    }
  }
}

TEST(Recursion, ReplayIsBitwiseDeterministic) {
  ModelConfig cfg;
  cfg.n_nodes = 6;
  cfg.d = 4;
  cfg.attention = AttentionMode::kDyrep;
  cfg.interaction = InteractionKind::kBilinear;

  AssociationState assoc(6);
  assoc.add_edge(0, 1);
  assoc.add_edge(2, 3);

  std::vector<Event> events;
  Rng rng(77);
  double tau = 0.0;
  for (int i = 0; i < 40; ++i) {
    tau += rng.uniform01();
    int u = rng.uniform_int(6);
    int v;
    do {
      v = rng.uniform_int(6);
    } while (v == u);
    events.push_back(make_event(u, v, tau, rng.uniform01() < 0.2 ? 0 : 1));
  }

  auto run = [&]() {
    Model model(cfg, 123);
    model.reset_state(assoc);
    Rng sample_rng(9);
    for (const Event& e : events) model.process_event(e, sample_rng);
    return model.node_state().z.values();
  };
  auto za = run();
  auto zb = run();
  EXPECT_EQ(za, zb);
}

}  // namespace
}  // namespace ldg
