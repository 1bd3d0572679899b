#include "ldg/model.hpp"

#include <cmath>

namespace ldg {

namespace {

std::vector<double> glorot_uniform(int fan_in, int fan_out, int count, Rng& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  std::vector<double> v(static_cast<size_t>(count));
  for (double& x : v) x = (2.0 * rng.uniform01() - 1.0) * a;
  return v;
}

std::vector<double> normal_init(double sigma, int count, Rng& rng) {
  std::vector<double> v(static_cast<size_t>(count));
  for (double& x : v) x = sigma * rng.normal();
  return v;
}

}  // namespace

Model::Model(ModelConfig cfg, uint64_t seed) : cfg_(std::move(cfg)) {
  require(cfg_.n_nodes >= 2, "Model: need at least two nodes");
  require(cfg_.d >= 1, "Model: embedding width must be positive");
  require(cfg_.r >= 1, "Model: need at least one edge type");
  const int d = cfg_.d;
  const int r = cfg_.edge_types();

  Rng rng(seed);

  params_.add("attn_in", {r * d, d}, glorot_uniform(r * d, d, r * d * d, rng));
  params_.add("self_prop", {d, d}, glorot_uniform(d, d, d * d, rng));
  params_.add("time_shift", {1, d}, normal_init(0.1, d, rng));
  params_.add("neigh_proj", {d, d}, glorot_uniform(d, d, d * d, rng));

  // raw rate chosen so softplus(raw) = 1
  const double raw_unit_rate = std::log(std::exp(1.0) - 1.0);
  for (int k = 0; k < 2; ++k) {
    const std::string kind = k == 0 ? "k0" : "k1";
    params_.add("rate_raw_" + kind, {1}, {raw_unit_rate});
    params_.add("compat_concat_" + kind, {2 * d},
                normal_init(1.0 / std::sqrt(2.0 * d), 2 * d, rng));
    params_.add("compat_bilinear_" + kind, {d, d, 1},
                normal_init(1.0 / d, d * d, rng));
  }

  if (cfg_.learned_attention()) {
    // biases start slightly off zero: embeddings are zero at reset, and an
    // exactly-zero bias would park every relu at its kink
    auto add_mlp = [&](const std::string& stem, int in, int hidden, int out) {
      params_.add(stem + "_w1", {in, hidden}, glorot_uniform(in, hidden, in * hidden, rng));
      params_.add(stem + "_b1", {hidden}, normal_init(0.05, hidden, rng));
      params_.add(stem + "_w2", {hidden, out}, glorot_uniform(hidden, out, hidden * out, rng));
      params_.add(stem + "_b2", {out}, normal_init(0.05, out, rng));
    };
    const int out_dim = prior_config().out_dim(r);
    add_mlp("enc_node1", d, d, d);
    add_mlp("enc_edge1", d, d, d);
    add_mlp("enc_node2", d, d, d);
    add_mlp("enc_edge2", d, d, out_dim);
    params_.add("enc_pair1", {d, d, d}, normal_init(1.0 / d, d * d * d, rng));
    params_.add("enc_pair2", {d, d, d}, normal_init(1.0 / d, d * d * d, rng));
  }

  if (cfg_.attention != AttentionMode::kDyrep) {
    Rng attn_rng(seed ^ 0x5eed5a17u);
    attn_init_ = init_random_attention(cfg_.n_nodes, r, prior_config(), attn_rng);
  }

  Rng z_rng(seed ^ 0x21e1u);
  z_init_ = Tensor::from({cfg_.n_nodes, d},
                         normal_init(cfg_.z_init_scale, cfg_.n_nodes * d, z_rng));
}

DyrepParams Model::dyrep_params() const {
  return {params_.at("attn_in"), params_.at("self_prop"), params_.at("time_shift"),
          params_.at("neigh_proj")};
}

IntensityParams Model::intensity_params() const {
  IntensityParams p;
  for (int k = 0; k < 2; ++k) {
    const std::string kind = k == 0 ? "k0" : "k1";
    p.rate_raw[k] = params_.at("rate_raw_" + kind);
    p.compat_concat[k] = params_.at("compat_concat_" + kind);
    p.compat_bilinear[k] = params_.at("compat_bilinear_" + kind);
  }
  return p;
}

EncoderParams Model::encoder_params() const {
  require(cfg_.learned_attention(), "encoder_params: not in learned mode");
  auto mlp = [&](const std::string& stem) {
    return Mlp{params_.at(stem + "_w1"), params_.at(stem + "_b1"),
               params_.at(stem + "_w2"), params_.at(stem + "_b2")};
  };
  return {mlp("enc_node1"), mlp("enc_edge1"), mlp("enc_node2"), mlp("enc_edge2"),
          params_.at("enc_pair1"), params_.at("enc_pair2")};
}

PriorConfig Model::prior_config() const {
  return cfg_.prior == PriorKind::kSparse ? PriorConfig::sparse(cfg_.edge_types())
                                          : PriorConfig::uniform(cfg_.edge_types());
}

void Model::reset_state(const AssociationState& assoc_init) {
  require(assoc_init.n_nodes() == cfg_.n_nodes, "reset_state: node count mismatch");
  state_ = NodeState(cfg_.n_nodes, cfg_.d);
  state_.z = z_init_.detach();
  assoc_ = assoc_init;
  if (cfg_.attention == AttentionMode::kDyrep) {
    attn_ = init_dyrep_attention(assoc_);
  } else {
    attn_.s = attn_init_.s.detach();
  }
}

Tensor Model::intensity(int u, int v, int k) const {
  Tensor zu = gather_rows(state_.z, {u});
  Tensor zv = gather_rows(state_.z, {v});
  IntensityParams p = intensity_params();
  return cfg_.interaction == InteractionKind::kBilinear
             ? intensity_bilinear(zu, zv, k, p)
             : intensity_concat(zu, zv, k, p);
}

Model::EventOutcome Model::process_event(const Event& e, Rng& sample_rng) {
  require(e.u != e.v, "process_event: self-loop");
  require(e.u >= 0 && e.v >= 0 && e.u < cfg_.n_nodes && e.v < cfg_.n_nodes,
          "process_event: node out of range");

  EventOutcome out;
  out.lambda = intensity(e.u, e.v, e.k);

  // encoder runs on the pre-update embeddings, for every event kind
  std::optional<EncodeResult> enc;
  if (cfg_.learned_attention()) {
    enc = encode_edge(e.u, e.v, state_.z, encoder_params(),
                      prior_config().out_dim(cfg_.edge_types()));
    out.posterior = enc->posterior;
  }

  // neighbor aggregates at the pre-event state, one per edge type
  const int r = cfg_.edge_types();
  DyrepParams dp = dyrep_params();
  UpdateConfig ucfg{cfg_.aggregator, cfg_.sigma, cfg_.time_scale, cfg_.dt_clamp};
  std::vector<Tensor> agg_u(static_cast<size_t>(r)), agg_v(static_cast<size_t>(r));
  for (int c = 0; c < r; ++c) {
    agg_u[static_cast<size_t>(c)] =
        aggregate_attention(e.u, state_, attn_, assoc_, dp, c, cfg_.attention,
                            cfg_.aggregator);
    agg_v[static_cast<size_t>(c)] =
        aggregate_attention(e.v, state_, attn_, assoc_, dp, c, cfg_.attention,
                            cfg_.aggregator);
  }

  // each endpoint is driven by the other endpoint's neighborhood
  Tensor new_zu = update_node(e.u, agg_v, state_, dp, e.tau, ucfg);
  Tensor new_zv = update_node(e.v, agg_u, state_, dp, e.tau, ucfg);
  state_.z = row_update2(state_.z, e.u, e.v, reshape(new_zu, {cfg_.d}),
                         reshape(new_zv, {cfg_.d}));
  state_.last_time[static_cast<size_t>(e.u)] = e.tau;
  state_.last_time[static_cast<size_t>(e.v)] = e.tau;
  const long idx = std::max(state_.last_index[static_cast<size_t>(e.u)],
                            state_.last_index[static_cast<size_t>(e.v)]) + 1;
  state_.last_index[static_cast<size_t>(e.u)] = idx;
  state_.last_index[static_cast<size_t>(e.v)] = idx;

  if (e.is_association()) assoc_ = assoc_.apply_association_event(e);

  switch (cfg_.attention) {
    case AttentionMode::kDyrep:
      attn_ = dyrep_attention_update(e, out.lambda.item(), attn_, assoc_);
      break;
    case AttentionMode::kLdgLearned: {
      AttentionSample sample =
          sample_attention_logits(enc->logits, prior_config(), r,
                                  cfg_.temperature, cfg_.hard_sample, sample_rng);
      attn_.s = set_pair_fiber(attn_.s, e.u, e.v, sample.fiber);
      break;
    }
    case AttentionMode::kLdgRandomFrozen:
      break;  // S stays at its initial draw
  }
  return out;
}

std::vector<double> Model::score_partners(int u, int k) const {
  std::vector<double> scores(static_cast<size_t>(cfg_.n_nodes), 0.0);
  for (int v = 0; v < cfg_.n_nodes; ++v) {
    if (v == u) continue;
    scores[static_cast<size_t>(v)] = intensity(u, v, k).item();
  }
  return scores;
}

void Model::detach_state() {
  state_.detach();
  attn_.detach();
}

}  // namespace ldg
