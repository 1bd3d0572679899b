#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ldg/attention.hpp"
#include "ldg/checkpoint.hpp"
#include "ldg/dyrep.hpp"
#include "ldg/encoder.hpp"
#include "ldg/event.hpp"
#include "ldg/intensity.hpp"
#include "ldg/rng.hpp"

namespace ldg {

enum class InteractionKind { kConcat, kBilinear };

struct ModelConfig {
  int n_nodes = 0;
  int d = 32;
  int r = 2;  // forced to 1 in DyRep mode
  AttentionMode attention = AttentionMode::kDyrep;
  InteractionKind interaction = InteractionKind::kConcat;
  PriorKind prior = PriorKind::kUniform;
  double temperature = 0.5;
  bool hard_sample = true;
  Aggregator aggregator = Aggregator::kSum;
  Nonlinearity sigma = Nonlinearity::kTanh;
  double time_scale = 1.0;
  double dt_clamp = 100.0;
  /// Scale of the fixed random initial embeddings (0 = all-zero start).
  /// Zero-started embeddings stay nearly collinear -- node identity then
  /// enters only through scalar waiting times against shared weights -- and
  /// the intensity cannot separate pairs; a seeded random fingerprint per
  /// node breaks that while staying reproducible.
  double z_init_scale = 0.3;

  int edge_types() const { return attention == AttentionMode::kDyrep ? 1 : r; }
  bool learned_attention() const { return attention == AttentionMode::kLdgLearned; }
};

/// Point-process model over a dynamic graph: recursive embeddings, evolving
/// attention (hard-coded rule, learned encoder, or frozen random), and the
/// conditional intensity used for both training and ranking.
class Model {
 public:
  Model(ModelConfig cfg, uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  ModelConfig& config() { return cfg_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  DyrepParams dyrep_params() const;
  IntensityParams intensity_params() const;
  EncoderParams encoder_params() const;
  PriorConfig prior_config() const;

  /// Resets embeddings to zero and attention to its mode-specific initial
  /// value (uniform association rows for DyRep; the run's fixed random
  /// tensor otherwise). Epochs always start here.
  void reset_state(const AssociationState& assoc_init);

  NodeState& node_state() { return state_; }
  AttentionState& attention() { return attn_; }
  const AttentionState& attention() const { return attn_; }
  AssociationState& assoc() { return assoc_; }
  const AttentionState& initial_attention() const { return attn_init_; }

  struct EventOutcome {
    Tensor lambda;                      // intensity of the event pair, pre-update
    std::optional<Tensor> posterior;    // learned mode only
  };

  /// Advances the recursion by one event: intensity at the pre-event state,
  /// both endpoint embeddings updated (each from the other's neighbor
  /// aggregate), association applied for k = 0, then the mode's attention
  /// update. `sample_rng` drives the Gumbel draw in learned mode.
  EventOutcome process_event(const Event& e, Rng& sample_rng);

  /// Intensity for an arbitrary pair at the current state.
  Tensor intensity(int u, int v, int k) const;

  /// lambda(u, v') for every candidate v' != u at the current state.
  /// Plain values; meant for ranking outside any tape.
  std::vector<double> score_partners(int u, int k) const;

  /// Cuts tape links at batch boundaries.
  void detach_state();

 private:
  ModelConfig cfg_;
  ParamStore params_;
  NodeState state_;
  AttentionState attn_;
  AttentionState attn_init_;  // fixed random init for the LDG modes
  Tensor z_init_;             // fixed initial embeddings, shared by all epochs
  AssociationState assoc_;
};

}  // namespace ldg
