#pragma once

#include <functional>
#include <vector>

#include "ldg/event.hpp"
#include "ldg/model.hpp"

namespace ldg {

struct TrainConfig {
  int batch_events = 200;       // P
  int nonevent_multiplier = 5;  // M = multiplier * P
  double lr = 2e-4;
  int epochs = 5;
  uint64_t seed = 0;
  double val_fraction = 0.10;  // tail of the training stream used for early stop
  bool early_stopping = true;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

/// The three loss terms of one minibatch; total is their exact sum.
struct LossBreakdown {
  Tensor total;
  Tensor events;
  Tensor nonevents;
  Tensor kl;

  double l_events() const { return events.item(); }
  double l_nonevents() const { return nonevents.item(); }
  double l_kl() const { return kl.item(); }
  double l_total() const { return total.item(); }
};

/// A sampled non-occurring pair, evaluated at the state just before its
/// anchor event.
struct NonEvent {
  int u = 0;
  int v = 0;
  int k = 1;
  size_t anchor = 0;  // index into the batch
};

/// Draws `m` nonevents (m = multiplier * batch size), each anchored to a
/// batch event and excluding that event's own pair in either order. Kinds
/// follow the batch's empirical kind frequencies. Pairs are drawn uniformly
/// with replacement; a warning flag is set when the graph is so small that
/// distinct draws are impossible.
std::vector<NonEvent> sample_nonevents(const std::vector<Event>& batch,
                                       int n_nodes, int m, Rng& rng,
                                       bool* replacement_warning = nullptr);

/// Sweeps the batch in order through the model recursion and assembles
/// L = sum_p -log lambda_p + sum_m lambda_m + KL. Gradients flow through the
/// entire in-batch sequence; the caller detaches state afterwards.
/// Throws DivergenceError naming the event index if any intensity goes
/// non-finite.
LossBreakdown batch_loss(Model& model, const std::vector<Event>& batch,
                         const std::vector<NonEvent>& nonevents, Rng& sample_rng);

class AdamOptimizer {
 public:
  AdamOptimizer(ParamStore& params, double lr, double beta1, double beta2,
                double eps);
  void step();

 private:
  ParamStore& params_;
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double l_events = 0.0;     // epoch mean per event
  double l_nonevents = 0.0;  // epoch mean per event
  double l_kl = 0.0;         // epoch mean per event
  double val_mar = 0.0;
  double val_hits10 = 0.0;
  double wall_seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> epochs;
  int best_epoch = 0;  // 1-based; params are restored to this epoch
  bool early_stopped = false;
  bool diverged = false;
};

/// Epoch loop: reset state, sweep minibatches with truncated-backprop
/// boundaries, Adam step per batch, then validation MAR on the held-out
/// tail. Stops when validation MAR worsens (patience 1) and restores the
/// best epoch's parameters. In frozen-random mode the attention tensor is
/// generated once and never updated.
TrainResult train(Model& model, const EventStream& train_stream,
                  const AssociationState& assoc_init, const TrainConfig& cfg,
                  const std::function<void(const EpochMetrics&)>& on_epoch =
                      nullptr);

/// Median inter-event gap of a stream (the waiting-time scale).
double median_gap(const EventStream& stream);

}  // namespace ldg
