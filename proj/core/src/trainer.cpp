#include "ldg/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "ldg/evaluator.hpp"

namespace ldg {

std::vector<NonEvent> sample_nonevents(const std::vector<Event>& batch,
                                       int n_nodes, int m, Rng& rng,
                                       bool* replacement_warning) {
  require(!batch.empty(), "sample_nonevents: empty batch");
  require(n_nodes >= 2, "sample_nonevents: need at least two nodes");
  require(m % static_cast<int>(batch.size()) == 0,
          "sample_nonevents: m must be a multiple of the batch size");
  if (static_cast<long>(n_nodes) * (n_nodes - 1) <= 2)
    throw ConfigError("sample_nonevents: graph has no pair besides the anchor");
  const int per_event = m / static_cast<int>(batch.size());

  if (replacement_warning)
    *replacement_warning =
        static_cast<long>(n_nodes) * (n_nodes - 1) - 2 < per_event;

  size_t n_comm = 0;
  for (const Event& e : batch) n_comm += e.k == 1 ? 1 : 0;
  const double p_comm = static_cast<double>(n_comm) / static_cast<double>(batch.size());

  std::vector<NonEvent> out;
  out.reserve(static_cast<size_t>(m));
  for (size_t p = 0; p < batch.size(); ++p) {
    const Event& e = batch[p];
    for (int j = 0; j < per_event; ++j) {
      NonEvent ne;
      ne.anchor = p;
      ne.k = rng.uniform01() < p_comm ? 1 : 0;
      do {
        ne.u = rng.uniform_int(n_nodes);
        ne.v = rng.uniform_int(n_nodes);
      } while (ne.u == ne.v || (ne.u == e.u && ne.v == e.v) ||
               (ne.u == e.v && ne.v == e.u));
      out.push_back(ne);
    }
  }
  return out;
}

LossBreakdown batch_loss(Model& model, const std::vector<Event>& batch,
                         const std::vector<NonEvent>& nonevents, Rng& sample_rng) {
  LossBreakdown loss;
  loss.events = Tensor::scalar(0.0);
  loss.nonevents = Tensor::scalar(0.0);

  std::vector<Tensor> posteriors;
  if (model.config().learned_attention()) posteriors.reserve(batch.size());

  size_t ne_cursor = 0;
  for (size_t p = 0; p < batch.size(); ++p) {
    // survival samples anchored here see the same pre-event state as the
    // event's own intensity
    while (ne_cursor < nonevents.size() && nonevents[ne_cursor].anchor == p) {
      const NonEvent& ne = nonevents[ne_cursor];
      Tensor lam = model.intensity(ne.u, ne.v, ne.k);
      if (!std::isfinite(lam.item()))
        throw DivergenceError("non-finite nonevent intensity at batch event " +
                              std::to_string(p));
      loss.nonevents = add(loss.nonevents, lam);
      ++ne_cursor;
    }

    Model::EventOutcome outcome = model.process_event(batch[p], sample_rng);
    const double lam_value = outcome.lambda.item();
    if (!std::isfinite(lam_value) || lam_value <= 0.0)
      throw DivergenceError("non-finite intensity at batch event " +
                            std::to_string(p));
    loss.events = add(loss.events, neg(log_t(outcome.lambda)));
    if (outcome.posterior) posteriors.push_back(*outcome.posterior);
  }

  if (model.config().learned_attention()) {
    loss.kl = model.config().prior == PriorKind::kSparse
                  ? kl_sparse(posteriors, model.prior_config())
                  : kl_uniform(posteriors);
  } else {
    loss.kl = Tensor::scalar(0.0);
  }

  loss.total = add(add(loss.events, loss.nonevents), loss.kl);
  if (!std::isfinite(loss.total.item()))
    throw DivergenceError("non-finite batch loss");
  return loss;
}

AdamOptimizer::AdamOptimizer(ParamStore& params, double lr, double beta1,
                             double beta2, double eps)
    : params_(params), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& [name, t] : params_.entries()) {
    m_.emplace_back(t.values().size(), 0.0);
    v_.emplace_back(t.values().size(), 0.0);
  }
}

void AdamOptimizer::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  size_t idx = 0;
  for (auto& [name, t] : params_.entries_mut()) {
    auto& m = m_[idx];
    auto& v = v_[idx];
    Tensor& param = t;
    const auto& g = param.grad();
    double* w = param.data();
    for (size_t i = 0; i < g.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
    ++idx;
  }
}

double median_gap(const EventStream& stream) {
  if (stream.events.size() < 2) return 1.0;
  std::vector<double> gaps;
  gaps.reserve(stream.events.size() - 1);
  for (size_t i = 1; i < stream.events.size(); ++i)
    gaps.push_back(stream.events[i].tau - stream.events[i - 1].tau);
  std::sort(gaps.begin(), gaps.end());
  double med = gaps[gaps.size() / 2];
  if (gaps.size() % 2 == 0) med = 0.5 * (med + gaps[gaps.size() / 2 - 1]);
  return med > 0.0 ? med : 1.0;
}

namespace {

std::vector<std::vector<double>> snapshot_params(const ParamStore& params) {
  std::vector<std::vector<double>> out;
  out.reserve(params.size());
  for (const auto& [name, t] : params.entries()) out.push_back(t.values());
  return out;
}

void restore_params(ParamStore& params, const std::vector<std::vector<double>>& snap) {
  size_t idx = 0;
  for (auto& [name, t] : params.entries_mut()) {
    std::copy(snap[idx].begin(), snap[idx].end(), t.data());
    ++idx;
  }
}

}  // namespace

TrainResult train(Model& model, const EventStream& train_stream,
                  const AssociationState& assoc_init, const TrainConfig& cfg,
                  const std::function<void(const EpochMetrics&)>& on_epoch) {
  require(!train_stream.empty(), "train: empty stream");
  require(cfg.batch_events >= 1, "train: batch size must be positive");
  if (model.config().attention == AttentionMode::kDyrep &&
      assoc_init.edge_count() == 0) {
    bool has_assoc_events = false;
    for (const Event& e : train_stream.events) has_assoc_events |= e.k == 0;
    if (!has_assoc_events)
      throw ConfigError(
          "DyRep attention requires an association graph (initial edges or "
          "k=0 events)");
  }

  // final fraction of the training stream is held out for validation
  const size_t n_total = train_stream.events.size();
  size_t n_fit = n_total;
  if (cfg.val_fraction > 0.0) {
    n_fit = n_total - static_cast<size_t>(static_cast<double>(n_total) * cfg.val_fraction);
    n_fit = std::max<size_t>(n_fit, 1);
  }
  EventStream fit_part, val_part;
  fit_part.n_nodes = val_part.n_nodes = train_stream.n_nodes;
  fit_part.events.assign(train_stream.events.begin(),
                         train_stream.events.begin() + static_cast<long>(n_fit));
  val_part.events.assign(train_stream.events.begin() + static_cast<long>(n_fit),
                         train_stream.events.end());

  model.config().time_scale = median_gap(train_stream);

  AdamOptimizer opt(model.params(), cfg.lr, cfg.adam_beta1, cfg.adam_beta2,
                    cfg.adam_eps);
  TrainResult result;
  auto best_params = snapshot_params(model.params());
  double best_val_mar = std::numeric_limits<double>::infinity();

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng nonevent_rng(cfg.seed * 1000003u + static_cast<uint64_t>(epoch));
    Rng sample_rng(cfg.seed * 7778777u + static_cast<uint64_t>(epoch));

    model.reset_state(assoc_init);
    double sum_ev = 0.0, sum_ne = 0.0, sum_kl = 0.0;

    try {
      for (size_t start = 0; start < fit_part.events.size();
           start += static_cast<size_t>(cfg.batch_events)) {
        const size_t stop =
            std::min(fit_part.events.size(), start + static_cast<size_t>(cfg.batch_events));
        std::vector<Event> batch(fit_part.events.begin() + static_cast<long>(start),
                                 fit_part.events.begin() + static_cast<long>(stop));
        std::vector<NonEvent> nonevents = sample_nonevents(
            batch, model.config().n_nodes,
            cfg.nonevent_multiplier * static_cast<int>(batch.size()), nonevent_rng);

        Tape tape;
        LossBreakdown loss;
        {
          Tape::Scope scope(tape);
          loss = batch_loss(model, batch, nonevents, sample_rng);
          model.params().zero_all_grads();
          tape.backward(loss.total);
        }
        opt.step();
        model.detach_state();

        sum_ev += loss.l_events();
        sum_ne += loss.l_nonevents();
        sum_kl += loss.l_kl();
      }
    } catch (const DivergenceError&) {
      restore_params(model.params(), best_params);
      result.diverged = true;
      return result;
    }

    // validation continues the recursion over the held-out tail, no gradients
    EpochMetrics metrics;
    metrics.epoch = epoch;
    const double denom = static_cast<double>(fit_part.events.size());
    metrics.l_events = sum_ev / denom;
    metrics.l_nonevents = sum_ne / denom;
    metrics.l_kl = sum_kl / denom;
    bool val_has_comm = false;
    for (const Event& e : val_part.events) val_has_comm |= e.k == 1;
    if (val_has_comm) {
      Rng val_rng(cfg.seed * 90001u + static_cast<uint64_t>(epoch));
      RankResult vr = evaluate(model, val_part, val_rng, {});
      metrics.val_mar = vr.mar;
      metrics.val_hits10 = vr.hits10;
    }
    metrics.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.epochs.push_back(metrics);
    if (on_epoch) on_epoch(metrics);

    const double val_score = val_has_comm ? metrics.val_mar : metrics.l_events;
    if (val_score < best_val_mar) {
      best_val_mar = val_score;
      best_params = snapshot_params(model.params());
      result.best_epoch = epoch;
    } else if (cfg.early_stopping) {
      result.early_stopped = true;
      break;
    } else {
      // without early stopping the final parameters stand
      best_params = snapshot_params(model.params());
      result.best_epoch = epoch;
    }
  }

  if (cfg.early_stopping) restore_params(model.params(), best_params);
  return result;
}

}  // namespace ldg
