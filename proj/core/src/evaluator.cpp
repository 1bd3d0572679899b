#include "ldg/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ldg {

double rank_from_scores(const std::vector<double>& scores, int u, int true_v) {
  require(u != true_v, "rank_from_scores: u == true_v");
  const double s_true = scores[static_cast<size_t>(true_v)];
  double better = 0.0, ties = 0.0;
  for (size_t v = 0; v < scores.size(); ++v) {
    if (static_cast<int>(v) == u || static_cast<int>(v) == true_v) continue;
    if (scores[v] > s_true) better += 1.0;
    else if (scores[v] == s_true) ties += 1.0;
  }
  return 1.0 + better + 0.5 * ties;
}

FrequencyTable::FrequencyTable(const EventStream& train_stream, int n_nodes)
    : n_(n_nodes), counts_(static_cast<size_t>(n_nodes) * n_nodes, 0.0) {
  for (const Event& e : train_stream.events) {
    if (e.k != 1) continue;
    counts_[static_cast<size_t>(e.u) * n_ + e.v] += 1.0;
    counts_[static_cast<size_t>(e.v) * n_ + e.u] += 1.0;
  }
}

std::vector<double> FrequencyTable::row(int u) const {
  require(u >= 0 && u < n_, "FrequencyTable::row: node out of range");
  const double* base = counts_.data() + static_cast<size_t>(u) * n_;
  const double total = std::accumulate(base, base + n_, 0.0);
  if (total <= 0.0) return {};
  std::vector<double> out(base, base + n_);
  for (double& x : out) x /= total;
  return out;
}

std::vector<double> blend_scores(const std::vector<double>& model_scores, int u,
                                 const std::vector<double>& freq_row, double alpha) {
  require(alpha >= 0.0 && alpha <= 1.0, "blend_scores: alpha outside [0,1]");
  double total = 0.0;
  for (size_t v = 0; v < model_scores.size(); ++v)
    if (static_cast<int>(v) != u) total += model_scores[v];
  std::vector<double> out(model_scores.size(), 0.0);
  for (size_t v = 0; v < model_scores.size(); ++v) {
    if (static_cast<int>(v) == u) continue;
    out[v] = total > 0.0 ? model_scores[v] / total : model_scores[v];
  }
  if (freq_row.empty()) return out;  // unseen source: model scores pass through
  for (size_t v = 0; v < out.size(); ++v) {
    if (static_cast<int>(v) == u) continue;
    out[v] = alpha * out[v] + (1.0 - alpha) * freq_row[v];
  }
  return out;
}

namespace {

void finalize(RankResult& r) {
  if (r.ranks.empty()) return;
  double sum = 0.0, hits = 0.0;
  for (double rank : r.ranks) {
    sum += rank;
    hits += rank <= 10.0 ? 1.0 : 0.0;
  }
  r.mar = sum / static_cast<double>(r.ranks.size());
  r.hits10 = hits / static_cast<double>(r.ranks.size());
}

}  // namespace

RankResult evaluate(Model& model, const EventStream& test_stream, Rng& sample_rng,
                    const EvalOptions& opts) {
  bool any_comm = false;
  for (const Event& e : test_stream.events) any_comm |= e.k == 1;
  if (!any_comm) throw ConfigError("evaluate: no communication events to score");
  if (opts.blend_alpha < 1.0)
    require(opts.freq != nullptr, "evaluate: blending requires a frequency table");

  RankResult result;
  for (size_t i = 0; i < test_stream.events.size(); ++i) {
    const Event& e = test_stream.events[i];
    if (e.k == 1) {
      std::vector<double> scores = model.score_partners(e.u, e.k);
      if (opts.blend_alpha < 1.0)
        scores = blend_scores(scores, e.u, opts.freq->row(e.u), opts.blend_alpha);
      result.event_indices.push_back(i);
      result.ranks.push_back(rank_from_scores(scores, e.u, e.v));
      if (opts.dump) opts.dump->push_back({i, e.u, e.v, scores});
    }
    // the recursion consumes every event, scored or not
    model.process_event(e, sample_rng);
  }
  finalize(result);
  return result;
}

double roc_auc(const std::vector<int>& labels, const std::vector<double>& scores) {
  require(labels.size() == scores.size(), "roc_auc: size mismatch");
  size_t n_pos = 0;
  for (int y : labels) n_pos += y > 0 ? 1 : 0;
  const size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw ContractError("roc_auc: degenerate labels (all one class)");

  std::vector<size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });

  // average ranks over tie groups, then the Mann-Whitney statistic
  double pos_rank_sum = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (size_t k = i; k <= j; ++k)
      if (labels[order[k]] > 0) pos_rank_sum += avg_rank;
    i = j + 1;
  }
  const double u_stat =
      pos_rank_sum - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u_stat / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

AttentionAucReport attention_auc(const AttentionState& attn,
                                 const AssociationState& assoc) {
  require(attn.n() == assoc.n_nodes(), "attention_auc: node count mismatch");
  const int n = attn.n();
  const int r = attn.r();

  std::vector<int> labels;
  labels.reserve(static_cast<size_t>(n) * (n - 1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      labels.push_back(assoc.has_edge(i, j) ? 1 : 0);
    }

  AttentionAucReport report;
  std::vector<double> scores;
  scores.reserve(labels.size());
  for (int c = 0; c < r; ++c) {
    scores.clear();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        scores.push_back(attn.at(i, j, c));
      }
    report.per_type.push_back(roc_auc(labels, scores));
  }
  scores.clear();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double best = attn.at(i, j, 0);
      for (int c = 1; c < r; ++c) best = std::max(best, attn.at(i, j, c));
      scores.push_back(best);
    }
  report.pooled_max = roc_auc(labels, scores);
  return report;
}

RankResult no_learn_baseline(BaselineKind kind,
                             const std::optional<AssociationState>& assoc,
                             const EventStream& test_stream, int n_nodes,
                             const FrequencyTable* freq) {
  if (kind == BaselineKind::kAssoc)
    require(assoc.has_value(), "no_learn_baseline: assoc variant needs a graph");
  if (kind == BaselineKind::kFrequency)
    require(freq != nullptr, "no_learn_baseline: frequency variant needs a table");

  AssociationState running = assoc.value_or(AssociationState(n_nodes));
  RankResult result;
  for (size_t i = 0; i < test_stream.events.size(); ++i) {
    const Event& e = test_stream.events[i];
    if (e.k == 0) {
      running = running.apply_association_event(e);
      continue;
    }
    std::vector<double> scores(static_cast<size_t>(n_nodes), 0.0);
    switch (kind) {
      case BaselineKind::kAssoc: {
        std::vector<int> partners = running.neighbors(e.u);
        if (partners.empty()) {
          // no associations: fall back to the uniform-random score
          for (int v = 0; v < n_nodes; ++v)
            if (v != e.u) scores[static_cast<size_t>(v)] = 1.0;
        } else {
          const double w = 1.0 / static_cast<double>(partners.size());
          for (int v : partners) scores[static_cast<size_t>(v)] = w;
        }
        break;
      }
      case BaselineKind::kRandom:
        for (int v = 0; v < n_nodes; ++v)
          if (v != e.u) scores[static_cast<size_t>(v)] = 1.0;
        break;
      case BaselineKind::kFrequency: {
        std::vector<double> row = freq->row(e.u);
        if (!row.empty()) scores = std::move(row);
        break;
      }
    }
    result.event_indices.push_back(i);
    result.ranks.push_back(rank_from_scores(scores, e.u, e.v));
  }
  if (result.ranks.empty())
    throw ConfigError("no_learn_baseline: no communication events to score");
  finalize(result);
  return result;
}

}  // namespace ldg
