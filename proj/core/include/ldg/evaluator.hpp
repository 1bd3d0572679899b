#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ldg/event.hpp"
#include "ldg/model.hpp"

namespace ldg {

/// Ranking outcome over the scored (communication) test events.
struct RankResult {
  std::vector<size_t> event_indices;  // positions within the test stream
  std::vector<double> ranks;          // tie-averaged, in [1, N-1]
  double mar = 0.0;
  double hits10 = 0.0;
};

/// Tie-averaged rank of the true partner: 1 + #strictly-better + #ties/2.
/// `scores[u]` is ignored (a node is never its own candidate).
double rank_from_scores(const std::vector<double>& scores, int u, int true_v);

/// Per-source empirical partner distribution built from training
/// communication events (both directions of a contact count).
class FrequencyTable {
 public:
  FrequencyTable() = default;
  FrequencyTable(const EventStream& train_stream, int n_nodes);

  /// Normalized row for u, or an empty vector when u never communicated.
  std::vector<double> row(int u) const;
  int n_nodes() const { return n_; }

 private:
  int n_ = 0;
  std::vector<double> counts_;  // N x N
};

/// alpha * normalized model scores + (1 - alpha) * frequency row. An empty
/// frequency row passes the model scores through unchanged.
std::vector<double> blend_scores(const std::vector<double>& model_scores, int u,
                                 const std::vector<double>& freq_row, double alpha);

/// Optional per-event score dump (feeds the independent ranking oracle).
struct ScoreDumpRow {
  size_t event_index;
  int u;
  int true_v;
  std::vector<double> scores;  // length N; entry u is not a candidate
};

struct EvalOptions {
  /// 1.0 means pure model ranking; anything below mixes in the frequency
  /// table, which must then be provided.
  double blend_alpha = 1.0;
  const FrequencyTable* freq = nullptr;
  std::vector<ScoreDumpRow>* dump = nullptr;
};

/// Sweeps the test stream in order: every communication event is scored
/// against all candidate partners and then applied to advance the recursion
/// (association events advance it without scoring). No gradients, no
/// parameter mutation. Throws ConfigError when the stream holds no
/// communication events.
RankResult evaluate(Model& model, const EventStream& test_stream, Rng& sample_rng,
                    const EvalOptions& opts);

/// Mann-Whitney AUC with tie correction; NaN-free, throws on degenerate
/// label sets (all positive or all negative).
double roc_auc(const std::vector<int>& labels, const std::vector<double>& scores);

struct AttentionAucReport {
  std::vector<double> per_type;  // AUC of S[:,:,c] against the adjacency
  double pooled_max = 0.0;       // AUC of max over types
};

/// Scores off-diagonal ordered pairs of S against the association adjacency
/// as binary labels.
AttentionAucReport attention_auc(const AttentionState& attn,
                                 const AssociationState& assoc);

enum class BaselineKind { kAssoc, kRandom, kFrequency };

/// No-learn baselines: scores induced without any training. `assoc` is the
/// training-end association state (updated by k=0 test events as they pass);
/// a node without associations falls back to the uniform-random score.
RankResult no_learn_baseline(BaselineKind kind,
                             const std::optional<AssociationState>& assoc,
                             const EventStream& test_stream, int n_nodes,
                             const FrequencyTable* freq = nullptr);

}  // namespace ldg
