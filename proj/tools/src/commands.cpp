#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "ldg/csv.hpp"
#include "ldg/evaluator.hpp"
#include "ldg/model.hpp"
#include "ldg/synthgen.hpp"
#include "ldg/trainer.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;

namespace ldg::cli {

namespace {

AttentionMode parse_attention(const std::string& s) {
  if (s == "dyrep") return AttentionMode::kDyrep;
  if (s == "ldg-learned") return AttentionMode::kLdgLearned;
  if (s == "ldg-random") return AttentionMode::kLdgRandomFrozen;
  throw ConfigError("attention must be dyrep|ldg-learned|ldg-random, got '" + s + "'");
}

PriorKind parse_prior(const std::string& s) {
  if (s == "uniform") return PriorKind::kUniform;
  if (s == "sparse") return PriorKind::kSparse;
  throw ConfigError("prior must be uniform|sparse, got '" + s + "'");
}

InteractionKind parse_interaction(const std::string& s) {
  if (s == "concat") return InteractionKind::kConcat;
  if (s == "bilinear") return InteractionKind::kBilinear;
  throw ConfigError("interaction must be concat|bilinear, got '" + s + "'");
}

struct LoadedData {
  EventStream full;
  EventStream train;
  EventStream test;
  AssociationState assoc_init;
  NodeRegistry registry;
  double boundary = 0.0;
};

LoadedData load_data(const RunConfig& cfg) {
  const std::string events_path = cfg.get_str("events", "");
  if (events_path.empty()) throw ConfigError("missing required input: events");

  LoadedData data;
  if (cfg.has("nodes")) data.registry = NodeRegistry::load_csv(cfg.get_str("nodes", ""));
  LoadResult loaded =
      load_events(events_path, data.registry, cfg.get_double("min_prob", 0.5));
  data.full = std::move(loaded.stream);
  if (loaded.dropped_rows > 0)
    std::cerr << "note: dropped " << loaded.dropped_rows
              << " rows below min_prob\n";

  if (cfg.has("assoc")) {
    data.assoc_init =
        AssociationState::load_csv(cfg.get_str("assoc", ""), data.full.n_nodes);
  } else {
    data.assoc_init = AssociationState(data.full.n_nodes);
  }

  if (cfg.has("split_tau")) {
    data.boundary = cfg.get_double("split_tau", 0.0);
  } else {
    const double frac = cfg.get_double("train_frac", 0.75);
    if (frac <= 0.0 || frac > 1.0)
      throw ConfigError("train_frac must be in (0,1]");
    const size_t k = static_cast<size_t>(frac * static_cast<double>(data.full.size()));
    data.boundary = k >= data.full.size()
                        ? data.full.events.back().tau + 1.0
                        : data.full.events[k].tau;
  }
  bool warn_empty = false;
  auto [train_part, test_part] = split(data.full, data.boundary, &warn_empty);
  if (warn_empty) std::cerr << "warning: one side of the split is empty\n";
  data.train = std::move(train_part);
  data.test = std::move(test_part);
  return data;
}

ModelConfig model_config(const RunConfig& cfg, int n_nodes) {
  ModelConfig mc;
  mc.n_nodes = n_nodes;
  mc.d = cfg.get_int("d", 32);
  mc.r = cfg.get_int("edge_types", 2);
  mc.attention = parse_attention(cfg.get_str("attention", "dyrep"));
  mc.prior = parse_prior(cfg.get_str("prior", "uniform"));
  mc.interaction = parse_interaction(cfg.get_str("interaction", "concat"));
  mc.temperature = cfg.get_double("temperature", 0.5);
  mc.hard_sample = cfg.get_bool("hard_sample", true);
  mc.z_init_scale = cfg.get_double("z_init_scale", 0.3);
  const std::string agg = cfg.get_str("aggregator", "sum");
  if (agg == "sum") mc.aggregator = Aggregator::kSum;
  else if (agg == "max") mc.aggregator = Aggregator::kMax;
  else throw ConfigError("aggregator must be sum|max");
  const std::string sigma = cfg.get_str("sigma", "tanh");
  if (sigma == "tanh") mc.sigma = Nonlinearity::kTanh;
  else if (sigma == "sigmoid") mc.sigma = Nonlinearity::kSigmoid;
  else throw ConfigError("sigma must be tanh|sigmoid");
  return mc;
}

TrainConfig train_config(const RunConfig& cfg) {
  TrainConfig tc;
  tc.batch_events = cfg.get_int("batch", 200);
  tc.lr = cfg.get_double("lr", 2e-4);
  tc.epochs = cfg.get_int("epochs", 5);
  tc.seed = cfg.get_u64("seed", 0);
  tc.val_fraction = cfg.get_double("val_fraction", 0.10);
  tc.early_stopping = cfg.get_bool("early_stopping", true);
  return tc;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << content;
}

std::string csv_num(double v) { return format_double(v); }

void write_metrics_csv(const std::string& path,
                       const std::vector<EpochMetrics>& epochs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "epoch,split,mar,hits10,l_events,l_nonevents,l_kl,wall_seconds\n";
  for (const EpochMetrics& m : epochs) {
    out << m.epoch << ",train,,," << csv_num(m.l_events) << ","
        << csv_num(m.l_nonevents) << "," << csv_num(m.l_kl) << ","
        << csv_num(m.wall_seconds) << "\n";
    out << m.epoch << ",val," << csv_num(m.val_mar) << "," << csv_num(m.val_hits10)
        << ",,,,\n";
  }
}

void write_results_csv(const std::string& path, const RankResult& result,
                       const EventStream& test) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "event_index,u,true_v,rank,hit10\n";
  for (size_t i = 0; i < result.ranks.size(); ++i) {
    const Event& e = test.events[result.event_indices[i]];
    out << result.event_indices[i] << "," << e.u << "," << e.v << ","
        << csv_num(result.ranks[i]) << "," << (result.ranks[i] <= 10.0 ? 1 : 0)
        << "\n";
  }
}

void write_scores_csv(const std::string& path,
                      const std::vector<ScoreDumpRow>& dump) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "event_index,u,true_v,scores...\n";
  for (const ScoreDumpRow& row : dump) {
    out << row.event_index << "," << row.u << "," << row.true_v;
    for (size_t v = 0; v < row.scores.size(); ++v) {
      out << ",";
      if (static_cast<int>(v) != row.u) out << csv_num(row.scores[v]);
    }
    out << "\n";
  }
}

void write_attention_csv(const std::string& path, const AttentionState& attn,
                         int type) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const int n = attn.n();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) out << ",";
      out << csv_num(attn.at(i, j, type));
    }
    out << "\n";
  }
}

void write_embeddings_csv(const std::string& path, const NodeState& state) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const int n = state.z.dim(0), d = state.z.dim(1);
  out << "node";
  for (int j = 0; j < d; ++j) out << ",dim" << j;
  out << "\n";
  for (int i = 0; i < n; ++i) {
    out << i;
    for (int j = 0; j < d; ++j)
      out << "," << csv_num(state.z.data()[static_cast<size_t>(i) * d + j]);
    out << "\n";
  }
}

/// Rebuilds model state by replaying the training stream without gradients.
void replay_training(Model& model, const LoadedData& data, uint64_t seed) {
  model.reset_state(data.assoc_init);
  Rng replay_rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (const Event& e : data.train.events) model.process_event(e, replay_rng);
}

}  // namespace

std::string prepare_run_dir(const RunConfig& cfg) {
  std::string dir = cfg.get_str("out", "");
  if (dir.empty()) {
    const auto now = std::chrono::system_clock::now();
    const auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
            .count();
    int suffix = 0;
    while (true) {
      dir = "runs/" + std::to_string(secs) +
            (suffix ? "-" + std::to_string(suffix) : "");
      if (!fs::exists(dir)) break;
      ++suffix;
    }
  } else if (fs::exists(dir) && !fs::is_empty(dir)) {
    throw ConfigError("run directory already contains files: " + dir);
  }
  fs::create_directories(dir);
  return dir;
}

int cmd_synth(const RunConfig& cfg) {
  PlantedWorld world;
  world.n_nodes = cfg.get_int("synth_nodes", 20);
  world.target_events = cfg.get_int("synth_events", 5000);
  world.rho = cfg.get_double("rho", 8.0);
  world.density = cfg.get_double("density", 0.10);
  world.horizon = cfg.get_double("horizon", 1000.0);
  world.assoc_init_frac = cfg.get_double("assoc_init_frac", 0.3);
  world.assoc_event_frac = cfg.get_double("assoc_event_frac", 0.3);
  world.seed = cfg.get_u64("seed", 0);

  const std::string dir = prepare_run_dir(cfg);
  SynthResult result = generate(world);

  save_events_csv(dir + "/events.csv", result.stream);
  result.assoc_init.save_csv(dir + "/assoc_init.csv");
  result.planted.save_csv(dir + "/planted.csv");
  NodeRegistry reg;
  for (int i = 0; i < world.n_nodes; ++i) reg.intern(std::to_string(i));
  reg.save_csv(dir + "/nodes.csv");
  write_text(dir + "/config.txt", cfg.echo());

  std::cout << "synth: " << result.stream.size() << " events over "
            << world.n_nodes << " nodes -> " << dir << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  const std::string dir = prepare_run_dir(cfg);
  LoadedData data = load_data(cfg);
  if (data.train.empty()) throw ConfigError("training split is empty");

  ModelConfig mc = model_config(cfg, data.full.n_nodes);
  TrainConfig tc = train_config(cfg);
  Model model(mc, tc.seed);

  write_text(dir + "/config.txt", cfg.echo());

  std::vector<EpochMetrics> rows;
  TrainResult result =
      train(model, data.train, data.assoc_init, tc, [&](const EpochMetrics& m) {
        rows.push_back(m);
        model.params().save(dir + "/checkpoint_epoch" + std::to_string(m.epoch) +
                            ".bin");
        std::cout << "epoch " << m.epoch << ": l_events=" << m.l_events
                  << " l_nonevents=" << m.l_nonevents << " l_kl=" << m.l_kl
                  << " val_mar=" << m.val_mar << "\n";
      });

  write_metrics_csv(dir + "/metrics.csv", result.epochs);
  model.params().save(dir + "/checkpoint.bin");

  Series ev{"l_events", "#d62728", {}}, ne{"l_nonevents", "#1f77b4", {}},
      kl{"l_kl", "#2ca02c", {}}, mar{"val_mar", "#9467bd", {}};
  for (const EpochMetrics& m : result.epochs) {
    ev.values.push_back(m.l_events);
    ne.values.push_back(m.l_nonevents);
    kl.values.push_back(m.l_kl);
    mar.values.push_back(m.val_mar);
  }
  write_line_chart(dir + "/loss_curve.svg", "training loss per event", {ev, ne, kl});
  write_line_chart(dir + "/val_mar.svg", "validation MAR", {mar});

  if (result.diverged) {
    std::cerr << "error: training diverged; best checkpoint kept\n";
    return 4;
  }
  std::cout << "train: best epoch " << result.best_epoch
            << (result.early_stopped ? " (early stop)" : "") << " -> " << dir
            << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
  if (!cfg.has("checkpoint")) throw IoError("missing required input: checkpoint");
  const std::string dir = prepare_run_dir(cfg);
  LoadedData data = load_data(cfg);
  if (data.test.empty()) throw ConfigError("test split is empty");

  ModelConfig mc = model_config(cfg, data.full.n_nodes);
  const uint64_t seed = cfg.get_u64("seed", 0);
  Model model(mc, seed);
  model.params().load(cfg.get_str("checkpoint", ""));
  model.config().time_scale = median_gap(data.train);

  replay_training(model, data, seed);

  FrequencyTable freq(data.train, data.full.n_nodes);
  EvalOptions opts;
  opts.blend_alpha = cfg.get_double("blend_freq", 1.0);
  if (opts.blend_alpha < 0.0 || opts.blend_alpha > 1.0)
    throw ConfigError("blend_freq must lie in [0,1]");
  if (opts.blend_alpha < 1.0) opts.freq = &freq;
  std::vector<ScoreDumpRow> dump;
  if (cfg.get_bool("dump_scores", false)) opts.dump = &dump;

  Rng sample_rng(seed ^ 0xe7a1u);
  RankResult result = evaluate(model, data.test, sample_rng, opts);

  write_text(dir + "/config.txt", cfg.echo());
  write_results_csv(dir + "/results.csv", result, data.test);
  if (opts.dump) write_scores_csv(dir + "/scores.csv", dump);

  char line[160];
  std::snprintf(line, sizeof(line), "evaluate: MAR=%.4f HITS@10=%.4f over %zu events\n",
                result.mar, result.hits10, result.ranks.size());
  std::cout << line;
  write_text(dir + "/summary.txt", line);
  return 0;
}

int cmd_analyze(const RunConfig& cfg) {
  if (!cfg.has("checkpoint")) throw IoError("missing required input: checkpoint");
  const std::string dir = prepare_run_dir(cfg);
  LoadedData data = load_data(cfg);

  ModelConfig mc = model_config(cfg, data.full.n_nodes);
  const uint64_t seed = cfg.get_u64("seed", 0);
  Model model(mc, seed);
  model.params().load(cfg.get_str("checkpoint", ""));
  model.config().time_scale = median_gap(data.train);

  // optional mid-stream snapshots
  std::vector<size_t> snap_at;
  if (cfg.has("snap_at")) {
    std::string raw = cfg.get_str("snap_at", "");
    size_t pos = 0;
    while (pos < raw.size()) {
      size_t next = raw.find(';', pos);
      if (next == std::string::npos) next = raw.size();
      snap_at.push_back(std::stoull(raw.substr(pos, next - pos)));
      pos = next + 1;
    }
  }

  model.reset_state(data.assoc_init);
  Rng replay_rng(seed ^ 0x9e3779b97f4a7c15ull);
  size_t snap_cursor = 0;
  std::sort(snap_at.begin(), snap_at.end());
  for (size_t i = 0; i < data.train.events.size(); ++i) {
    model.process_event(data.train.events[i], replay_rng);
    while (snap_cursor < snap_at.size() && snap_at[snap_cursor] == i) {
      for (int c = 0; c < model.attention().r(); ++c)
        write_attention_csv(dir + "/attention_e" + std::to_string(i) + "_t" +
                                std::to_string(c) + ".csv",
                            model.attention(), c);
      write_embeddings_csv(dir + "/embeddings_e" + std::to_string(i) + ".csv",
                           model.node_state());
      ++snap_cursor;
    }
  }

  // final snapshots
  for (int c = 0; c < model.attention().r(); ++c)
    write_attention_csv(dir + "/attention_t" + std::to_string(c) + ".csv",
                        model.attention(), c);
  write_embeddings_csv(dir + "/embeddings.csv", model.node_state());

  // label graph: initial associations, and final = initial + train k=0 events
  const std::string label_path =
      cfg.get_str("label_graph", cfg.get_str("assoc", ""));
  if (label_path.empty())
    throw ConfigError("analyze needs assoc or label_graph for AUC labels");
  AssociationState initial =
      AssociationState::load_csv(label_path, data.full.n_nodes);
  AssociationState final_state = initial;
  for (const Event& e : data.train.events)
    if (e.k == 0) final_state = final_state.apply_association_event(e);

  std::string label_name = fs::path(label_path).stem().string();
  std::ofstream auc_out(dir + "/auc.csv");
  if (!auc_out) throw IoError("cannot write auc.csv");
  auc_out << "assoc_name,snapshot,edge_type,auc\n";
  for (const auto& [snap_name, snap_state] :
       {std::pair<std::string, const AssociationState*>{"initial", &initial},
        {"final", &final_state}}) {
    AttentionAucReport report = attention_auc(model.attention(), *snap_state);
    for (size_t c = 0; c < report.per_type.size(); ++c)
      auc_out << label_name << "," << snap_name << "," << c << ","
              << csv_num(report.per_type[c]) << "\n";
    auc_out << label_name << "," << snap_name << ",max,"
            << csv_num(report.pooled_max) << "\n";
  }
  auc_out.close();

  write_text(dir + "/config.txt", cfg.echo());
  std::cout << "analyze: wrote auc.csv and attention snapshots -> " << dir << "\n";
  return 0;
}

int cmd_baseline(const RunConfig& cfg) {
  const std::string dir = prepare_run_dir(cfg);
  LoadedData data = load_data(cfg);
  if (data.test.empty()) throw ConfigError("test split is empty");

  const std::string variant = cfg.get_str("variant", "assoc");
  FrequencyTable freq(data.train, data.full.n_nodes);

  RankResult result;
  if (variant == "assoc") {
    AssociationState assoc_end = data.assoc_init;
    for (const Event& e : data.train.events)
      if (e.k == 0) assoc_end = assoc_end.apply_association_event(e);
    result = no_learn_baseline(BaselineKind::kAssoc, assoc_end, data.test,
                               data.full.n_nodes);
  } else if (variant == "random") {
    result = no_learn_baseline(BaselineKind::kRandom, std::nullopt, data.test,
                               data.full.n_nodes);
  } else if (variant == "freq") {
    result = no_learn_baseline(BaselineKind::kFrequency, std::nullopt, data.test,
                               data.full.n_nodes, &freq);
  } else {
    throw ConfigError("variant must be assoc|random|freq, got '" + variant + "'");
  }

  write_text(dir + "/config.txt", cfg.echo());
  write_results_csv(dir + "/results.csv", result, data.test);

  char line[160];
  std::snprintf(line, sizeof(line),
                "baseline(%s): MAR=%.4f HITS@10=%.4f over %zu events\n",
                variant.c_str(), result.mar, result.hits10, result.ranks.size());
  std::cout << line;
  write_text(dir + "/summary.txt", line);
  return 0;
}

}  // namespace ldg::cli
