#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "ldg/errors.hpp"

namespace {

using ldg::cli::RunConfig;

// collects --flag values into the RunConfig under their config-file keys
struct FlagBinder {
  CLI::App* app;
  RunConfig* cfg;
  std::map<std::string, std::string>* staged;

  void add(const std::string& flag, const std::string& key,
           const std::string& help) {
    auto* sink = staged;
    app->add_option_function<std::string>(
           flag, [sink, key](const std::string& v) { (*sink)[key] = v; }, help)
        ->expected(1);
  }
  void add_flag(const std::string& flag, const std::string& key,
                const std::string& help) {
    auto* sink = staged;
    app->add_flag_callback(
        flag, [sink, key]() { (*sink)[key] = "true"; }, help);
  }
};

void bind_common(FlagBinder& b) {
  b.add("--config", "__config__", "key=value config file (flags override it)");
  b.add("--out", "out", "run directory (created; must not hold a previous run)");
  b.add("--seed", "seed", "random seed");
}

void bind_data(FlagBinder& b) {
  b.add("--events", "events", "events.csv path");
  b.add("--nodes", "nodes", "nodes.csv path (id,name)");
  b.add("--assoc", "assoc", "assoc_init.csv path (initial association edges)");
  b.add("--min-prob", "min_prob", "drop rows with prob below this (default 0.5)");
  b.add("--split-tau", "split_tau", "train/test boundary timestamp");
  b.add("--train-frac", "train_frac", "train fraction when split_tau unset (default 0.75)");
}

void bind_model(FlagBinder& b) {
  b.add("--attention", "attention", "dyrep|ldg-learned|ldg-random");
  b.add("--prior", "prior", "uniform|sparse");
  b.add("--interaction", "interaction", "concat|bilinear");
  b.add("--edge-types", "edge_types", "number of latent edge types (default 2)");
  b.add("--d", "d", "embedding width (default 32)");
  b.add("--temperature", "temperature", "gumbel temperature (default 0.5)");
  b.add("--soft-sample", "hard_sample", "pass 'false' to use soft samples");
  b.add("--aggregator", "aggregator", "sum|max neighbor aggregation");
  b.add("--sigma", "sigma", "tanh|sigmoid update nonlinearity");
}

int dispatch(const std::string& name, RunConfig& cfg,
             const std::map<std::string, std::string>& staged) {
  // config file first, then flag overrides
  auto cfg_file = staged.find("__config__");
  if (cfg_file != staged.end()) cfg.load_file(cfg_file->second);
  for (const auto& [k, v] : staged)
    if (k != "__config__") cfg.set(k, v);

  if (name == "train") return ldg::cli::cmd_train(cfg);
  if (name == "evaluate") return ldg::cli::cmd_evaluate(cfg);
  if (name == "analyze") return ldg::cli::cmd_analyze(cfg);
  if (name == "synth") return ldg::cli::cmd_synth(cfg);
  if (name == "baseline") return ldg::cli::cmd_baseline(cfg);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Temporal point-process engine for dynamic graphs: latent attention "
      "learning and dynamic link prediction"};
  app.require_subcommand(1);

  std::map<std::string, std::map<std::string, std::string>> staged;

  auto* train = app.add_subcommand("train", "fit a model on the training split");
  auto* evaluate =
      app.add_subcommand("evaluate", "rank test events with a trained checkpoint");
  auto* analyze = app.add_subcommand(
      "analyze", "attention-vs-association AUC and attention/embedding snapshots");
  auto* synth = app.add_subcommand("synth", "generate a planted-graph dataset");
  auto* baseline =
      app.add_subcommand("baseline", "no-learn and frequency baselines");

  for (CLI::App* sub : {train, evaluate, analyze, baseline}) {
    FlagBinder b{sub, nullptr, &staged[sub->get_name()]};
    bind_common(b);
    bind_data(b);
  }
  {
    FlagBinder b{train, nullptr, &staged["train"]};
    bind_model(b);
    b.add("--epochs", "epochs", "training epochs (default 5)");
    b.add("--lr", "lr", "learning rate (default 2e-4)");
    b.add("--batch", "batch", "events per minibatch (default 200)");
    b.add("--val-fraction", "val_fraction", "training tail held out for early stop");
  }
  {
    FlagBinder b{evaluate, nullptr, &staged["evaluate"]};
    bind_model(b);
    b.add("--checkpoint", "checkpoint", "trained checkpoint path");
    b.add("--blend-freq", "blend_freq",
          "blend weight alpha: model*alpha + freq*(1-alpha); 0.5 = equal averaging");
    b.add_flag("--dump-scores", "dump_scores", "write per-event score dumps");
  }
  {
    FlagBinder b{analyze, nullptr, &staged["analyze"]};
    bind_model(b);
    b.add("--checkpoint", "checkpoint", "trained checkpoint path");
    b.add("--label-graph", "label_graph", "association csv used as AUC labels");
    b.add("--snap-at", "snap_at", "semicolon-separated event indices for snapshots");
  }
  {
    FlagBinder b{baseline, nullptr, &staged["baseline"]};
    b.add("--variant", "variant", "assoc|random|freq");
  }
  {
    FlagBinder b{synth, nullptr, &staged["synth"]};
    bind_common(b);
    b.add("--nodes", "synth_nodes", "node count (default 20)");
    b.add("--events", "synth_events", "expected communication events (default 5000)");
    b.add("--rho", "rho", "on-edge rate multiplier (default 8)");
    b.add("--density", "density", "planted edge density (default 0.10)");
    b.add("--horizon", "horizon", "stream horizon in seconds (default 1000)");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    return dispatch(name, cfg, staged[name]);
  } catch (const ldg::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ldg::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ldg::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ldg::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
