#pragma once

#include "ldg/event.hpp"
#include "ldg/rng.hpp"

namespace ldg {

/// Synthetic world with a planted latent graph: homogeneous Poisson traffic
/// per ordered pair, rate mu * rho on planted edges and mu elsewhere.
struct PlantedWorld {
  int n_nodes = 20;
  double density = 0.10;  // fraction of unordered pairs that are planted
  double rho = 8.0;       // on-edge rate multiplier (> 1)
  double mu = 0.0;        // base rate; derived from target_events when 0
  double horizon = 1000.0;
  int target_events = 5000;      // expected communication count when mu == 0
  double assoc_init_frac = 0.3;  // planted edges revealed as initial associations
  double assoc_event_frac = 0.3; // planted edges revealed as k=0 events
  uint64_t seed = 0;

  /// The desk-scale acceptance world.
  static PlantedWorld default_world(uint64_t seed) {
    PlantedWorld w;
    w.seed = seed;
    return w;
  }
};

struct SynthResult {
  EventStream stream;           // communications plus revealing k=0 events
  AssociationState planted;     // ground truth
  AssociationState assoc_init;  // edges revealed at tau = 0
};

/// Deterministic under a fixed seed. Throws ConfigError when the expected
/// event count is zero.
SynthResult generate(const PlantedWorld& world);

}  // namespace ldg
