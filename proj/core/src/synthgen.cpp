#include "ldg/synthgen.hpp"

#include <algorithm>
#include <cmath>

namespace ldg {

SynthResult generate(const PlantedWorld& world) {
  const int n = world.n_nodes;
  require(n >= 2, "generate: need at least two nodes");
  require(world.rho > 1.0, "generate: rho must exceed 1");
  require(world.horizon > 0.0, "generate: horizon must be positive");

  Rng rng(world.seed);

  // plant a random subset of unordered pairs
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const int n_planted = std::max(
      1, static_cast<int>(std::lround(world.density * static_cast<double>(pairs.size()))));
  for (int i = 0; i < n_planted; ++i) {
    const int j = i + rng.uniform_int(static_cast<int>(pairs.size()) - i);
    std::swap(pairs[static_cast<size_t>(i)], pairs[static_cast<size_t>(j)]);
  }

  SynthResult out;
  out.planted = AssociationState(n);
  for (int i = 0; i < n_planted; ++i)
    out.planted.add_edge(pairs[static_cast<size_t>(i)].first,
                         pairs[static_cast<size_t>(i)].second);

  const long ordered_total = static_cast<long>(n) * (n - 1);
  const long ordered_on = 2L * n_planted;
  const long ordered_off = ordered_total - ordered_on;

  double mu = world.mu;
  if (mu <= 0.0) {
    require(world.target_events > 0, "generate: either mu or target_events required");
    mu = static_cast<double>(world.target_events) /
         (world.horizon *
          (static_cast<double>(ordered_off) + static_cast<double>(ordered_on) * world.rho));
  }
  const double expected =
      mu * world.horizon *
      (static_cast<double>(ordered_off) + static_cast<double>(ordered_on) * world.rho);
  if (expected < 1.0) throw ConfigError("generate: zero expected events");

  // homogeneous Poisson stream per ordered pair
  std::vector<Event> events;
  events.reserve(static_cast<size_t>(expected * 1.2));
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      const double rate = out.planted.has_edge(u, v) ? mu * world.rho : mu;
      double t = 0.0;
      while (true) {
        t += -std::log(rng.uniform01()) / rate;
        if (t > world.horizon) break;
        Event e;
        e.u = u;
        e.v = v;
        e.tau = t;
        e.k = 1;
        e.label = "SYN";
        events.push_back(std::move(e));
      }
    }

  // reveal part of the planted graph: some edges as initial associations,
  // some as k=0 events scattered over the horizon
  out.assoc_init = AssociationState(n);
  for (int i = 0; i < n_planted; ++i) {
    const auto [a, b] = pairs[static_cast<size_t>(i)];
    const double roll = rng.uniform01();
    if (roll < world.assoc_init_frac) {
      out.assoc_init.add_edge(a, b);
    } else if (roll < world.assoc_init_frac + world.assoc_event_frac) {
      Event e;
      e.u = a;
      e.v = b;
      e.tau = rng.uniform01() * world.horizon;
      e.k = 0;
      e.label = "ASSOC";
      events.push_back(std::move(e));
    }
  }

  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.tau < b.tau; });

  out.stream.events = std::move(events);
  out.stream.n_nodes = n;
  out.stream.origin = "synthetic";
  out.stream.validate();
  return out;
}

}  // namespace ldg
