#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ldg/errors.hpp"

namespace ldg {

/// Event kinds: long-term structural edges vs short-term interactions.
enum class EventKind : int { kAssociation = 0, kCommunication = 1 };

/// One timestamped dyadic event.
struct Event {
  int u = 0;
  int v = 0;
  double tau = 0.0;  // seconds since stream origin
  int k = 1;         // 0 = association, 1 = communication
  std::string label;
  std::optional<double> prob;  // confidence, used for filtering noisy rows

  bool is_association() const { return k == 0; }
};

/// Maps external node names to dense 0-based indices.
class NodeRegistry {
 public:
  NodeRegistry() = default;

  /// Returns the index for `name`, registering it if new.
  int intern(const std::string& name);
  /// Index lookup; throws if unknown.
  int index_of(const std::string& name) const;
  const std::string& name_of(int idx) const;
  bool contains(const std::string& name) const;
  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  static NodeRegistry load_csv(const std::string& path);
  void save_csv(const std::string& path) const;

 private:
  std::vector<std::string> names_;
  std::set<std::pair<std::string, int>> by_name_;
};

/// Ordered sequence of events over N nodes. Timestamps are non-decreasing;
/// ties keep input order.
struct EventStream {
  std::vector<Event> events;
  int n_nodes = 0;
  std::string origin;  // wall-clock anchor of tau = 0, free-form

  size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }

  /// Throws ParseError/ContractError on invariant violations. `line_base`
  /// offsets reported line numbers (use 2 for a CSV body after its header).
  void validate() const;
};

struct LoadResult {
  EventStream stream;
  size_t dropped_rows = 0;  // rows removed by the min_prob filter
};

/// Reads events.csv (header `u,v,tau,k,label,prob`). Rows whose prob is
/// present and below `min_prob` are dropped. Node columns may be names
/// (resolved through the registry) or plain indices.
LoadResult load_events(const std::string& path, NodeRegistry& registry,
                       double min_prob);

void save_events_csv(const std::string& path, const EventStream& stream);

/// Splits at `boundary`: first part holds tau < boundary, second the rest.
/// Sets `*warn_empty` when a side comes out empty.
std::pair<EventStream, EventStream> split(const EventStream& stream,
                                          double boundary,
                                          bool* warn_empty = nullptr);

/// Symmetric binary adjacency with zero diagonal; edges accumulate only
/// (the observed data never removes an association).
class AssociationState {
 public:
  AssociationState() = default;
  explicit AssociationState(int n_nodes) : n_(n_nodes), adj_(static_cast<size_t>(n_nodes) * n_nodes, 0) {}

  int n_nodes() const { return n_; }
  bool has_edge(int u, int v) const { return adj_[static_cast<size_t>(u) * n_ + v] != 0; }
  size_t edge_count() const;  // unordered
  double last_mutation() const { return last_mutation_; }

  /// One-hop neighborhood; never contains u itself.
  std::vector<int> neighbors(int u) const;

  /// Adds the symmetric edge of an association event. Idempotent.
  /// Pre: e.k == 0.
  AssociationState apply_association_event(const Event& e) const;

  void add_edge(int u, int v);

  static AssociationState load_csv(const std::string& path, int n_nodes);
  void save_csv(const std::string& path) const;

 private:
  int n_ = 0;
  std::vector<uint8_t> adj_;
  double last_mutation_ = 0.0;
};

}  // namespace ldg
