#include "ldg/event.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ldg/csv.hpp"

namespace ldg {

int NodeRegistry::intern(const std::string& name) {
  auto it = by_name_.lower_bound({name, -1});
  if (it != by_name_.end() && it->first == name) return it->second;
  int idx = static_cast<int>(names_.size());
  names_.push_back(name);
  by_name_.insert({name, idx});
  return idx;
}

int NodeRegistry::index_of(const std::string& name) const {
  auto it = by_name_.lower_bound({name, -1});
  if (it == by_name_.end() || it->first != name)
    throw ParseError("unknown node name: " + name);
  return it->second;
}

const std::string& NodeRegistry::name_of(int idx) const {
  require(idx >= 0 && idx < size(), "NodeRegistry: index out of range");
  return names_[static_cast<size_t>(idx)];
}

bool NodeRegistry::contains(const std::string& name) const {
  auto it = by_name_.lower_bound({name, -1});
  return it != by_name_.end() && it->first == name;
}

NodeRegistry NodeRegistry::load_csv(const std::string& path) {
  CsvReader reader(path);
  reader.expect_header({"id", "name"});
  NodeRegistry reg;
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row.size() != 2)
      throw ParseError(path + ": expected 2 fields at line " +
                       std::to_string(reader.line()));
    int id = parse_int(row[0], path, reader.line());
    if (id != reg.size())
      throw ParseError(path + ": ids must be dense and ordered, got " + row[0] +
                       " at line " + std::to_string(reader.line()));
    if (reg.contains(row[1]))
      throw ParseError(path + ": duplicate node name at line " +
                       std::to_string(reader.line()));
    reg.intern(row[1]);
  }
  return reg;
}

void NodeRegistry::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "id,name\n";
  for (int i = 0; i < size(); ++i) out << i << "," << names_[static_cast<size_t>(i)] << "\n";
}

void EventStream::validate() const {
  double prev = -1.0;
  for (size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.u == e.v)
      throw ParseError("self-loop at event " + std::to_string(i));
    if (e.u < 0 || e.v < 0 || e.u >= n_nodes || e.v >= n_nodes)
      throw ParseError("node index out of range at event " + std::to_string(i));
    if (e.tau < 0.0)
      throw ParseError("negative timestamp at event " + std::to_string(i));
    if (e.k != 0 && e.k != 1)
      throw ParseError("event kind must be 0 or 1 at event " + std::to_string(i));
    if (e.prob && (*e.prob < 0.0 || *e.prob > 1.0))
      throw ParseError("prob outside [0,1] at event " + std::to_string(i));
    if (i > 0 && e.tau < prev)
      throw ParseError("non-monotone timestamps between events " +
                       std::to_string(i - 1) + " and " + std::to_string(i));
    prev = e.tau;
  }
}

namespace {

bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

int resolve_node(const std::string& field, NodeRegistry& registry) {
  if (looks_numeric(field) && registry.size() == 0) {
    // plain-index file without a registry: indices self-register
    return std::stoi(field);
  }
  if (looks_numeric(field) && !registry.contains(field))
    return std::stoi(field);
  return registry.intern(field);
}

}  // namespace

LoadResult load_events(const std::string& path, NodeRegistry& registry,
                       double min_prob) {
  CsvReader reader(path);
  reader.expect_header({"u", "v", "tau", "k", "label", "prob"});
  LoadResult result;
  std::vector<std::string> row;
  int max_index = registry.size() - 1;
  double prev_tau = -1.0;
  size_t prev_line = 0;
  while (reader.next(row)) {
    const size_t line = reader.line();
    if (row.size() != 6)
      throw ParseError(path + ": expected 6 fields at line " + std::to_string(line));
    Event e;
    e.u = resolve_node(row[0], registry);
    e.v = resolve_node(row[1], registry);
    e.tau = parse_double(row[2], path, line);
    e.k = parse_int(row[3], path, line);
    e.label = row[4];
    if (!row[5].empty()) e.prob = parse_double(row[5], path, line);

    if (e.u == e.v)
      throw ParseError(path + ": self-loop at line " + std::to_string(line));
    if (e.k != 0 && e.k != 1)
      throw ParseError(path + ": event kind must be 0 or 1 at line " + std::to_string(line));
    if (e.tau < 0.0)
      throw ParseError(path + ": negative timestamp at line " + std::to_string(line));
    if (e.prob && (*e.prob < 0.0 || *e.prob > 1.0))
      throw ParseError(path + ": prob outside [0,1] at line " + std::to_string(line));
    if (e.tau < prev_tau)
      throw ParseError(path + ": non-monotone timestamps between lines " +
                       std::to_string(prev_line) + " and " + std::to_string(line));
    prev_tau = e.tau;
    prev_line = line;

    if (e.prob && *e.prob < min_prob) {
      ++result.dropped_rows;
      continue;
    }
    max_index = std::max({max_index, e.u, e.v});
    result.stream.events.push_back(std::move(e));
  }
  result.stream.n_nodes = std::max(registry.size(), max_index + 1);
  result.stream.validate();
  return result;
}

void save_events_csv(const std::string& path, const EventStream& stream) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "u,v,tau,k,label,prob\n";
  for (const Event& e : stream.events) {
    out << e.u << "," << e.v << "," << format_double(e.tau) << "," << e.k << ","
        << e.label << ",";
    if (e.prob) out << format_double(*e.prob);
    out << "\n";
  }
}

std::pair<EventStream, EventStream> split(const EventStream& stream,
                                          double boundary, bool* warn_empty) {
  EventStream before, after;
  before.n_nodes = after.n_nodes = stream.n_nodes;
  before.origin = after.origin = stream.origin;
  for (const Event& e : stream.events)
    (e.tau < boundary ? before : after).events.push_back(e);
  if (warn_empty) *warn_empty = before.empty() || after.empty();
  return {std::move(before), std::move(after)};
}

size_t AssociationState::edge_count() const {
  size_t c = 0;
  for (int u = 0; u < n_; ++u)
    for (int v = u + 1; v < n_; ++v)
      if (has_edge(u, v)) ++c;
  return c;
}

std::vector<int> AssociationState::neighbors(int u) const {
  require(u >= 0 && u < n_, "neighbors: node out of range");
  std::vector<int> out;
  const uint8_t* row = adj_.data() + static_cast<size_t>(u) * n_;
  for (int v = 0; v < n_; ++v)
    if (row[v]) out.push_back(v);
  return out;
}

AssociationState AssociationState::apply_association_event(const Event& e) const {
  require(e.k == 0, "apply_association_event: event is not an association");
  AssociationState next(*this);
  next.add_edge(e.u, e.v);
  next.last_mutation_ = e.tau;
  return next;
}

void AssociationState::add_edge(int u, int v) {
  require(u != v, "add_edge: self-loop");
  require(u >= 0 && v >= 0 && u < n_ && v < n_, "add_edge: node out of range");
  adj_[static_cast<size_t>(u) * n_ + v] = 1;
  adj_[static_cast<size_t>(v) * n_ + u] = 1;
}

AssociationState AssociationState::load_csv(const std::string& path, int n_nodes) {
  CsvReader reader(path);
  reader.expect_header({"u", "v"});
  AssociationState state(n_nodes);
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row.size() != 2)
      throw ParseError(path + ": expected 2 fields at line " +
                       std::to_string(reader.line()));
    int u = parse_int(row[0], path, reader.line());
    int v = parse_int(row[1], path, reader.line());
    if (u == v)
      throw ParseError(path + ": self-loop at line " + std::to_string(reader.line()));
    if (u < 0 || v < 0 || u >= n_nodes || v >= n_nodes)
      throw ParseError(path + ": node index out of range at line " +
                       std::to_string(reader.line()));
    state.add_edge(u, v);
  }
  return state;
}

void AssociationState::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "u,v\n";
  for (int u = 0; u < n_; ++u)
    for (int v = u + 1; v < n_; ++v)
      if (has_edge(u, v)) out << u << "," << v << "\n";
}

}  // namespace ldg
