#include "ldg/event.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ldg/rng.hpp"

namespace ldg {
namespace {

class TempDir {
 public:
  TempDir() {
    dir_ = std::filesystem::temp_directory_path() /
           ("ldg_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    std::filesystem::create_directories(dir_);
  }
  ~TempDir() { std::filesystem::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  static inline int counter_ = 0;
  std::filesystem::path dir_;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

TEST(LoadEvents, DirectFieldMapping) {
  TempDir tmp;
  write_file(tmp.path("events.csv"),
             "u,v,tau,k,label,prob\n"
             "3,7,540.0,1,SMS,\n");
  NodeRegistry reg;
  LoadResult r = load_events(tmp.path("events.csv"), reg, 0.0);
  ASSERT_EQ(r.stream.size(), 1u);
  const Event& e = r.stream.events[0];
  EXPECT_EQ(e.u, 3);
  EXPECT_EQ(e.v, 7);
  EXPECT_DOUBLE_EQ(e.tau, 540.0);
  EXPECT_EQ(e.k, 1);
  EXPECT_EQ(e.label, "SMS");
  EXPECT_FALSE(e.prob.has_value());
  EXPECT_EQ(r.dropped_rows, 0u);
  EXPECT_EQ(r.stream.n_nodes, 8);
}

TEST(LoadEvents, MinProbFilterDropsRows) {
  TempDir tmp;
  write_file(tmp.path("events.csv"),
             "u,v,tau,k,label,prob\n"
             "0,1,1.0,1,Proximity,0.2\n"
             "0,1,2.0,1,Proximity,0.9\n");
  NodeRegistry reg;
  LoadResult r = load_events(tmp.path("events.csv"), reg, 0.5);
  EXPECT_EQ(r.stream.size(), 1u);
  EXPECT_EQ(r.dropped_rows, 1u);
}

TEST(LoadEvents, SelfLoopIsValidationErrorWithLine) {
  TempDir tmp;
  write_file(tmp.path("events.csv"),
             "u,v,tau,k,label,prob\n"
             "3,3,540.0,1,SMS,\n");
  NodeRegistry reg;
  try {
    load_events(tmp.path("events.csv"), reg, 0.0);
    FAIL() << "expected ParseError";
  } catch (const ParseError& err) {
    EXPECT_NE(std::string(err.what()).find("self-loop"), std::string::npos);
    EXPECT_NE(std::string(err.what()).find("line 2"), std::string::npos);
  }
}

TEST(LoadEvents, NonMonotoneTimestampsNameTheOffendingPair) {
  TempDir tmp;
  write_file(tmp.path("events.csv"),
             "u,v,tau,k,label,prob\n"
             "0,1,5.0,1,SMS,\n"
             "1,2,4.0,1,SMS,\n");
  NodeRegistry reg;
  try {
    load_events(tmp.path("events.csv"), reg, 0.0);
    FAIL() << "expected ParseError";
  } catch (const ParseError& err) {
    const std::string msg = err.what();
    EXPECT_NE(msg.find("non-monotone"), std::string::npos);
    EXPECT_NE(msg.find("2"), std::string::npos);
    EXPECT_NE(msg.find("3"), std::string::npos);
  }
}

TEST(LoadEvents, MalformedRowReportsLineNumber) {
  TempDir tmp;
  write_file(tmp.path("events.csv"),
             "u,v,tau,k,label,prob\n"
             "0,1,notanumber,1,SMS,\n");
  NodeRegistry reg;
  try {
    load_events(tmp.path("events.csv"), reg, 0.0);
    FAIL() << "expected ParseError";
  } catch (const ParseError& err) {
    EXPECT_NE(std::string(err.what()).find("line 2"), std::string::npos);
  }
}

TEST(LoadEvents, MissingFileIsIoError) {
  NodeRegistry reg;
  EXPECT_THROW(load_events("/nonexistent/events.csv", reg, 0.0), IoError);
}

TEST(Neighbors, DefinitionAndSymmetry) {
  AssociationState a(6);
  EXPECT_TRUE(a.neighbors(1).empty());

  Event assoc;
  assoc.u = 1;
  assoc.v = 3;
  assoc.k = 0;
  assoc.tau = 10.0;
  AssociationState b = a.apply_association_event(assoc);
  EXPECT_EQ(b.neighbors(1), std::vector<int>{3});
  EXPECT_EQ(b.neighbors(3), std::vector<int>{1});
  EXPECT_DOUBLE_EQ(b.last_mutation(), 10.0);

  Event assoc2;
  assoc2.u = 2;
  assoc2.v = 5;
  assoc2.k = 0;
  AssociationState c = b.apply_association_event(assoc2);
  auto n5 = c.neighbors(5);
  EXPECT_NE(std::find(n5.begin(), n5.end(), 2), n5.end());
  auto n2 = c.neighbors(2);
  EXPECT_NE(std::find(n2.begin(), n2.end(), 5), n2.end());
}

TEST(ApplyAssociation, IdempotentAndKindChecked) {
  AssociationState a(4);
  Event assoc;
  assoc.u = 1;
  assoc.v = 3;
  assoc.k = 0;
  AssociationState b = a.apply_association_event(assoc);
  AssociationState c = b.apply_association_event(assoc);
  EXPECT_EQ(b.edge_count(), 1u);
  EXPECT_EQ(c.edge_count(), 1u);

  Event comm = assoc;
  comm.k = 1;
  EXPECT_THROW(b.apply_association_event(comm), ContractError);
}

TEST(AssociationInvariants, SymmetricZeroDiagonalUnderRandomSequences) {
  Rng rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + rng.uniform_int(8);
    AssociationState state(n);
    double tau = 0.0;
    for (int step = 0; step < 50; ++step) {
      Event e;
      e.u = rng.uniform_int(n);
      do {
        e.v = rng.uniform_int(n);
      } while (e.v == e.u);
      e.k = 0;
      tau += rng.uniform01();
      e.tau = tau;
      state = state.apply_association_event(e);
    }
    for (int u = 0; u < n; ++u) {
      EXPECT_FALSE(state.has_edge(u, u));
      for (int v = 0; v < n; ++v) EXPECT_EQ(state.has_edge(u, v), state.has_edge(v, u));
    }
  }
}

EventStream make_stream(int n_events) {
  EventStream s;
  s.n_nodes = 4;
  for (int i = 0; i < n_events; ++i) {
    Event e;
    e.u = i % 3;
    e.v = 3;
    e.tau = static_cast<double>(i);
    e.k = 1;
    s.events.push_back(e);
  }
  return s;
}

TEST(Split, BoundaryCounts) {
  EventStream s = make_stream(10);
  auto [before, after] = split(s, 7.0);
  EXPECT_EQ(before.size(), 7u);
  EXPECT_EQ(after.size(), 3u);
}

TEST(Split, EmptySideWarnsNotThrows) {
  EventStream s = make_stream(10);
  bool warn = false;
  auto [before, after] = split(s, -1.0, &warn);
  EXPECT_TRUE(warn);
  EXPECT_EQ(before.size(), 0u);
  EXPECT_EQ(after.size(), 10u);
}

TEST(Split, ConcatenationIsIdentity) {
  Rng rng(17);
  EventStream s = make_stream(25);
  for (int trial = 0; trial < 10; ++trial) {
    const double boundary = rng.uniform01() * 30.0 - 2.0;
    auto [before, after] = split(s, boundary);
    std::vector<Event> merged = before.events;
    merged.insert(merged.end(), after.events.begin(), after.events.end());
    ASSERT_EQ(merged.size(), s.events.size());
    for (size_t i = 0; i < merged.size(); ++i) {
      EXPECT_EQ(merged[i].u, s.events[i].u);
      EXPECT_EQ(merged[i].v, s.events[i].v);
      EXPECT_DOUBLE_EQ(merged[i].tau, s.events[i].tau);
    }
  }
}

TEST(SortedInvariant, HoldsForAnyLoadedStream) {
  TempDir tmp;
  write_file(tmp.path("events.csv"),
             "u,v,tau,k,label,prob\n"
             "0,1,1.0,1,A,\n"
             "1,2,1.0,1,B,\n"
             "0,2,2.5,0,C,\n");
  NodeRegistry reg;
  LoadResult r = load_events(tmp.path("events.csv"), reg, 0.0);
  for (size_t i = 1; i < r.stream.size(); ++i)
    EXPECT_LE(r.stream.events[i - 1].tau, r.stream.events[i].tau);
  // equal timestamps keep file order
  EXPECT_EQ(r.stream.events[0].label, "A");
  EXPECT_EQ(r.stream.events[1].label, "B");
}

TEST(NodeRegistry, RoundTripAndBijection) {
  TempDir tmp;
  NodeRegistry reg;
  EXPECT_EQ(reg.intern("alice"), 0);
  EXPECT_EQ(reg.intern("bob"), 1);
  EXPECT_EQ(reg.intern("alice"), 0);
  reg.save_csv(tmp.path("nodes.csv"));
  NodeRegistry back = NodeRegistry::load_csv(tmp.path("nodes.csv"));
  EXPECT_EQ(back.size(), 2);
  EXPECT_EQ(back.index_of("bob"), 1);
  EXPECT_EQ(back.name_of(0), "alice");
}

TEST(AssociationCsv, RoundTrip) {
  TempDir tmp;
  AssociationState a(5);
  a.add_edge(0, 3);
  a.add_edge(2, 4);
  a.save_csv(tmp.path("assoc.csv"));
  AssociationState b = AssociationState::load_csv(tmp.path("assoc.csv"), 5);
  EXPECT_EQ(b.edge_count(), 2u);
  EXPECT_TRUE(b.has_edge(3, 0));
  EXPECT_TRUE(b.has_edge(4, 2));
}

}  // namespace
}  // namespace ldg
