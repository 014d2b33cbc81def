#pragma once

#include <map>
#include <string>
#include <vector>

#include "cict/graph.hpp"
#include "cict/ingest.hpp"

namespace cict::fixture {

// A->B x8 (intervals 3 and 8, then 1s), A->C x2, B->C x5; f_A=10, f_B=8, f_C=7.
inline std::vector<Transition> small_transitions() {
  std::vector<Transition> ts;
  ts.push_back({"A", "B", 3});
  ts.push_back({"A", "B", 8});
  for (int i = 0; i < 6; ++i) ts.push_back({"A", "B", 5});
  for (int i = 0; i < 2; ++i) ts.push_back({"A", "C", 4});
  for (int i = 0; i < 5; ++i) ts.push_back({"B", "C", 2});
  return ts;
}

inline std::map<std::string, std::size_t> small_frequencies() { return {{"A", 10}, {"B", 8}, {"C", 7}}; }

inline TransitionNetwork small_network() {
  return TransitionNetwork::build(small_transitions(), small_frequencies());
}

}  // namespace cict::fixture
