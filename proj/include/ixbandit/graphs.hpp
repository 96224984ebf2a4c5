#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ixbandit/core.hpp"

namespace ixbandit {

// Directed side-observation graph on the arms. An arc i -> j means that
// playing i also reveals the loss of j. Self-loops are rejected; the chosen
// arm is always observed anyway.
class FeedbackGraph {
 public:
  explicit FeedbackGraph(std::size_t nodes);
  FeedbackGraph(std::size_t nodes,
                std::span<const std::pair<Arm, Arm>> arcs);

  static FeedbackGraph empty(std::size_t nodes) { return FeedbackGraph(nodes); }
  static FeedbackGraph complete(std::size_t nodes);

  // Edge-list text: one "i j" arc per line, 1-indexed, '#' starts a comment.
  // Without `nodes`, the node count is the largest index mentioned.
  static FeedbackGraph parse_edge_list(std::istream& in,
                                       std::optional<std::size_t> nodes = {});
  static FeedbackGraph load_edge_list(const std::string& path,
                                      std::optional<std::size_t> nodes = {});
  std::string to_edge_list() const;

  // Duplicate arcs are ignored.
  void add_arc(Arm from, Arm to);

  std::size_t nodes() const { return out_.size(); }
  std::size_t arc_count() const { return arc_count_; }
  bool has_arc(Arm from, Arm to) const;
  std::span<const Arm> out_neighbors(Arm i) const { return out_[i]; }
  std::span<const Arm> in_neighbors(Arm i) const { return in_[i]; }

 private:
  std::vector<std::vector<Arm>> out_;
  std::vector<std::vector<Arm>> in_;
  std::size_t arc_count_ = 0;
};

// o_i = p_i + sum of p_j over in-neighbours j of i, clipped to 1 against
// rounding.
std::vector<double> observation_probs(const FeedbackGraph& graph,
                                      std::span<const double> p);

// Arms whose losses are revealed when `chosen` is played, in ascending order.
std::vector<Arm> realize_observations(const FeedbackGraph& graph, Arm chosen);

// Q = sum_i p_i / (o_i + gamma).
double q_value(const FeedbackGraph& graph, std::span<const double> p,
               double gamma);

// Almost-sure bound 2a log(1 + (ceil(K^2/gamma) + K)/a) + 2 on Q, where a is
// the independence number. Requires gamma > 0.
double q_value_bound(std::size_t arms, std::size_t independence, double gamma);

enum class IndependenceMode { Exact, Auto };

struct IndependenceNumber {
  std::size_t value = 0;
  // False when the greedy lower bound was used.
  bool exact = true;
};

inline constexpr std::size_t kExactIndependenceLimit = 25;

// Largest vertex set with no arc in either direction between two members.
// Exact branch and bound up to kExactIndependenceLimit nodes; beyond that
// Exact mode throws and Auto mode falls back to a min-degree greedy bound.
IndependenceNumber independence_number(
    const FeedbackGraph& graph, IndependenceMode mode = IndependenceMode::Exact);

}  // namespace ixbandit
