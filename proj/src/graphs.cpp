#include "ixbandit/graphs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace ixbandit {

FeedbackGraph::FeedbackGraph(std::size_t nodes) : out_(nodes), in_(nodes) {
  if (nodes == 0) throw ConfigError("feedback graph needs at least one node");
}

FeedbackGraph::FeedbackGraph(std::size_t nodes,
                             std::span<const std::pair<Arm, Arm>> arcs)
    : FeedbackGraph(nodes) {
  for (const auto& [from, to] : arcs) add_arc(from, to);
}

FeedbackGraph FeedbackGraph::complete(std::size_t nodes) {
  FeedbackGraph g(nodes);
  for (Arm i = 0; i < nodes; ++i) {
    for (Arm j = 0; j < nodes; ++j) {
      if (i != j) g.add_arc(i, j);
    }
  }
  return g;
}

void FeedbackGraph::add_arc(Arm from, Arm to) {
  if (from >= nodes() || to >= nodes()) {
    throw ConfigError("arc " + std::to_string(from + 1) + " -> " +
                      std::to_string(to + 1) + " outside 1.." +
                      std::to_string(nodes()));
  }
  if (from == to) {
    throw ConfigError("self-loop at node " + std::to_string(from + 1));
  }
  auto& out = out_[from];
  auto pos = std::lower_bound(out.begin(), out.end(), to);
  if (pos != out.end() && *pos == to) return;
  out.insert(pos, to);
  auto& in = in_[to];
  in.insert(std::lower_bound(in.begin(), in.end(), from), from);
  ++arc_count_;
}

bool FeedbackGraph::has_arc(Arm from, Arm to) const {
  if (from >= nodes() || to >= nodes()) return false;
  return std::binary_search(out_[from].begin(), out_[from].end(), to);
}

FeedbackGraph FeedbackGraph::parse_edge_list(std::istream& in,
                                             std::optional<std::size_t> nodes) {
  std::vector<std::pair<Arm, Arm>> arcs;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    long long from = 0;
    long long to = 0;
    if (!(fields >> from)) continue;  // blank line
    std::string rest;
    if (!(fields >> to) || (fields >> rest)) {
      throw ConfigError("edge list line " + std::to_string(line_no) +
                        ": expected two integers \"i j\"");
    }
    if (from < 1 || to < 1) {
      throw ConfigError("edge list line " + std::to_string(line_no) +
                        ": node indices are 1-based");
    }
    arcs.emplace_back(static_cast<Arm>(from - 1), static_cast<Arm>(to - 1));
    max_index = std::max({max_index, static_cast<std::size_t>(from),
                          static_cast<std::size_t>(to)});
  }
  const std::size_t n = nodes.value_or(max_index);
  if (n == 0) throw ConfigError("edge list declares no nodes");
  if (max_index > n) {
    throw ConfigError("edge list mentions node " + std::to_string(max_index) +
                      " but the graph has " + std::to_string(n) + " nodes");
  }
  return FeedbackGraph(n, arcs);
}

FeedbackGraph FeedbackGraph::load_edge_list(const std::string& path,
                                            std::optional<std::size_t> nodes) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  try {
    return parse_edge_list(in, nodes);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string FeedbackGraph::to_edge_list() const {
  std::ostringstream out;
  for (Arm i = 0; i < nodes(); ++i) {
    for (Arm j : out_[i]) out << i + 1 << ' ' << j + 1 << '\n';
  }
  return out.str();
}

std::vector<double> observation_probs(const FeedbackGraph& graph,
                                      std::span<const double> p) {
  if (p.size() != graph.nodes()) {
    throw ConfigError("distribution has " + std::to_string(p.size()) +
                      " arms but the graph has " +
                      std::to_string(graph.nodes()) + " nodes");
  }
  std::vector<double> o(p.begin(), p.end());
  for (Arm i = 0; i < o.size(); ++i) {
    for (Arm j : graph.in_neighbors(i)) o[i] += p[j];
    o[i] = std::min(o[i], 1.0);
  }
  return o;
}

std::vector<Arm> realize_observations(const FeedbackGraph& graph, Arm chosen) {
  if (chosen >= graph.nodes()) throw ConfigError("chosen arm out of range");
  const auto out = graph.out_neighbors(chosen);
  std::vector<Arm> seen(out.begin(), out.end());
  seen.insert(std::lower_bound(seen.begin(), seen.end(), chosen), chosen);
  return seen;
}

double q_value(const FeedbackGraph& graph, std::span<const double> p,
               double gamma) {
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
  const auto o = observation_probs(graph, p);
  double q = 0.0;
  for (Arm i = 0; i < o.size(); ++i) {
    if (p[i] > 0.0) q += p[i] / (o[i] + gamma);
  }
  return q;
}

double q_value_bound(std::size_t arms, std::size_t independence, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("Q bound needs gamma > 0");
  if (independence == 0) throw ConfigError("independence number must be >= 1");
  const double k = static_cast<double>(arms);
  const double a = static_cast<double>(independence);
  return 2.0 * a * std::log1p((std::ceil(k * k / gamma) + k) / a) + 2.0;
}

namespace {

using Mask = std::uint32_t;

class MaxIndependentSet {
 public:
  explicit MaxIndependentSet(std::vector<Mask> adjacency)
      : adj_(std::move(adjacency)) {}

  std::size_t solve() {
    const Mask all =
        adj_.size() == 32 ? ~Mask{0} : ((Mask{1} << adj_.size()) - 1);
    search(all, 0);
    return best_;
  }

 private:
  void search(Mask candidates, std::size_t size) {
    if (candidates == 0) {
      best_ = std::max(best_, size);
      return;
    }
    if (size + static_cast<std::size_t>(std::popcount(candidates)) <= best_) {
      return;
    }
    // Isolated candidates always belong to some maximum set.
    Mask isolated = 0;
    for (Mask rest = candidates; rest != 0; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      if ((adj_[v] & candidates) == 0) isolated |= Mask{1} << v;
    }
    if (isolated != 0) {
      search(candidates & ~isolated, size + std::popcount(isolated));
      return;
    }
    // Branch on the candidate with the most neighbours among candidates.
    int pivot = -1;
    int pivot_degree = -1;
    for (Mask rest = candidates; rest != 0; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      const int d = std::popcount(adj_[v] & candidates);
      if (d > pivot_degree) {
        pivot = v;
        pivot_degree = d;
      }
    }
    const Mask bit = Mask{1} << pivot;
    search(candidates & ~bit & ~adj_[pivot], size + 1);
    search(candidates & ~bit, size);
  }

  std::vector<Mask> adj_;
  std::size_t best_ = 0;
};

std::size_t greedy_independent_set(const FeedbackGraph& graph) {
  const std::size_t n = graph.nodes();
  std::vector<std::vector<Arm>> nbrs(n);
  for (Arm i = 0; i < n; ++i) {
    for (Arm j : graph.out_neighbors(i)) {
      nbrs[i].push_back(j);
      nbrs[j].push_back(i);
    }
  }
  std::vector<bool> alive(n, true);
  std::size_t picked = 0;
  while (true) {
    Arm best = n;
    std::size_t best_degree = 0;
    for (Arm v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      std::size_t d = 0;
      for (Arm u : nbrs[v]) d += alive[u] ? 1 : 0;
      if (best == n || d < best_degree) {
        best = v;
        best_degree = d;
      }
    }
    if (best == n) break;
    ++picked;
    alive[best] = false;
    for (Arm u : nbrs[best]) alive[u] = false;
  }
  return picked;
}

}  // namespace

IndependenceNumber independence_number(const FeedbackGraph& graph,
                                       IndependenceMode mode) {
  const std::size_t n = graph.nodes();
  if (n > kExactIndependenceLimit) {
    if (mode == IndependenceMode::Exact) {
      throw ConfigError("exact independence number limited to " +
                        std::to_string(kExactIndependenceLimit) +
                        " nodes, graph has " + std::to_string(n));
    }
    return {greedy_independent_set(graph), false};
  }
  std::vector<Mask> adj(n, 0);
  for (Arm i = 0; i < n; ++i) {
    for (Arm j : graph.out_neighbors(i)) {
      adj[i] |= Mask{1} << j;
      adj[j] |= Mask{1} << i;
    }
  }
  return {MaxIndependentSet(std::move(adj)).solve(), true};
}

}  // namespace ixbandit
