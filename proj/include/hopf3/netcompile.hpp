#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hopf3/heegaard.hpp"
#include "hopf3/hopf.hpp"
#include "hopf3/network.hpp"

namespace hopf3 {

enum class Symbol { M, Delta, S, eps, unit };
std::string to_string(Symbol s);
Symbol symbol_from_string(const std::string& s);
std::size_t in_arity(Symbol s);
std::size_t out_arity(Symbol s);

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A port of a graph node.  Ports are numbered inputs first, then outputs,
/// which is also the axis order of the bound structure tensor.
struct GraphPort {
  std::size_t node = 0;
  std::size_t port = 0;
  friend bool operator==(const GraphPort&, const GraphPort&) = default;
  friend auto operator<=>(const GraphPort&, const GraphPort&) = default;
};

/// From an output port to an input port.
struct GraphEdge {
  GraphPort from;
  GraphPort to;
  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Ported multigraph over the Hopf generators.  Free heads are unmatched
/// input ports, free tails unmatched output ports; both lists are numbered
/// and a closed loop is an edge with no endpoints.
struct ContractionGraph {
  std::vector<Symbol> nodes;
  std::vector<GraphEdge> edges;
  std::vector<GraphPort> free_heads;
  std::vector<GraphPort> free_tails;
  std::size_t closed_loops = 0;

  std::size_t add_node(Symbol s) {
    nodes.push_back(s);
    return nodes.size() - 1;
  }
  [[nodiscard]] GraphPort input(std::size_t node, std::size_t k) const { return {node, k}; }
  [[nodiscard]] GraphPort output(std::size_t node, std::size_t k) const { return {node, in_arity(nodes.at(node)) + k}; }
  void connect(GraphPort from, GraphPort to) { edges.push_back({from, to}); }

  /// Throws GraphError unless every port is used exactly once, by an edge
  /// end or a free-port entry, with correct direction.
  void validate() const;
  [[nodiscard]] bool closed() const { return free_heads.empty() && free_tails.empty(); }
  friend bool operator==(const ContractionGraph&, const ContractionGraph&) = default;
};

enum class ChainAssociation { left, right };

/// Lower circles become Delta chains fed by the cotrace, upper circles M
/// chains closed by the trace, and each crossing an edge from its lower
/// output to its upper input with an S node when the sign is negative.
ContractionGraph compile_diagram(const HeegaardDiagram& d, ChainAssociation assoc = ChainAssociation::left);

/// A one-node graph whose free ports are the node's ports in order.
ContractionGraph single_node_graph(Symbol s);

/// Replaces node v by `h`, splicing v's inputs onto h's free heads and its
/// outputs onto h's free tails in numbered order.  Nodes of the result are
/// those of g without v, followed by those of h.
ContractionGraph substitute(const ContractionGraph& g, std::size_t v, const ContractionGraph& h);

ConcreteNetwork bind(const ContractionGraph& g, const HopfAlgebra& h);

inline constexpr std::size_t kDefaultPeakBound = 10'000'000;

struct InvariantOptions {
  bool validate = true;
  std::size_t peak_bound = kDefaultPeakBound;
  ChainAssociation association = ChainAssociation::left;
  /// Slice edges until no intermediate is larger than the largest
  /// structure tensor (dim^3), when a few slices achieve it.  Trades
  /// evaluation time for memory.  Without it, edges are still sliced when
  /// the plain plan would exceed peak_bound.
  bool slice = false;
};

struct InvariantResult {
  Scalar Z;
  std::int64_t exponent = 0;  // genus - n_u - n_l
  Scalar value;
  std::size_t peak_entries = 0;
  std::size_t sliced_edges = 0;
};

/// Z = value of the bound compiled network; value = Z * dim^exponent.
/// Throws HopfError if h fails validation, ResourceLimit if the planned
/// peak exceeds the bound.
InvariantResult invariant(const HeegaardDiagram& d, const HopfAlgebra& h, const InvariantOptions& options = {});

/// Index-notation rendering.  Crossings are lettered in order of appearance
/// along the lower words; a negative crossing adds a fresh letter on its
/// upper side and a factor S_x{}^y.  Each upper word is rotated to start at
/// its smallest letter sequence.  Example: "Δ^{abc} M_{acb}".
std::string formal_expr(const HeegaardDiagram& d);
/// Like formal_expr, minimized over rotations of the lower words, with the
/// S and M factors sorted; equal for diagrams that differ by relabeling and
/// rotation.
std::string canonical_formal_expr(const HeegaardDiagram& d);
/// Reads the formal_expr grammar back into a diagram (genus = number of
/// lower circles).  Throws GraphError on malformed text.
HeegaardDiagram parse_formal_expr(const std::string& text);

nlohmann::json graph_to_json(const ContractionGraph& g);
ContractionGraph graph_from_json(const nlohmann::json& j);

}  // namespace hopf3
