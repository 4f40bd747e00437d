#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hopf3/tensor.hpp"

namespace hopf3 {

struct Port {
  std::size_t node = 0;
  std::size_t axis = 0;
  friend bool operator==(const Port&, const Port&) = default;
  friend auto operator<=>(const Port&, const Port&) = default;
};

/// An edge runs from an up-variance port (tail) to a down-variance port (head).
struct NetworkEdge {
  Port tail;
  Port head;
};

/// A tensor network.  Nodes share their tensors; unmatched ports are listed
/// explicitly as free heads (down ports) and free tails (up ports), and
/// closed loops are edges with no endpoints at all.
class ConcreteNetwork {
 public:
  ConcreteNetwork() = default;
  explicit ConcreteNetwork(Field field) : field_(field) {}

  std::size_t add_node(std::shared_ptr<const Tensor> tensor);
  std::size_t add_node(Tensor tensor) { return add_node(std::make_shared<const Tensor>(std::move(tensor))); }
  void connect(Port tail, Port head) { edges_.push_back({tail, head}); }
  void add_free_head(Port p) { free_heads_.push_back(p); }
  void add_free_tail(Port p) { free_tails_.push_back(p); }
  void add_closed_loop(std::size_t dim) { closed_loops_.push_back(dim); }
  /// Appends every port not yet used by an edge or free list, in (node, axis)
  /// order, to the free head or free tail list according to its variance.
  void collect_free_ports();
  void replace_node(std::size_t node, std::shared_ptr<const Tensor> tensor);

  /// Throws ShapeError describing the first violated structural invariant.
  void validate() const;

  [[nodiscard]] Field field() const { return field_; }
  [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
  [[nodiscard]] const Tensor& node(std::size_t i) const { return *nodes_[i]; }
  [[nodiscard]] const std::shared_ptr<const Tensor>& node_ptr(std::size_t i) const { return nodes_[i]; }
  [[nodiscard]] const std::vector<NetworkEdge>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<Port>& free_heads() const { return free_heads_; }
  [[nodiscard]] const std::vector<Port>& free_tails() const { return free_tails_; }
  [[nodiscard]] const std::vector<std::size_t>& closed_loops() const { return closed_loops_; }

 private:
  Field field_ = Field::rationals();
  std::vector<std::shared_ptr<const Tensor>> nodes_;
  std::vector<NetworkEdge> edges_;
  std::vector<Port> free_heads_;
  std::vector<Port> free_tails_;
  std::vector<std::size_t> closed_loops_;
};

/// One step of a contraction plan.  Operands are slot ids: slots
/// 0..n-1 are the network's nodes, and merge step k creates slot n+k.
struct PlanStep {
  enum class Kind { self_loop, merge };
  Kind kind = Kind::merge;
  std::size_t a = 0;
  std::size_t b = 0;  // unused for self_loop
  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

/// Edges in `sliced_edges` are not contracted by the steps: evaluation fixes
/// their values, runs the steps once per assignment and sums the results,
/// so no intermediate carries a sliced index.
struct ContractionPlan {
  std::vector<PlanStep> steps;
  std::vector<std::size_t> sliced_edges;
  std::size_t peak_entries = 1;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
};

/// Node count up to which plan_contraction searches exhaustively.
inline constexpr std::size_t kExhaustivePlanNodes = 16;
/// Randomized greedy passes tried above that size.
inline constexpr std::size_t kGreedyTrials = 128;

struct PlanOptions {
  /// When nonzero and the planned peak exceeds it, edges are sliced, each
  /// round adding the smallest set of edges that lowers the re-planned
  /// peak, until the peak is within target, no slice helps, or max_slices
  /// is reached.
  std::size_t target_peak = 0;
  std::size_t max_slices = 3;
};

/// Chooses a contraction order minimizing predicted peak intermediate size:
/// exact subset dynamic programming for small networks; for larger ones the
/// best of greedy smallest-result-first (ties to the lowest slot ids) and
/// kGreedyTrials greedy passes with seeded random perturbation.
ContractionPlan plan_contraction(const ConcreteNetwork& net, const PlanOptions& options = {});
/// Predicted peak of an arbitrary plan; throws ShapeError if invalid.
std::size_t plan_peak(const ConcreteNetwork& net, const ContractionPlan& plan);

/// The partition tensor: free heads (in list order) become the leading
/// axes, then free tails.  Each closed loop multiplies by its dimension.
Tensor evaluate_network(const ConcreteNetwork& net, const ContractionPlan& plan);
Tensor evaluate_network(const ConcreteNetwork& net);

class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Index-notation contraction helper.  Each operand is a tensor with one
/// index label per axis; a label shared by an up axis of one operand and a
/// down axis of another (or the same) operand is summed.  Labels appearing
/// once are free and are returned in the order given by `output`.
///
///   einsum({{&M, {"a","b","x"}}, {&M, {"x","c","d"}}}, {"a","b","c","d"})
struct EinsumOperand {
  const Tensor* tensor;
  std::vector<std::string> labels;
};
Tensor einsum(const std::vector<EinsumOperand>& operands, const std::vector<std::string>& output,
              Field field);

}  // namespace hopf3
