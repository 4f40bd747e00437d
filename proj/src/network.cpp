#include "hopf3/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <unordered_map>

namespace hopf3 {

std::size_t ConcreteNetwork::add_node(std::shared_ptr<const Tensor> tensor) {
  if (!tensor) throw ShapeError("null tensor node");
  if (nodes_.empty() && edges_.empty()) field_ = tensor->field();
  nodes_.push_back(std::move(tensor));
  return nodes_.size() - 1;
}

void ConcreteNetwork::replace_node(std::size_t node, std::shared_ptr<const Tensor> tensor) {
  if (node >= nodes_.size()) throw ShapeError("replace_node: no such node");
  if (!tensor || tensor->axes() != nodes_[node]->axes()) {
    throw ShapeError("replace_node: replacement has a different shape");
  }
  nodes_[node] = std::move(tensor);
}

void ConcreteNetwork::collect_free_ports() {
  std::set<Port> used;
  for (const auto& e : edges_) {
    used.insert(e.tail);
    used.insert(e.head);
  }
  used.insert(free_heads_.begin(), free_heads_.end());
  used.insert(free_tails_.begin(), free_tails_.end());
  for (std::size_t n = 0; n < nodes_.size(); ++n) {
    for (std::size_t k = 0; k < nodes_[n]->rank(); ++k) {
      Port p{n, k};
      if (used.count(p) != 0) continue;
      if (nodes_[n]->axes()[k].variance == Variance::down) {
        free_heads_.push_back(p);
      } else {
        free_tails_.push_back(p);
      }
    }
  }
}

void ConcreteNetwork::validate() const {
  auto port_axis = [&](Port p) -> const Axis& {
    if (p.node >= nodes_.size()) throw ShapeError("port refers to missing node " + std::to_string(p.node));
    if (p.axis >= nodes_[p.node]->rank()) {
      throw ShapeError("port refers to missing axis " + std::to_string(p.axis) + " of node " +
                       std::to_string(p.node));
    }
    return nodes_[p.node]->axes()[p.axis];
  };
  std::set<Port> used;
  auto claim = [&](Port p) {
    if (!used.insert(p).second) {
      throw ShapeError("port (" + std::to_string(p.node) + "," + std::to_string(p.axis) + ") used twice");
    }
  };
  for (const auto& n : nodes_) {
    if (!(n->field() == field_)) throw FieldMismatch("network nodes over different fields");
  }
  for (const auto& e : edges_) {
    const Axis& t = port_axis(e.tail);
    const Axis& h = port_axis(e.head);
    if (t.variance != Variance::up) throw ShapeError("edge tail is not an up port");
    if (h.variance != Variance::down) throw ShapeError("edge head is not a down port");
    if (t.dim != h.dim) throw ShapeError("edge joins ports of different dimension");
    claim(e.tail);
    claim(e.head);
  }
  for (Port p : free_heads_) {
    if (port_axis(p).variance != Variance::down) throw ShapeError("free head is not a down port");
    claim(p);
  }
  for (Port p : free_tails_) {
    if (port_axis(p).variance != Variance::up) throw ShapeError("free tail is not an up port");
    claim(p);
  }
  std::size_t total = 0;
  for (const auto& n : nodes_) total += n->rank();
  if (used.size() != total) throw ShapeError("network has ports that are neither connected nor free");
  for (std::size_t d : closed_loops_) {
    if (d == 0) throw ShapeError("closed loop of dimension 0");
  }
}

namespace {

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

// A leg is one axis of an intermediate tensor: either one end of an edge or a
// free port.
struct Leg {
  enum class Kind { edge_tail, edge_head, free_head, free_tail };
  Kind kind;
  std::size_t id;
  std::size_t dim;
};

// Per-node legs in axis order, and whether each edge is a self-loop.
struct NetworkLegs {
  std::vector<std::vector<Leg>> node_legs;
  std::vector<bool> self_loop;
  std::vector<std::size_t> edge_dim;
};

NetworkLegs legs_of(const ConcreteNetwork& net) {
  NetworkLegs out;
  out.node_legs.resize(net.node_count());
  for (std::size_t n = 0; n < net.node_count(); ++n) {
    out.node_legs[n].resize(net.node(n).rank(), Leg{Leg::Kind::free_head, 0, 0});
  }
  const auto& edges = net.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::size_t dim = net.node(edges[e].tail.node).axes()[edges[e].tail.axis].dim;
    out.node_legs[edges[e].tail.node][edges[e].tail.axis] = {Leg::Kind::edge_tail, e, dim};
    out.node_legs[edges[e].head.node][edges[e].head.axis] = {Leg::Kind::edge_head, e, dim};
    out.self_loop.push_back(edges[e].tail.node == edges[e].head.node);
    out.edge_dim.push_back(dim);
  }
  for (std::size_t i = 0; i < net.free_heads().size(); ++i) {
    Port p = net.free_heads()[i];
    out.node_legs[p.node][p.axis] = {Leg::Kind::free_head, i, net.node(p.node).axes()[p.axis].dim};
  }
  for (std::size_t i = 0; i < net.free_tails().size(); ++i) {
    Port p = net.free_tails()[i];
    out.node_legs[p.node][p.axis] = {Leg::Kind::free_tail, i, net.node(p.node).axes()[p.axis].dim};
  }
  return out;
}

bool is_edge(const Leg& l) { return l.kind == Leg::Kind::edge_tail || l.kind == Leg::Kind::edge_head; }

// The subtensor with the given (axis, value) pairs held fixed.
Tensor fix_axes(const Tensor& t, const std::vector<std::pair<std::size_t, std::size_t>>& pins) {
  std::vector<bool> pinned(t.rank(), false);
  std::vector<std::size_t> index(t.rank(), 0);
  for (auto [axis, value] : pins) {
    pinned[axis] = true;
    index[axis] = value;
  }
  std::vector<Axis> axes;
  std::vector<std::size_t> open;
  for (std::size_t k = 0; k < t.rank(); ++k) {
    if (!pinned[k]) {
      axes.push_back(t.axes()[k]);
      open.push_back(k);
    }
  }
  const std::size_t n = shape_size(axes);
  std::vector<Scalar> entries;
  entries.reserve(n);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t rem = flat;
    for (std::size_t j = open.size(); j-- > 0;) {
      index[open[j]] = rem % axes[j].dim;
      rem /= axes[j].dim;
    }
    entries.push_back(t.at(index));
  }
  return Tensor(std::move(axes), std::move(entries));
}

// Dense 64-bit operands, used when every entry is a small integer (or a
// residue).  Each step checks that its sums stay below 2^62 and throws
// NotSmall otherwise, which sends evaluation back to exact scalars.
struct NotSmall {};

struct SmallTensor {
  std::vector<Axis> axes;
  std::vector<std::int64_t> v;
  std::uint64_t max_abs = 0;
};

constexpr unsigned __int128 kSmallLimit = static_cast<unsigned __int128>(1) << 62;

std::uint64_t magnitude(std::int64_t x) { return x < 0 ? 0 - static_cast<std::uint64_t>(x) : static_cast<std::uint64_t>(x); }

void finish(SmallTensor& t, std::uint64_t p) {
  t.max_abs = 0;
  for (std::int64_t& x : t.v) {
    if (p != 0) {
      x %= static_cast<std::int64_t>(p);
      if (x < 0) x += static_cast<std::int64_t>(p);
    }
    t.max_abs = std::max(t.max_abs, magnitude(x));
  }
}

SmallTensor load_small(const Tensor& t) {
  SmallTensor s{t.axes(), {}, 0};
  s.v.reserve(t.size());
  for (const Scalar& x : t.entries()) {
    const Rational& q = x.value();
    if (!q.is_small() || q.small_den() != 1 || magnitude(q.small_num()) >= kSmallLimit) throw NotSmall{};
    s.v.push_back(q.small_num());
    s.max_abs = std::max(s.max_abs, magnitude(q.small_num()));
  }
  return s;
}

Tensor to_tensor(const Tensor& t, Field) { return t; }

Tensor to_tensor(const SmallTensor& t, Field f) {
  std::vector<Scalar> entries;
  entries.reserve(t.v.size());
  for (std::int64_t x : t.v) entries.push_back(Scalar::from_integer(f, x));
  return Tensor(t.axes, std::move(entries));
}

// Entries of t with axes reordered by perm.
std::vector<std::int64_t> permuted(const SmallTensor& t, const std::vector<std::size_t>& perm) {
  const std::size_t r = t.axes.size();
  std::vector<std::size_t> old_strides(r);
  std::size_t acc = 1;
  for (std::size_t k = r; k-- > 0;) {
    old_strides[k] = acc;
    acc *= t.axes[k].dim;
  }
  bool identity = true;
  for (std::size_t k = 0; k < r; ++k) identity = identity && perm[k] == k;
  if (identity) return t.v;
  std::vector<std::size_t> dims(r);
  std::vector<std::size_t> stride(r);
  for (std::size_t k = 0; k < r; ++k) {
    dims[k] = t.axes[perm[k]].dim;
    stride[k] = old_strides[perm[k]];
  }
  std::vector<std::int64_t> out(t.v.size());
  std::vector<std::size_t> idx(r, 0);
  std::size_t src = 0;
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = t.v[src];
    for (std::size_t k = r; k-- > 0;) {
      if (++idx[k] < dims[k]) {
        src += stride[k];
        break;
      }
      src -= stride[k] * (dims[k] - 1);
      idx[k] = 0;
    }
  }
  return out;
}

SmallTensor fix_axes(const SmallTensor& t, const std::vector<std::pair<std::size_t, std::size_t>>& pins,
                     std::uint64_t p) {
  const std::size_t r = t.axes.size();
  std::vector<bool> pinned(r, false);
  std::vector<std::size_t> perm;
  std::size_t base = 0;
  std::vector<std::size_t> strides(r);
  std::size_t acc = 1;
  for (std::size_t k = r; k-- > 0;) {
    strides[k] = acc;
    acc *= t.axes[k].dim;
  }
  for (auto [axis, value] : pins) {
    pinned[axis] = true;
    base += value * strides[axis];
  }
  SmallTensor out;
  std::vector<std::size_t> open;
  for (std::size_t k = 0; k < r; ++k) {
    if (!pinned[k]) {
      out.axes.push_back(t.axes[k]);
      open.push_back(k);
    }
  }
  const std::size_t n = shape_size(out.axes);
  out.v.resize(n);
  std::vector<std::size_t> idx(open.size(), 0);
  std::size_t src = base;
  for (std::size_t i = 0; i < n; ++i) {
    out.v[i] = t.v[src];
    for (std::size_t j = open.size(); j-- > 0;) {
      if (++idx[j] < out.axes[j].dim) {
        src += strides[open[j]];
        break;
      }
      src -= strides[open[j]] * (out.axes[j].dim - 1);
      idx[j] = 0;
    }
  }
  finish(out, p);
  return out;
}

Tensor fix_axes(const Tensor& t, const std::vector<std::pair<std::size_t, std::size_t>>& pins, std::uint64_t) {
  return fix_axes(t, pins);
}

SmallTensor contract_pair(const SmallTensor& t, std::size_t up, std::size_t down, std::uint64_t p) {
  const std::size_t dim = t.axes[up].dim;
  if (static_cast<unsigned __int128>(t.max_abs) * dim >= kSmallLimit) throw NotSmall{};
  std::vector<std::size_t> perm;
  for (std::size_t k = 0; k < t.axes.size(); ++k) {
    if (k != up && k != down) perm.push_back(k);
  }
  perm.push_back(up);
  perm.push_back(down);
  std::vector<std::int64_t> x = permuted(t, perm);
  SmallTensor out;
  for (std::size_t k = 0; k + 2 < perm.size(); ++k) out.axes.push_back(t.axes[perm[k]]);
  const std::size_t block = dim * dim;
  out.v.assign(x.size() / block, 0);
  for (std::size_t i = 0; i < out.v.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) out.v[i] += x[i * block + j * dim + j];
  }
  finish(out, p);
  return out;
}

Tensor contract_pair(const Tensor& t, std::size_t up, std::size_t down, std::uint64_t) {
  return contract_pair(t, up, down);
}

SmallTensor contract(const SmallTensor& a, const SmallTensor& b,
                     const std::vector<std::pair<std::size_t, std::size_t>>& pairs, std::uint64_t p) {
  std::vector<bool> a_used(a.axes.size(), false);
  std::vector<bool> b_used(b.axes.size(), false);
  std::size_t shared = 1;
  for (auto [ia, ib] : pairs) {
    a_used[ia] = true;
    b_used[ib] = true;
    shared *= a.axes[ia].dim;
  }
  if (static_cast<unsigned __int128>(a.max_abs) * b.max_abs * shared >= kSmallLimit) throw NotSmall{};
  std::vector<std::size_t> a_perm;
  std::vector<std::size_t> b_perm;
  SmallTensor out;
  for (std::size_t k = 0; k < a.axes.size(); ++k) {
    if (!a_used[k]) {
      a_perm.push_back(k);
      out.axes.push_back(a.axes[k]);
    }
  }
  for (auto [ia, ib] : pairs) {
    a_perm.push_back(ia);
    b_perm.push_back(ib);
  }
  for (std::size_t k = 0; k < b.axes.size(); ++k) {
    if (!b_used[k]) {
      b_perm.push_back(k);
      out.axes.push_back(b.axes[k]);
    }
  }
  std::vector<std::int64_t> x = permuted(a, a_perm);
  std::vector<std::int64_t> y = permuted(b, b_perm);
  const std::size_t rows = x.size() / shared;
  const std::size_t cols = y.size() / shared;
  out.v.assign(rows * cols, 0);
  for (std::size_t i = 0; i < rows; ++i) {
    std::int64_t* orow = out.v.data() + i * cols;
    for (std::size_t k = 0; k < shared; ++k) {
      const std::int64_t xv = x[i * shared + k];
      if (xv == 0) continue;
      const std::int64_t* brow = y.data() + k * cols;
      for (std::size_t j = 0; j < cols; ++j) orow[j] += xv * brow[j];
    }
  }
  finish(out, p);
  return out;
}

Tensor contract(const Tensor& a, const Tensor& b, const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                std::uint64_t) {
  return contract(a, b, pairs);
}

std::size_t legs_size(const std::vector<Leg>& legs) {
  std::size_t s = 1;
  for (const Leg& l : legs) s = sat_mul(s, l.dim);
  return s;
}

Tensor load_operand(const Tensor& t, Tensor*) { return t; }
SmallTensor load_operand(const Tensor& t, SmallTensor*) { return load_small(t); }

// Runs a plan over leg bookkeeping, optionally carrying operands of type T.
template <class T = Tensor>
class PlanExecutor {
 public:
  // `fixed` maps sliced edge ids to their values for this run.
  PlanExecutor(const ConcreteNetwork& net, bool with_tensors, const std::map<std::size_t, std::size_t>& fixed = {})
      : net_(net), with_tensors_(with_tensors), p_(net.field().characteristic()) {
    NetworkLegs nl = legs_of(net);
    legs_ = std::move(nl.node_legs);
    alive_.assign(legs_.size(), true);
    for (std::size_t n = 0; n < net.node_count(); ++n) {
      std::vector<std::pair<std::size_t, std::size_t>> pins;
      std::vector<Leg> kept;
      for (std::size_t k = 0; k < legs_[n].size(); ++k) {
        const Leg& l = legs_[n][k];
        auto it = is_edge(l) ? fixed.find(l.id) : fixed.end();
        if (it != fixed.end()) {
          if (nl.self_loop[l.id]) throw ShapeError("plan slices a self-loop");
          pins.emplace_back(k, it->second);
        } else {
          kept.push_back(l);
        }
      }
      legs_[n] = std::move(kept);
      peak_ = std::max(peak_, legs_size(legs_[n]));
      if (with_tensors_) {
        T t = load_operand(net.node(n), static_cast<T*>(nullptr));
        tensors_.push_back(pins.empty() ? std::move(t) : fix_axes(t, pins, p_));
      }
    }
  }

  void run(const ContractionPlan& plan) {
    for (const PlanStep& s : plan.steps) {
      if (s.kind == PlanStep::Kind::self_loop) {
        self_loop(live(s.a));
      } else {
        merge(live(s.a), live(s.b));
      }
    }
    std::size_t remaining = 0;
    for (std::size_t i = 0; i < alive_.size(); ++i) {
      if (!alive_[i]) continue;
      ++remaining;
      for (const Leg& l : legs_[i]) {
        if (is_edge(l)) throw ShapeError("plan leaves an edge uncontracted");
      }
    }
    if (remaining > 1) throw ShapeError("plan leaves more than one operand");
  }

  [[nodiscard]] std::size_t peak() const { return peak_; }
  // Legs of every operand ever created, inputs first.
  [[nodiscard]] const std::vector<std::vector<Leg>>& slot_legs() const { return legs_; }

  Tensor result() {
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < alive_.size(); ++i) {
      if (alive_[i]) last = i;
    }
    Tensor t = last ? to_tensor(tensors_[*last], net_.field()) : Tensor::scalar(Scalar::one(net_.field()));
    std::vector<Leg> legs = last ? legs_[*last] : std::vector<Leg>{};
    // heads first in list order, then tails
    std::vector<std::size_t> perm;
    const std::size_t heads = net_.free_heads().size();
    std::vector<std::size_t> position(legs.size());
    for (std::size_t k = 0; k < legs.size(); ++k) {
      position[k] = legs[k].kind == Leg::Kind::free_head ? legs[k].id : heads + legs[k].id;
    }
    perm.resize(legs.size());
    for (std::size_t k = 0; k < legs.size(); ++k) perm[position[k]] = k;
    t = permute_axes(t, perm);
    for (std::size_t d : net_.closed_loops()) {
      Scalar factor = Scalar::from_integer(net_.field(), static_cast<std::int64_t>(d));
      std::vector<Scalar> entries;
      entries.reserve(t.size());
      for (const Scalar& x : t.entries()) entries.push_back(x * factor);
      t = Tensor(t.axes(), std::move(entries));
    }
    return t;
  }

 private:
  std::size_t live(std::size_t slot) const {
    if (slot >= alive_.size() || !alive_[slot]) throw ShapeError("plan references a consumed or missing operand");
    return slot;
  }

  void self_loop(std::size_t s) {
    for (;;) {
      auto& legs = legs_[s];
      std::optional<std::pair<std::size_t, std::size_t>> pair;
      for (std::size_t i = 0; i < legs.size() && !pair; ++i) {
        if (legs[i].kind != Leg::Kind::edge_tail) continue;
        for (std::size_t j = 0; j < legs.size(); ++j) {
          if (legs[j].kind == Leg::Kind::edge_head && legs[j].id == legs[i].id) {
            pair = {i, j};
            break;
          }
        }
      }
      if (!pair) break;
      auto [up, down] = *pair;
      if (with_tensors_) tensors_[s] = contract_pair(tensors_[s], up, down, p_);
      std::vector<Leg> rest;
      for (std::size_t k = 0; k < legs.size(); ++k) {
        if (k != up && k != down) rest.push_back(legs[k]);
      }
      legs = std::move(rest);
    }
  }

  void merge(std::size_t a, std::size_t b) {
    if (a == b) throw ShapeError("plan merges an operand with itself");
    for (std::size_t s : {a, b}) {
      const auto& legs = legs_[s];
      for (std::size_t i = 0; i < legs.size(); ++i) {
        for (std::size_t j = i + 1; j < legs.size(); ++j) {
          if (is_edge(legs[i]) && is_edge(legs[j]) && legs[i].id == legs[j].id) {
            throw ShapeError("plan merges an operand with an uneliminated self-loop");
          }
        }
      }
    }
    const auto& la = legs_[a];
    const auto& lb = legs_[b];
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<bool> a_used(la.size(), false);
    std::vector<bool> b_used(lb.size(), false);
    for (std::size_t i = 0; i < la.size(); ++i) {
      if (!is_edge(la[i])) continue;
      for (std::size_t j = 0; j < lb.size(); ++j) {
        if (is_edge(lb[j]) && lb[j].id == la[i].id) {
          pairs.emplace_back(i, j);
          a_used[i] = true;
          b_used[j] = true;
        }
      }
    }
    std::vector<Leg> merged;
    for (std::size_t i = 0; i < la.size(); ++i) {
      if (!a_used[i]) merged.push_back(la[i]);
    }
    for (std::size_t j = 0; j < lb.size(); ++j) {
      if (!b_used[j]) merged.push_back(lb[j]);
    }
    peak_ = std::max(peak_, legs_size(merged));
    if (with_tensors_) {
      tensors_.push_back(contract(tensors_[a], tensors_[b], pairs, p_));
    }
    legs_.push_back(std::move(merged));
    alive_[a] = false;
    alive_[b] = false;
    alive_.push_back(true);
  }

  const ConcreteNetwork& net_;
  bool with_tensors_;
  std::uint64_t p_;
  std::vector<std::vector<Leg>> legs_;
  std::vector<bool> alive_;
  std::vector<T> tensors_;
  std::size_t peak_ = 1;
};

struct PlannerInput {
  std::size_t n = 0;
  std::vector<std::size_t> input_size;  // before self-loop elimination
  std::vector<std::size_t> free_size;   // product of free-port dims per node
  // non-self-loop edges as (u, v, dim)
  struct Link {
    std::size_t u, v, dim;
  };
  std::vector<Link> links;
  std::vector<bool> has_self_loop;
};

PlannerInput planner_input(const ConcreteNetwork& net, const std::vector<std::size_t>& sliced) {
  PlannerInput in;
  in.n = net.node_count();
  in.input_size.resize(in.n);
  in.free_size.assign(in.n, 1);
  in.has_self_loop.assign(in.n, false);
  for (std::size_t v = 0; v < in.n; ++v) in.input_size[v] = net.node(v).size();
  for (Port p : net.free_heads()) in.free_size[p.node] = sat_mul(in.free_size[p.node], net.node(p.node).axes()[p.axis].dim);
  for (Port p : net.free_tails()) in.free_size[p.node] = sat_mul(in.free_size[p.node], net.node(p.node).axes()[p.axis].dim);
  const auto& edges = net.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    std::size_t dim = net.node(e.tail.node).axes()[e.tail.axis].dim;
    if (std::find(sliced.begin(), sliced.end(), i) != sliced.end()) {
      in.input_size[e.tail.node] /= dim;
      in.input_size[e.head.node] /= dim;
    } else if (e.tail.node == e.head.node) {
      in.has_self_loop[e.tail.node] = true;
    } else {
      in.links.push_back({e.tail.node, e.head.node, dim});
    }
  }
  return in;
}

// Exact search over merge trees whose every operand is connected: best[S]
// minimizes (peak, total work) for each connected node set S, built from
// connected complement pairs.  Components are then joined smallest first.
void plan_exhaustive(const PlannerInput& in, ContractionPlan& plan) {
  using Mask = std::uint32_t;
  const std::size_t n = in.n;
  const Mask full = static_cast<Mask>((std::uint64_t{1} << n) - 1);
  std::vector<Mask> adj(n, 0);
  for (const auto& l : in.links) {
    adj[l.u] |= Mask{1} << l.v;
    adj[l.v] |= Mask{1} << l.u;
  }
  auto size_of = [&](Mask s) {
    std::size_t sz = 1;
    for (std::size_t v = 0; v < n; ++v) {
      if (s >> v & 1U) sz = sat_mul(sz, in.free_size[v]);
    }
    for (const auto& l : in.links) {
      if (((s >> l.u) & 1U) != ((s >> l.v) & 1U)) sz = sat_mul(sz, l.dim);
    }
    return sz;
  };
  auto neighbours = [&](Mask s, Mask exclude) {
    Mask nb = 0;
    for (Mask r = s; r != 0; r &= r - 1) nb |= adj[static_cast<std::size_t>(std::countr_zero(r))];
    return nb & ~s & ~exclude;
  };

  // connected subsets, each once
  std::vector<Mask> csg;
  auto grow = [&](auto&& self, Mask s, Mask exclude, auto&& emit) -> void {
    Mask nb = neighbours(s, exclude);
    if (nb == 0) return;
    for (Mask sub = nb; sub != 0; sub = (sub - 1) & nb) emit(s | sub);
    for (Mask sub = nb; sub != 0; sub = (sub - 1) & nb) self(self, s | sub, exclude | nb, emit);
  };
  for (std::size_t i = n; i-- > 0;) {
    Mask v = Mask{1} << i;
    csg.push_back(v);
    grow(grow, v, static_cast<Mask>((std::uint64_t{1} << (i + 1)) - 1), [&](Mask s) { csg.push_back(s); });
  }
  // connected complements adjacent to each, not containing a lower node
  std::vector<std::pair<Mask, Mask>> pairs;
  for (Mask s1 : csg) {
    Mask low = s1 & (~s1 + 1);
    Mask exclude = ((low << 1) - 1) | s1;
    Mask nb = neighbours(s1, exclude);
    for (std::size_t i = n; i-- > 0;) {
      Mask v = Mask{1} << i;
      if (!(nb & v)) continue;
      pairs.emplace_back(s1, v);
      Mask below = static_cast<Mask>((std::uint64_t{1} << (i + 1)) - 1) & nb;
      grow(grow, v, exclude | below, [&](Mask s2) { pairs.emplace_back(s1, s2); });
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](auto a, auto b) { return (a.first | a.second) < (b.first | b.second); });

  const std::size_t inf = std::numeric_limits<std::size_t>::max();
  std::unordered_map<Mask, std::size_t> index;
  struct Best {
    std::size_t size, peak, total;
    Mask split;
  };
  std::vector<Best> best;
  auto slot = [&](Mask s) -> Best& {
    auto [it, inserted] = index.emplace(s, best.size());
    if (inserted) best.push_back({size_of(s), inf, inf, 0});
    return best[it->second];
  };
  for (std::size_t v = 0; v < n; ++v) {
    Best& b = slot(Mask{1} << v);
    b.peak = std::max(in.input_size[v], b.size);
    b.total = 0;
  }
  for (auto [a, b] : pairs) {
    Mask s = a | b;
    const Best& x = best[index.at(a)];
    const Best& y = best[index.at(b)];
    std::size_t xp = x.peak, yp = y.peak, xt = x.total, yt = y.total;
    Best& r = slot(s);
    std::size_t p = std::max({xp, yp, r.size});
    std::size_t t = xt > inf - yt ? inf : xt + yt;
    t = t > inf - r.size ? inf : t + r.size;
    if (p < r.peak || (p == r.peak && t < r.total)) {
      r.peak = p;
      r.total = t;
      r.split = a;
    }
  }

  std::size_t next_slot = n;
  auto emit = [&](auto&& self, Mask s) -> std::size_t {
    if ((s & (s - 1)) == 0) return static_cast<std::size_t>(std::countr_zero(s));
    Mask a = best[index.at(s)].split;
    std::size_t x = self(self, a);
    std::size_t y = self(self, s ^ a);
    plan.steps.push_back({PlanStep::Kind::merge, x, y});
    return next_slot++;
  };
  // components, lowest node first
  struct Part {
    std::size_t slot, size;
  };
  std::vector<Part> parts;
  std::size_t peak = 1;
  for (Mask rest = full; rest != 0;) {
    Mask comp = rest & (~rest + 1);
    for (Mask grown = comp;; comp = grown) {
      grown = comp | neighbours(comp, 0);
      if (grown == comp) break;
    }
    rest &= ~comp;
    const Best& b = best[index.at(comp)];
    peak = std::max(peak, b.peak);
    parts.push_back({emit(emit, comp), b.size});
  }
  while (parts.size() > 1) {
    std::stable_sort(parts.begin(), parts.end(), [](const Part& a, const Part& b) { return a.size < b.size; });
    Part x = parts[0];
    Part y = parts[1];
    plan.steps.push_back({PlanStep::Kind::merge, x.slot, y.slot});
    Part m{next_slot++, sat_mul(x.size, y.size)};
    peak = std::max(peak, m.size);
    parts.erase(parts.begin(), parts.begin() + 2);
    parts.push_back(m);
  }
  plan.peak_entries = peak;
}

// One greedy pass.  Candidates are connected pairs scored by result size
// (mode 0) or by result size minus operand sizes (mode 1); with `noise` the
// score is perturbed so that repeated passes explore nearby orders.
struct GreedyRun {
  std::vector<PlanStep> steps;
  std::size_t peak = 1;
  std::size_t total = 0;
};

GreedyRun greedy_pass(const PlannerInput& in, int mode, std::mt19937_64* noise) {
  struct Slot {
    std::size_t size;
    std::map<std::size_t, std::size_t> shared;  // neighbour slot -> product of shared dims
  };
  GreedyRun run;
  std::vector<Slot> slots;
  std::vector<bool> alive;
  for (std::size_t v = 0; v < in.n; ++v) {
    slots.push_back({in.free_size[v], {}});
    alive.push_back(true);
    run.peak = std::max(run.peak, in.input_size[v]);
  }
  for (const auto& l : in.links) {
    slots[l.u].size = sat_mul(slots[l.u].size, l.dim);
    slots[l.v].size = sat_mul(slots[l.v].size, l.dim);
    auto bump = [&](std::size_t x, std::size_t y) {
      auto [it, inserted] = slots[x].shared.emplace(y, l.dim);
      if (!inserted) it->second = sat_mul(it->second, l.dim);
    };
    bump(l.u, l.v);
    bump(l.v, l.u);
  }
  for (std::size_t v = 0; v < in.n; ++v) run.peak = std::max(run.peak, slots[v].size);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto score = [&](std::size_t r, std::size_t x, std::size_t y) {
    double s = static_cast<double>(r);
    if (mode == 1) s -= static_cast<double>(x) + static_cast<double>(y);
    if (noise != nullptr) s -= std::log(-std::log(unit(*noise))) * std::max(1.0, static_cast<double>(r)) * 0.5;
    return s;
  };
  std::size_t live_count = in.n;
  while (live_count > 1) {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    std::size_t best_size = std::numeric_limits<std::size_t>::max();
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!alive[i]) continue;
      for (auto [j, sh] : slots[i].shared) {
        if (j <= i) continue;
        std::size_t r = sat_mul(slots[i].size / sh, slots[j].size / sh);
        double sc = score(r, slots[i].size, slots[j].size);
        if (sc < best_score) {
          best_score = sc;
          best_size = r;
          best = {i, j};
        }
      }
    }
    if (!best) {
      // disconnected: outer product of the two smallest operands
      for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!alive[i]) continue;
        for (std::size_t j = i + 1; j < slots.size(); ++j) {
          if (!alive[j]) continue;
          std::size_t r = sat_mul(slots[i].size, slots[j].size);
          if (r < best_size) {
            best_size = r;
            best = {i, j};
          }
        }
      }
    }
    auto [a, b] = *best;
    Slot merged{best_size, {}};
    for (std::size_t src : {a, b}) {
      for (auto [k, sh] : slots[src].shared) {
        if (k == a || k == b) continue;
        auto [it, inserted] = merged.shared.emplace(k, sh);
        if (!inserted) it->second = sat_mul(it->second, sh);
      }
    }
    std::size_t id = slots.size();
    for (auto [k, sh] : merged.shared) {
      slots[k].shared.erase(a);
      slots[k].shared.erase(b);
      slots[k].shared.emplace(id, sh);
    }
    alive[a] = false;
    alive[b] = false;
    slots[a].shared.clear();
    slots[b].shared.clear();
    slots.push_back(std::move(merged));
    alive.push_back(true);
    run.steps.push_back({PlanStep::Kind::merge, a, b});
    run.peak = std::max(run.peak, best_size);
    run.total = run.total > std::numeric_limits<std::size_t>::max() - best_size ? std::numeric_limits<std::size_t>::max()
                                                                                : run.total + best_size;
    --live_count;
  }
  return run;
}

// Both deterministic passes plus seeded randomized ones; keeps the best
// (peak, total).
void plan_greedy(const PlannerInput& in, ContractionPlan& plan) {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::optional<GreedyRun> best;
  auto consider = [&](GreedyRun run) {
    if (!best || run.peak < best->peak || (run.peak == best->peak && run.total < best->total)) best = std::move(run);
  };
  consider(greedy_pass(in, 0, nullptr));
  consider(greedy_pass(in, 1, nullptr));
  for (std::size_t trial = 0; trial < kGreedyTrials; ++trial) consider(greedy_pass(in, static_cast<int>(trial % 2), &rng));
  plan.steps.insert(plan.steps.end(), best->steps.begin(), best->steps.end());
  plan.peak_entries = best->peak;
}

}  // namespace

namespace {

std::size_t peak_with_slices(const ConcreteNetwork& net, const ContractionPlan& plan) {
  std::map<std::size_t, std::size_t> fixed;
  for (std::size_t e : plan.sliced_edges) fixed[e] = 0;
  PlanExecutor ex(net, false, fixed);
  ex.run(plan);
  return ex.peak();
}

ContractionPlan plan_order(const ConcreteNetwork& net, const std::vector<std::size_t>& sliced) {
  ContractionPlan plan;
  plan.node_count = net.node_count();
  plan.edge_count = net.edges().size();
  plan.sliced_edges = sliced;
  PlannerInput in = planner_input(net, sliced);
  for (std::size_t v = 0; v < in.n; ++v) {
    if (in.has_self_loop[v]) plan.steps.push_back({PlanStep::Kind::self_loop, v, 0});
  }
  if (in.n == 0) {
    plan.peak_entries = 1;
  } else if (in.n <= kExhaustivePlanNodes) {
    plan_exhaustive(in, plan);
  } else {
    plan_greedy(in, plan);
  }
  if (!sliced.empty()) plan.peak_entries = peak_with_slices(net, plan);
  return plan;
}

// Edges ranked by how many over-target intermediates of `plan` carry them.
std::vector<std::size_t> slice_candidates(const ConcreteNetwork& net, const ContractionPlan& plan,
                                          std::size_t target, std::size_t limit) {
  std::map<std::size_t, std::size_t> fixed;
  for (std::size_t e : plan.sliced_edges) fixed[e] = 0;
  PlanExecutor ex(net, false, fixed);
  ex.run(plan);
  std::map<std::size_t, std::size_t> count;
  for (const auto& legs : ex.slot_legs()) {
    if (legs_size(legs) <= target) continue;
    std::set<std::size_t> ids;
    for (const Leg& l : legs) {
      if (is_edge(l)) ids.insert(l.id);
    }
    for (std::size_t id : ids) ++count[id];
  }
  std::vector<std::pair<std::size_t, std::size_t>> ranked;  // (-count, edge)
  for (auto [e, c] : count) {
    const auto& edge = net.edges()[e];
    if (edge.tail.node != edge.head.node) ranked.emplace_back(c, e);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](auto a, auto b) { return a.first > b.first; });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ranked.size() && i < limit; ++i) out.push_back(ranked[i].second);
  return out;
}

// Tries one more sliced edge among the candidates, then pairs, and keeps the
// best re-planned result while it lowers the peak.
void add_slices(const ConcreteNetwork& net, ContractionPlan& plan, const PlanOptions& opt) {
  constexpr std::size_t kCandidates = 8;
  while (plan.peak_entries > opt.target_peak && plan.sliced_edges.size() < opt.max_slices) {
    std::vector<std::size_t> cand = slice_candidates(net, plan, opt.target_peak, kCandidates);
    std::optional<ContractionPlan> best;
    auto consider = [&](std::vector<std::size_t> extra) {
      std::vector<std::size_t> sliced = plan.sliced_edges;
      sliced.insert(sliced.end(), extra.begin(), extra.end());
      ContractionPlan trial = plan_order(net, sliced);
      if (trial.peak_entries < (best ? best->peak_entries : plan.peak_entries)) best = std::move(trial);
    };
    // subsets of increasing size until one lowers the peak
    for (std::size_t m = 1; !best && plan.sliced_edges.size() + m <= opt.max_slices && m <= cand.size(); ++m) {
      std::vector<std::size_t> pick(m);
      std::iota(pick.begin(), pick.end(), 0);
      for (;;) {
        std::vector<std::size_t> extra;
        for (std::size_t i : pick) extra.push_back(cand[i]);
        consider(extra);
        std::size_t k = m;
        while (k-- > 0 && pick[k] == cand.size() - m + k) {
        }
        if (k == static_cast<std::size_t>(-1)) break;
        ++pick[k];
        for (std::size_t j = k + 1; j < m; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
    if (!best) break;
    plan = std::move(*best);
  }
}

}  // namespace

ContractionPlan plan_contraction(const ConcreteNetwork& net, const PlanOptions& options) {
  net.validate();
  ContractionPlan plan = plan_order(net, {});
  if (options.target_peak != 0) add_slices(net, plan, options);
  return plan;
}

std::size_t plan_peak(const ConcreteNetwork& net, const ContractionPlan& plan) {
  net.validate();
  if (plan.node_count != net.node_count() || plan.edge_count != net.edges().size()) {
    throw ShapeError("plan was made for a different network");
  }
  return peak_with_slices(net, plan);
}

namespace {

template <class T>
Tensor run_plan(const ConcreteNetwork& net, const ContractionPlan& plan) {
  if (plan.sliced_edges.empty()) {
    PlanExecutor<T> ex(net, true);
    ex.run(plan);
    return ex.result();
  }
  std::vector<std::size_t> dims;
  for (std::size_t e : plan.sliced_edges) {
    if (e >= net.edges().size()) throw ShapeError("plan slices a missing edge");
    const Port& t = net.edges()[e].tail;
    dims.push_back(net.node(t.node).axes()[t.axis].dim);
  }
  std::vector<std::size_t> value(dims.size(), 0);
  std::optional<Tensor> sum;
  for (;;) {
    std::map<std::size_t, std::size_t> fixed;
    for (std::size_t k = 0; k < dims.size(); ++k) fixed[plan.sliced_edges[k]] = value[k];
    PlanExecutor<T> ex(net, true, fixed);
    ex.run(plan);
    Tensor part = ex.result();
    if (!sum) {
      sum = std::move(part);
    } else {
      for (std::size_t i = 0; i < part.size(); ++i) sum->entry(i) += part.entry(i);
    }
    std::size_t k = 0;
    for (; k < dims.size(); ++k) {
      if (++value[k] < dims[k]) break;
      value[k] = 0;
    }
    if (k == dims.size()) break;
  }
  return std::move(*sum);
}

}  // namespace

Tensor evaluate_network(const ConcreteNetwork& net, const ContractionPlan& plan) {
  net.validate();
  if (plan.node_count != net.node_count() || plan.edge_count != net.edges().size()) {
    throw ShapeError("plan was made for a different network");
  }
  try {
    return run_plan<SmallTensor>(net, plan);
  } catch (const NotSmall&) {
  }
  return run_plan<Tensor>(net, plan);
}

Tensor evaluate_network(const ConcreteNetwork& net) { return evaluate_network(net, plan_contraction(net)); }

Tensor einsum(const std::vector<EinsumOperand>& operands, const std::vector<std::string>& output, Field field) {
  ConcreteNetwork net(field);
  struct Occurrence {
    Port port;
    Variance variance;
  };
  std::map<std::string, std::vector<Occurrence>> where;
  for (const auto& op : operands) {
    if (op.labels.size() != op.tensor->rank()) throw ShapeError("einsum: label count does not match tensor rank");
    std::size_t id = net.add_node(std::shared_ptr<const Tensor>(std::shared_ptr<const Tensor>{}, op.tensor));
    for (std::size_t k = 0; k < op.labels.size(); ++k) {
      where[op.labels[k]].push_back({{id, k}, op.tensor->axes()[k].variance});
    }
  }
  std::vector<std::string> head_labels;
  std::vector<std::string> tail_labels;
  for (const auto& [label, occ] : where) {
    if (occ.size() > 2) throw ShapeError("einsum: label '" + label + "' used more than twice");
    if (occ.size() == 2) {
      if (occ[0].variance == occ[1].variance) {
        throw ShapeError("einsum: label '" + label + "' joins two axes of the same variance");
      }
      const Occurrence& up = occ[0].variance == Variance::up ? occ[0] : occ[1];
      const Occurrence& down = occ[0].variance == Variance::up ? occ[1] : occ[0];
      net.connect(up.port, down.port);
    } else if (occ[0].variance == Variance::down) {
      net.add_free_head(occ[0].port);
      head_labels.push_back(label);
    } else {
      net.add_free_tail(occ[0].port);
      tail_labels.push_back(label);
    }
  }
  std::vector<std::string> layout = head_labels;
  layout.insert(layout.end(), tail_labels.begin(), tail_labels.end());
  if (output.size() != layout.size()) throw ShapeError("einsum: output labels do not match free labels");
  std::vector<std::size_t> perm;
  for (const auto& l : output) {
    auto it = std::find(layout.begin(), layout.end(), l);
    if (it == layout.end()) throw ShapeError("einsum: output label '" + l + "' is not free");
    perm.push_back(static_cast<std::size_t>(it - layout.begin()));
  }
  return permute_axes(evaluate_network(net), perm);
}

}  // namespace hopf3
