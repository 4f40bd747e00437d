#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hopf3/groups.hpp"
#include "hopf3/heegaard.hpp"
#include "hopf3/hopf.hpp"
#include "hopf3/network.hpp"
#include "hopf3/tensor.hpp"

namespace hopf3::test {

// Explicit sum over every assignment of every edge and free port, with no
// planning and no pairwise contraction.  Axes: free heads, then free tails.
inline Tensor brute_force_state_sum(const ConcreteNetwork& net) {
  net.validate();
  const Field f = net.field();
  // one variable per edge, then per free head, then per free tail
  std::vector<std::size_t> dims;
  std::vector<std::vector<std::size_t>> var_of(net.node_count());
  for (std::size_t n = 0; n < net.node_count(); ++n) var_of[n].assign(net.node(n).rank(), 0);
  for (const auto& e : net.edges()) {
    std::size_t v = dims.size();
    dims.push_back(net.node(e.tail.node).axes()[e.tail.axis].dim);
    var_of[e.tail.node][e.tail.axis] = v;
    var_of[e.head.node][e.head.axis] = v;
  }
  std::vector<Axis> out_axes;
  std::vector<std::size_t> out_vars;
  for (const auto* list : {&net.free_heads(), &net.free_tails()}) {
    for (Port p : *list) {
      std::size_t v = dims.size();
      const Axis& a = net.node(p.node).axes()[p.axis];
      dims.push_back(a.dim);
      var_of[p.node][p.axis] = v;
      out_axes.push_back(a);
      out_vars.push_back(v);
    }
  }
  Tensor out(out_axes, f);
  std::vector<std::size_t> state(dims.size(), 0);
  std::vector<std::size_t> index;
  for (;;) {
    Scalar w = Scalar::one(f);
    for (std::size_t n = 0; n < net.node_count() && !w.is_zero(); ++n) {
      index.assign(var_of[n].size(), 0);
      for (std::size_t k = 0; k < index.size(); ++k) index[k] = state[var_of[n][k]];
      w *= net.node(n).at(index);
    }
    if (!w.is_zero()) {
      index.assign(out_vars.size(), 0);
      for (std::size_t k = 0; k < index.size(); ++k) index[k] = state[out_vars[k]];
      out.set(index, out.at(index) + w);
    }
    std::size_t k = 0;
    for (; k < dims.size(); ++k) {
      if (++state[k] < dims[k]) break;
      state[k] = 0;
    }
    if (k == dims.size()) break;
  }
  for (std::size_t d : net.closed_loops()) {
    Scalar factor = Scalar::from_integer(f, static_cast<std::int64_t>(d));
    for (std::size_t i = 0; i < out.size(); ++i) out.entry(i) *= factor;
  }
  return out;
}

inline std::size_t state_space(const ConcreteNetwork& net) {
  std::size_t s = 1;
  for (const auto& e : net.edges()) s *= net.node(e.tail.node).axes()[e.tail.axis].dim;
  for (Port p : net.free_heads()) s *= net.node(p.node).axes()[p.axis].dim;
  for (Port p : net.free_tails()) s *= net.node(p.node).axes()[p.axis].dim;
  return s;
}

inline Scalar random_scalar(std::mt19937_64& rng, Field f) {
  std::uniform_int_distribution<int> pick(0, 9);
  int kind = pick(rng);
  if (kind < 3) return Scalar::zero(f);
  std::uniform_int_distribution<std::int64_t> num(-7, 7);
  if (!f.is_rational() || kind < 7) return Scalar::from_integer(f, num(rng));
  std::uniform_int_distribution<std::int64_t> den(1, 6);
  return Scalar::from_rational(f, Rational(num(rng), den(rng)));
}

inline Tensor random_tensor(std::mt19937_64& rng, const std::vector<Axis>& axes, Field f) {
  Tensor t(axes, f);
  for (std::size_t i = 0; i < t.size(); ++i) t.entry(i) = random_scalar(rng, f);
  return t;
}

struct RandomNetworkOptions {
  std::size_t min_nodes = 1;
  std::size_t max_nodes = 4;
  std::size_t max_dim = 3;
  std::size_t max_rank = 3;
  std::size_t max_states = 1'000'000;
  Field field = Field::rationals();
  bool closed_loops = true;
};

// Random tensors with random variances; up and down ports of equal
// dimension are paired at random (self-loops and multi-edges included) and
// the rest left free.  Redrawn until the state space is within bound.
inline ConcreteNetwork random_network(std::mt19937_64& rng, const RandomNetworkOptions& opt = {}) {
  for (;;) {
    ConcreteNetwork net(opt.field);
    std::uniform_int_distribution<std::size_t> nodes(opt.min_nodes, opt.max_nodes);
    std::uniform_int_distribution<std::size_t> rank(0, opt.max_rank);
    std::uniform_int_distribution<std::size_t> dim(1, opt.max_dim);
    std::bernoulli_distribution coin(0.5);
    const std::size_t n = nodes(rng);
    std::vector<Port> ups;
    std::vector<Port> downs;
    for (std::size_t v = 0; v < n; ++v) {
      std::vector<Axis> axes(rank(rng));
      for (auto& a : axes) a = {dim(rng), coin(rng) ? Variance::up : Variance::down};
      std::size_t id = net.add_node(random_tensor(rng, axes, opt.field));
      for (std::size_t k = 0; k < axes.size(); ++k) (axes[k].variance == Variance::up ? ups : downs).push_back({id, k});
    }
    std::shuffle(ups.begin(), ups.end(), rng);
    std::shuffle(downs.begin(), downs.end(), rng);
    std::vector<bool> used(downs.size(), false);
    std::bernoulli_distribution link(0.8);
    for (Port u : ups) {
      if (!link(rng)) continue;
      std::size_t d = net.node(u.node).axes()[u.axis].dim;
      for (std::size_t j = 0; j < downs.size(); ++j) {
        if (used[j] || net.node(downs[j].node).axes()[downs[j].axis].dim != d) continue;
        used[j] = true;
        net.connect(u, downs[j]);
        break;
      }
    }
    if (opt.closed_loops && coin(rng) && coin(rng)) net.add_closed_loop(dim(rng));
    net.collect_free_ports();
    if (state_space(net) <= opt.max_states) return net;
  }
}

// A uniformly random valid merge order: self-loops first, then random pairs.
inline ContractionPlan random_plan(std::mt19937_64& rng, const ConcreteNetwork& net) {
  ContractionPlan plan;
  plan.node_count = net.node_count();
  plan.edge_count = net.edges().size();
  std::vector<bool> loop(net.node_count(), false);
  for (const auto& e : net.edges()) {
    if (e.tail.node == e.head.node) loop[e.tail.node] = true;
  }
  for (std::size_t v = 0; v < net.node_count(); ++v) {
    if (loop[v]) plan.steps.push_back({PlanStep::Kind::self_loop, v, 0});
  }
  std::vector<std::size_t> live(net.node_count());
  std::iota(live.begin(), live.end(), 0);
  std::size_t next = net.node_count();
  while (live.size() > 1) {
    std::shuffle(live.begin(), live.end(), rng);
    std::size_t a = live.back();
    live.pop_back();
    std::size_t b = live.back();
    live.pop_back();
    plan.steps.push_back({PlanStep::Kind::merge, a, b});
    live.push_back(next++);
  }
  plan.peak_entries = plan_peak(net, plan);
  return plan;
}

struct NamedAlgebra {
  std::string name;
  HopfAlgebra algebra;
};

// Small validated algebras: cocommutative, commutative but not
// cocommutative, and one over a prime field.
inline std::vector<NamedAlgebra> test_algebras() {
  std::vector<NamedAlgebra> out;
  out.push_back({"k[Z/2]", group_algebra(cyclic_group(2))});
  out.push_back({"k[Z/3]", group_algebra(cyclic_group(3))});
  out.push_back({"k[S3]", group_algebra(symmetric_group_3())});
  out.push_back({"k[S3]*", function_algebra(symmetric_group_3())});
  out.push_back({"k[Z/4] over F_5", group_algebra(cyclic_group(4), Field::prime(5))});
  return out;
}

inline std::vector<std::string> builder_names() {
  return {"S3",     "S1xS2",  "L(2,1)", "L(3,1)", "L(3,2)", "L(4,1)", "L(4,3)", "L(5,1)", "L(5,2)",
          "L(5,3)", "L(5,4)", "connect-sum:L(2,1)+L(3,1)", "connect-sum:S1xS2+L(2,1)"};
}

// Every forward move applicable to d, with every parameter choice, plus the
// inverse moves whose precondition holds.
inline std::vector<MoveRecord> all_single_moves(const HeegaardDiagram& d) {
  std::vector<MoveRecord> out;
  for (Family f : {Family::lower, Family::upper}) {
    const auto& cs = d.circles(f);
    for (std::size_t c = 0; c < cs.size(); ++c) {
      MoveRecord m;
      m.kind = MoveKind::reverse_circle;
      m.family = f;
      m.circle = c;
      out.push_back(m);
    }
    for (std::size_t t = 0; t < cs.size(); ++t) {
      for (std::size_t o = 0; o < cs.size(); ++o) {
        if (t == o) continue;
        for (std::size_t pos = 0; pos <= cs[t].size(); ++pos) {
          for (std::size_t bp = 0; bp < std::max<std::size_t>(1, cs[o].size()); ++bp) {
            for (bool rev : {false, true}) {
              MoveRecord m;
              m.kind = MoveKind::slide;
              m.family = f;
              m.circle = t;
              m.position = pos;
              m.other_circle = o;
              m.other_position = bp;
              m.reversed = rev;
              out.push_back(m);
            }
          }
        }
      }
    }
    MoveRecord add;
    add.kind = MoveKind::trivial_circle;
    add.family = f;
    out.push_back(add);
    for (std::size_t c = 0; c < cs.size(); ++c) {
      if (!cs[c].empty()) continue;
      MoveRecord rm = add;
      rm.direction = Direction::inverse;
      rm.circle = c;
      out.push_back(rm);
    }
  }
  for (std::size_t l = 0; l < d.lower.size(); ++l) {
    for (std::size_t p = 0; p <= d.lower[l].size(); ++p) {
      for (std::size_t u = 0; u < d.upper.size(); ++u) {
        for (std::size_t q = 0; q <= d.upper[u].size(); ++q) {
          for (PairOrder order : {PairOrder::parallel, PairOrder::antiparallel}) {
            for (int s : {1, -1}) {
              MoveRecord m;
              m.kind = MoveKind::two_point;
              m.circle = l;
              m.position = p;
              m.other_circle = u;
              m.other_position = q;
              m.order = order;
              m.first_sign = s;
              out.push_back(m);
            }
          }
        }
      }
    }
  }
  for (std::size_t l = 0; l < d.lower.size(); ++l) {
    const auto& w = d.lower[l];
    for (std::size_t p = 0; w.size() >= 2 && p < w.size(); ++p) {
      CrossingId x = w[p];
      CrossingId y = w[(p + 1) % w.size()];
      if (x == y || d.sign.at(x) == d.sign.at(y)) continue;
      Location ux = locate(d, Family::upper, x);
      Location uy = locate(d, Family::upper, y);
      const std::size_t n = d.upper[ux.circle].size();
      if (ux.circle != uy.circle) continue;
      for (std::size_t q : {ux.position, uy.position}) {
        CrossingId a = d.upper[ux.circle][q];
        CrossingId b = d.upper[ux.circle][(q + 1) % n];
        if ((a == x && b == y) || (a == y && b == x)) {
          MoveRecord m;
          m.kind = MoveKind::two_point;
          m.direction = Direction::inverse;
          m.circle = l;
          m.position = p;
          m.other_circle = ux.circle;
          m.other_position = q;
          out.push_back(m);
        }
      }
    }
  }
  MoveRecord st;
  st.kind = MoveKind::stabilize;
  out.push_back(st);
  for (const auto& [c, s] : d.sign) {
    (void)s;
    Location lo = locate(d, Family::lower, c);
    Location up = locate(d, Family::upper, c);
    if (d.lower[lo.circle].size() == 1 && d.upper[up.circle].size() == 1) {
      MoveRecord ds = st;
      ds.direction = Direction::inverse;
      ds.crossing = c;
      out.push_back(ds);
    }
  }
  return out;
}

}  // namespace hopf3::test
