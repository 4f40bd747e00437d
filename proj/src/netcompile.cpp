#include "hopf3/netcompile.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace hopf3 {

namespace {

const char* const kDelta = "\xCE\x94";  // Δ

}  // namespace

std::string to_string(Symbol s) {
  switch (s) {
    case Symbol::M: return "M";
    case Symbol::Delta: return "Delta";
    case Symbol::S: return "S";
    case Symbol::eps: return "eps";
    case Symbol::unit: return "unit";
  }
  return "?";
}

Symbol symbol_from_string(const std::string& s) {
  for (Symbol x : {Symbol::M, Symbol::Delta, Symbol::S, Symbol::eps, Symbol::unit}) {
    if (to_string(x) == s) return x;
  }
  throw GraphError("unknown node label '" + s + "'");
}

std::size_t in_arity(Symbol s) {
  switch (s) {
    case Symbol::M: return 2;
    case Symbol::Delta: return 1;
    case Symbol::S: return 1;
    case Symbol::eps: return 1;
    case Symbol::unit: return 0;
  }
  return 0;
}

std::size_t out_arity(Symbol s) {
  switch (s) {
    case Symbol::M: return 1;
    case Symbol::Delta: return 2;
    case Symbol::S: return 1;
    case Symbol::eps: return 0;
    case Symbol::unit: return 1;
  }
  return 0;
}

void ContractionGraph::validate() const {
  std::set<GraphPort> used;
  auto check = [&](GraphPort p, bool want_input, const char* what) {
    if (p.node >= nodes.size()) throw GraphError(std::string(what) + ": node " + std::to_string(p.node) + " out of range");
    Symbol s = nodes[p.node];
    std::size_t total = in_arity(s) + out_arity(s);
    if (p.port >= total) {
      throw GraphError(std::string(what) + ": port " + std::to_string(p.port) + " out of range for " + to_string(s));
    }
    bool is_input = p.port < in_arity(s);
    if (is_input != want_input) {
      throw GraphError(std::string(what) + ": port " + std::to_string(p.node) + ":" + std::to_string(p.port) +
                       (want_input ? " is not an input" : " is not an output"));
    }
    if (!used.insert(p).second) {
      throw GraphError("port " + std::to_string(p.node) + ":" + std::to_string(p.port) + " used twice");
    }
  };
  for (const auto& e : edges) {
    check(e.from, false, "edge source");
    check(e.to, true, "edge target");
  }
  for (const auto& p : free_heads) check(p, true, "free head");
  for (const auto& p : free_tails) check(p, false, "free tail");
  std::size_t ports = 0;
  for (Symbol s : nodes) ports += in_arity(s) + out_arity(s);
  if (used.size() != ports) {
    throw GraphError(std::to_string(ports - used.size()) + " ports are neither connected nor free");
  }
}

namespace {

class Compiler {
 public:
  Compiler(ContractionGraph& g, ChainAssociation assoc) : g_(g), assoc_(assoc) {}

  // Output ports carrying the n legs of the tracial coproduct, in order.
  std::vector<GraphPort> lower_circle(std::size_t n) {
    std::size_t cot = g_.add_node(Symbol::Delta);
    g_.connect(g_.output(cot, 0), g_.input(cot, 0));
    GraphPort c = g_.output(cot, 1);
    if (n == 0) {
      std::size_t e = g_.add_node(Symbol::eps);
      g_.connect(c, g_.input(e, 0));
      return {};
    }
    return split(c, n);
  }

  // Input ports taking the n factors of the tracial product, in order.
  std::vector<GraphPort> upper_circle(std::size_t n) {
    std::size_t tr = g_.add_node(Symbol::M);
    g_.connect(g_.output(tr, 0), g_.input(tr, 1));
    GraphPort t = g_.input(tr, 0);
    if (n == 0) {
      std::size_t u = g_.add_node(Symbol::unit);
      g_.connect(g_.output(u, 0), t);
      return {};
    }
    return merge(t, n);
  }

 private:
  std::vector<GraphPort> split(GraphPort src, std::size_t n) {
    if (n == 1) return {src};
    std::size_t d = g_.add_node(Symbol::Delta);
    g_.connect(src, g_.input(d, 0));
    std::vector<GraphPort> out;
    if (assoc_ == ChainAssociation::left) {
      out = split(g_.output(d, 0), n - 1);
      out.push_back(g_.output(d, 1));
    } else {
      out.push_back(g_.output(d, 0));
      auto rest = split(g_.output(d, 1), n - 1);
      out.insert(out.end(), rest.begin(), rest.end());
    }
    return out;
  }

  std::vector<GraphPort> merge(GraphPort dst, std::size_t n) {
    if (n == 1) return {dst};
    std::size_t m = g_.add_node(Symbol::M);
    g_.connect(g_.output(m, 0), dst);
    std::vector<GraphPort> in;
    if (assoc_ == ChainAssociation::left) {
      in = merge(g_.input(m, 0), n - 1);
      in.push_back(g_.input(m, 1));
    } else {
      in.push_back(g_.input(m, 0));
      auto rest = merge(g_.input(m, 1), n - 1);
      in.insert(in.end(), rest.begin(), rest.end());
    }
    return in;
  }

  ContractionGraph& g_;
  ChainAssociation assoc_;
};

}  // namespace

ContractionGraph compile_diagram(const HeegaardDiagram& d, ChainAssociation assoc) {
  require_valid(d);
  ContractionGraph g;
  Compiler c(g, assoc);
  std::map<CrossingId, GraphPort> lower_leg;
  std::map<CrossingId, GraphPort> upper_leg;
  for (const auto& w : d.lower) {
    auto legs = c.lower_circle(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) lower_leg[w[k]] = legs[k];
  }
  for (const auto& w : d.upper) {
    auto legs = c.upper_circle(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) upper_leg[w[k]] = legs[k];
  }
  // crossings in lower-word order keep node numbering readable
  for (const auto& w : d.lower) {
    for (CrossingId x : w) {
      if (d.sign.at(x) > 0) {
        g.connect(lower_leg.at(x), upper_leg.at(x));
      } else {
        std::size_t s = g.add_node(Symbol::S);
        g.connect(lower_leg.at(x), g.input(s, 0));
        g.connect(g.output(s, 0), upper_leg.at(x));
      }
    }
  }
  return g;
}

ContractionGraph single_node_graph(Symbol s) {
  ContractionGraph g;
  std::size_t n = g.add_node(s);
  for (std::size_t k = 0; k < in_arity(s); ++k) g.free_heads.push_back(g.input(n, k));
  for (std::size_t k = 0; k < out_arity(s); ++k) g.free_tails.push_back(g.output(n, k));
  return g;
}

ContractionGraph substitute(const ContractionGraph& g, std::size_t v, const ContractionGraph& h) {
  g.validate();
  h.validate();
  if (v >= g.nodes.size()) throw GraphError("substitute: node index out of range");
  const Symbol sym = g.nodes[v];
  if (h.free_heads.size() != in_arity(sym) || h.free_tails.size() != out_arity(sym)) {
    throw GraphError("substitute: replacement has " + std::to_string(h.free_heads.size()) + " inputs and " +
                     std::to_string(h.free_tails.size()) + " outputs, " + to_string(sym) + " needs " +
                     std::to_string(in_arity(sym)) + " and " + std::to_string(out_arity(sym)));
  }
  ContractionGraph out;
  std::vector<std::size_t> gmap(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (i == v) continue;
    gmap[i] = out.add_node(g.nodes[i]);
  }
  const std::size_t base = out.nodes.size();
  for (Symbol s : h.nodes) out.add_node(s);
  auto from_g = [&](GraphPort p) { return GraphPort{gmap[p.node], p.port}; };
  auto from_h = [&](GraphPort p) { return GraphPort{base + p.node, p.port}; };
  // where a port of v lands inside h
  auto inner = [&](GraphPort p) {
    std::size_t in = in_arity(sym);
    return p.port < in ? from_h(h.free_heads[p.port]) : from_h(h.free_tails[p.port - in]);
  };
  auto map_port = [&](GraphPort p) { return p.node == v ? inner(p) : from_g(p); };
  for (const auto& e : g.edges) out.connect(map_port(e.from), map_port(e.to));
  for (const auto& e : h.edges) out.connect(from_h(e.from), from_h(e.to));
  for (const auto& p : g.free_heads) out.free_heads.push_back(map_port(p));
  for (const auto& p : g.free_tails) out.free_tails.push_back(map_port(p));
  out.closed_loops = g.closed_loops + h.closed_loops;
  return out;
}

ConcreteNetwork bind(const ContractionGraph& g, const HopfAlgebra& h) {
  g.validate();
  ConcreteNetwork net(h.field());
  for (Symbol s : g.nodes) {
    switch (s) {
      case Symbol::M: net.add_node(h.M_ptr()); break;
      case Symbol::Delta: net.add_node(h.Delta_ptr()); break;
      case Symbol::S: net.add_node(h.S_ptr()); break;
      case Symbol::eps: net.add_node(h.counit_ptr()); break;
      case Symbol::unit: net.add_node(h.unit_ptr()); break;
    }
  }
  for (const auto& e : g.edges) net.connect({e.from.node, e.from.port}, {e.to.node, e.to.port});
  for (const auto& p : g.free_heads) net.add_free_head({p.node, p.port});
  for (const auto& p : g.free_tails) net.add_free_tail({p.node, p.port});
  for (std::size_t k = 0; k < g.closed_loops; ++k) net.add_closed_loop(h.dim());
  return net;
}

InvariantResult invariant(const HeegaardDiagram& d, const HopfAlgebra& h, const InvariantOptions& options) {
  require_valid(d);
  if (options.validate) require_valid(h);
  ConcreteNetwork net = bind(compile_diagram(d, options.association), h);
  PlanOptions popt;
  if (options.slice) {
    for (std::size_t v = 0; v < net.node_count(); ++v) popt.target_peak = std::max(popt.target_peak, net.node(v).size());
  }
  ContractionPlan plan = plan_contraction(net, popt);
  if (plan.peak_entries > options.peak_bound && !options.slice) {
    popt.target_peak = options.peak_bound;
    plan = plan_contraction(net, popt);
  }
  if (plan.peak_entries > options.peak_bound) {
    throw ResourceLimit("planned peak of " + std::to_string(plan.peak_entries) + " entries exceeds the bound of " +
                        std::to_string(options.peak_bound));
  }
  Tensor t = evaluate_network(net, plan);
  InvariantResult r;
  r.Z = t.value();
  r.exponent = static_cast<std::int64_t>(d.genus) - static_cast<std::int64_t>(d.upper.size()) -
               static_cast<std::int64_t>(d.lower.size());
  r.value = r.Z * h.dimension_scalar().pow(r.exponent);
  r.peak_entries = plan.peak_entries;
  r.sliced_edges = plan.sliced_edges.size();
  return r;
}

namespace {

std::string letter(std::size_t k) {
  if (k < 26) return std::string(1, static_cast<char>('a' + k));
  if (k < 52) return std::string(1, static_cast<char>('A' + (k - 26)));
  return "[" + std::to_string(k) + "]";
}

template <class T>
std::vector<T> min_rotation(const std::vector<T>& w) {
  std::vector<T> best = w;
  std::vector<T> cur = w;
  for (std::size_t r = 1; r < w.size(); ++r) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (cur < best) best = cur;
  }
  return best;
}

struct Rendered {
  std::vector<std::string> deltas;
  std::vector<std::string> antipodes;
  std::vector<std::string> products;

  [[nodiscard]] std::string join() const {
    std::string out;
    for (const auto* part : {&deltas, &antipodes, &products}) {
      for (const auto& s : *part) out += (out.empty() ? "" : " ") + s;
    }
    return out;
  }
};

Rendered render(const HeegaardDiagram& d) {
  std::map<CrossingId, std::size_t> lower_label;
  for (const auto& w : d.lower) {
    for (CrossingId c : w) lower_label.emplace(c, lower_label.size());
  }
  std::map<CrossingId, std::size_t> upper_label;
  std::size_t next = lower_label.size();
  Rendered r;
  for (const auto& w : d.lower) {
    std::string s = std::string(kDelta) + "^{";
    for (CrossingId c : w) s += letter(lower_label.at(c));
    r.deltas.push_back(s + "}");
  }
  for (const auto& w : d.lower) {
    for (CrossingId c : w) {
      if (d.sign.at(c) > 0) {
        upper_label[c] = lower_label.at(c);
      } else {
        upper_label[c] = next++;
        r.antipodes.push_back("S_" + letter(lower_label.at(c)) + "{}^" + letter(upper_label[c]));
      }
    }
  }
  for (const auto& w : d.upper) {
    std::vector<std::size_t> labels;
    for (CrossingId c : w) labels.push_back(upper_label.at(c));
    std::string s = "M_{";
    for (std::size_t k : min_rotation(labels)) s += letter(k);
    r.products.push_back(s + "}");
  }
  return r;
}

}  // namespace

std::string formal_expr(const HeegaardDiagram& d) {
  require_valid(d);
  return render(d).join();
}

std::string canonical_formal_expr(const HeegaardDiagram& d) {
  require_valid(d);
  std::size_t combos = 1;
  for (const auto& w : d.lower) {
    combos *= std::max<std::size_t>(1, w.size());
    if (combos > 100000) break;
  }
  auto sorted_join = [](Rendered r) {
    std::sort(r.antipodes.begin(), r.antipodes.end());
    std::sort(r.products.begin(), r.products.end());
    return r.join();
  };
  if (combos > 100000) return sorted_join(render(d));
  std::string best;
  std::vector<std::size_t> shift(d.lower.size(), 0);
  while (true) {
    HeegaardDiagram r = d;
    for (std::size_t i = 0; i < shift.size(); ++i) {
      std::rotate(r.lower[i].begin(), r.lower[i].begin() + static_cast<std::ptrdiff_t>(shift[i]), r.lower[i].end());
    }
    std::string s = sorted_join(render(r));
    if (best.empty() || s < best) best = s;
    std::size_t i = 0;
    for (; i < shift.size(); ++i) {
      if (++shift[i] < std::max<std::size_t>(1, d.lower[i].size())) break;
      shift[i] = 0;
    }
    if (i == shift.size()) break;
  }
  return best;
}

namespace {

class FormalParser {
 public:
  explicit FormalParser(const std::string& s) : s_(s) {}

  HeegaardDiagram parse() {
    skip_space();
    while (pos_ < s_.size()) {
      if (s_.compare(pos_, 2, kDelta) == 0) {
        pos_ += 2;
        expect('^');
        lower_.push_back(label_group());
      } else if (s_[pos_] == 'M') {
        ++pos_;
        expect('_');
        upper_.push_back(label_group());
      } else if (s_[pos_] == 'S') {
        ++pos_;
        expect('_');
        std::string x = label();
        expect('{');
        expect('}');
        expect('^');
        std::string y = label();
        if (!antipode_.emplace(x, y).second) fail("two antipodes on " + x);
      } else {
        fail("unexpected character");
      }
      skip_space();
    }
    return build();
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw GraphError("formal expression, offset " + std::to_string(pos_) + ": " + why);
  }
  void skip_space() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }
  void expect(char c) {
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string label() {
    if (pos_ >= s_.size()) fail("expected a label");
    char c = s_[pos_];
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      ++pos_;
      return std::string(1, c);
    }
    if (c == '[') {
      auto close = s_.find(']', pos_);
      if (close == std::string::npos) fail("unterminated label");
      std::string l = s_.substr(pos_, close - pos_ + 1);
      pos_ = close + 1;
      return l;
    }
    fail("expected a label");
  }
  std::vector<std::string> label_group() {
    expect('{');
    std::vector<std::string> out;
    while (pos_ < s_.size() && s_[pos_] != '}') out.push_back(label());
    expect('}');
    return out;
  }

  HeegaardDiagram build() {
    HeegaardDiagram d;
    d.genus = lower_.size();
    std::map<std::string, CrossingId> crossing;   // lower label -> id
    std::map<std::string, CrossingId> by_upper;   // upper label -> id
    for (const auto& w : lower_) {
      CircleWord cw;
      for (const auto& l : w) {
        auto id = static_cast<CrossingId>(crossing.size());
        if (!crossing.emplace(l, id).second) fail("label " + l + " repeated on lower circles");
        cw.push_back(id);
      }
      d.lower.push_back(cw);
    }
    for (const auto& [l, id] : crossing) {
      auto a = antipode_.find(l);
      std::string up = a == antipode_.end() ? l : a->second;
      d.sign[id] = a == antipode_.end() ? 1 : -1;
      if (!by_upper.emplace(up, id).second) fail("upper label " + up + " used twice");
    }
    for (const auto& [x, y] : antipode_) {
      if (crossing.count(x) == 0) fail("antipode on unknown label " + x);
    }
    std::set<std::string> seen;
    for (const auto& w : upper_) {
      CircleWord cw;
      for (const auto& l : w) {
        auto it = by_upper.find(l);
        if (it == by_upper.end()) fail("label " + l + " has no lower occurrence");
        if (!seen.insert(l).second) fail("label " + l + " repeated on upper circles");
        cw.push_back(it->second);
      }
      d.upper.push_back(cw);
    }
    if (seen.size() != by_upper.size()) fail("some crossings have no upper occurrence");
    d.closed_manifold = d.lower.size() == d.upper.size();
    return d;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  std::vector<std::vector<std::string>> lower_;
  std::vector<std::vector<std::string>> upper_;
  std::map<std::string, std::string> antipode_;
};

}  // namespace

HeegaardDiagram parse_formal_expr(const std::string& text) { return FormalParser(text).parse(); }

nlohmann::json graph_to_json(const ContractionGraph& g) {
  nlohmann::json j;
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) nodes.push_back({{"id", i}, {"label", to_string(g.nodes[i])}});
  j["nodes"] = nodes;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges) {
    edges.push_back({{"from", {e.from.node, e.from.port}}, {"to", {e.to.node, e.to.port}}});
  }
  j["edges"] = edges;
  auto ports = [](const std::vector<GraphPort>& ps) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : ps) a.push_back({p.node, p.port});
    return a;
  };
  j["free_heads"] = ports(g.free_heads);
  j["free_tails"] = ports(g.free_tails);
  j["closed_loops"] = g.closed_loops;
  return j;
}

ContractionGraph graph_from_json(const nlohmann::json& j) {
  try {
    ContractionGraph g;
    for (const auto& n : j.at("nodes")) g.add_node(symbol_from_string(n.at("label").get<std::string>()));
    auto port = [](const nlohmann::json& p) { return GraphPort{p.at(0).get<std::size_t>(), p.at(1).get<std::size_t>()}; };
    for (const auto& e : j.at("edges")) g.connect(port(e.at("from")), port(e.at("to")));
    for (const auto& p : j.value("free_heads", nlohmann::json::array())) g.free_heads.push_back(port(p));
    for (const auto& p : j.value("free_tails", nlohmann::json::array())) g.free_tails.push_back(port(p));
    g.closed_loops = j.value("closed_loops", std::size_t{0});
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw GraphError(std::string("malformed graph JSON: ") + e.what());
  }
}

}  // namespace hopf3
