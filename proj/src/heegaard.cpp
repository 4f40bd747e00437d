#include "hopf3/heegaard.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace hopf3 {

std::string to_string(Family f) { return f == Family::lower ? "lower" : "upper"; }

DiagramReport validate_diagram(const HeegaardDiagram& d) {
  DiagramReport r;
  r.genus = d.genus;
  r.lower_circles = d.lower.size();
  r.upper_circles = d.upper.size();
  r.crossings = d.sign.size();
  auto scan = [&](Family f) {
    std::map<CrossingId, int> count;
    for (const auto& w : d.circles(f)) {
      for (CrossingId c : w) ++count[c];
    }
    for (auto [c, n] : count) {
      if (n > 1) r.problems.push_back("crossing c" + std::to_string(c) + " occurs " + std::to_string(n) + " times on " + to_string(f) + " circles");
      if (d.sign.count(c) == 0) r.problems.push_back("crossing c" + std::to_string(c) + " has no sign");
    }
    for (auto [c, s] : d.sign) {
      if (count.count(c) == 0) r.problems.push_back("crossing c" + std::to_string(c) + " missing from " + to_string(f) + " circles");
    }
  };
  scan(Family::lower);
  scan(Family::upper);
  for (auto [c, s] : d.sign) {
    if (s != 1 && s != -1) r.problems.push_back("crossing c" + std::to_string(c) + " has sign " + std::to_string(s));
  }
  r.valid = r.problems.empty();
  return r;
}

void require_valid(const HeegaardDiagram& d) {
  DiagramReport r = validate_diagram(d);
  if (!r.valid) throw DiagramError("invalid diagram: " + r.problems.front());
}

Location locate(const HeegaardDiagram& d, Family f, CrossingId c) {
  const auto& cs = d.circles(f);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    auto it = std::find(cs[i].begin(), cs[i].end(), c);
    if (it != cs[i].end()) return {i, static_cast<std::size_t>(it - cs[i].begin())};
  }
  throw DiagramError("crossing c" + std::to_string(c) + " not found on " + to_string(f) + " circles");
}

HeegaardDiagram s3() { return lens(1, 0); }

HeegaardDiagram lens(std::size_t p, std::size_t q) {
  if (p == 0) throw DiagramError("lens space needs p >= 1");
  HeegaardDiagram d;
  d.genus = 1;
  d.closed_manifold = true;
  if (p == 1) {
    d.lower = {{0}};
    d.upper = {{0}};
    d.sign[0] = 1;
    return d;
  }
  if (q < 1 || q >= p) throw DiagramError("lens space L(p,q) needs 1 <= q < p");
  if (std::gcd(p, q) != 1) throw DiagramError("lens space L(p,q) needs gcd(p,q) = 1");
  CircleWord lo, up;
  for (std::size_t k = 0; k < p; ++k) {
    lo.push_back(static_cast<CrossingId>(k));
    up.push_back(static_cast<CrossingId>(q * k % p));
    d.sign[static_cast<CrossingId>(k)] = 1;
  }
  d.lower = {lo};
  d.upper = {up};
  return d;
}

HeegaardDiagram s1xs2() {
  HeegaardDiagram d;
  d.genus = 1;
  d.lower = {{}};
  d.upper = {{}};
  d.closed_manifold = true;
  return d;
}

HeegaardDiagram connect_sum(const HeegaardDiagram& a, const HeegaardDiagram& b) {
  require_valid(a);
  require_valid(b);
  HeegaardDiagram d = a;
  const CrossingId offset = a.fresh_id();
  d.genus += b.genus;
  for (const auto& w : b.lower) {
    CircleWord x;
    for (CrossingId c : w) x.push_back(c + offset);
    d.lower.push_back(x);
  }
  for (const auto& w : b.upper) {
    CircleWord x;
    for (CrossingId c : w) x.push_back(c + offset);
    d.upper.push_back(x);
  }
  for (auto [c, s] : b.sign) d.sign[c + offset] = s;
  d.closed_manifold = a.closed_manifold && b.closed_manifold;
  return d;
}

namespace {

std::size_t parse_number(const std::string& s, const std::string& whole) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    throw DiagramError("unknown builtin diagram '" + whole + "'");
  }
  return std::stoul(s);
}

}  // namespace

HeegaardDiagram builtin_diagram(const std::string& name) {
  const std::string prefix = "connect-sum:";
  if (name.rfind(prefix, 0) == 0) {
    std::string rest = name.substr(prefix.size());
    // split on '+' outside parentheses
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char ch : rest) {
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch == '+' && depth == 0) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    parts.push_back(cur);
    if (parts.size() < 2) throw DiagramError("connect-sum needs at least two summands");
    HeegaardDiagram d = builtin_diagram(parts[0]);
    for (std::size_t i = 1; i < parts.size(); ++i) d = connect_sum(d, builtin_diagram(parts[i]));
    return d;
  }
  if (name == "S3") return s3();
  if (name == "S1xS2") return s1xs2();
  if (name.size() > 3 && name.rfind("L(", 0) == 0 && name.back() == ')') {
    std::string inner = name.substr(2, name.size() - 3);
    auto comma = inner.find(',');
    if (comma == std::string::npos) throw DiagramError("lens space needs the form L(p,q)");
    return lens(parse_number(inner.substr(0, comma), name), parse_number(inner.substr(comma + 1), name));
  }
  throw DiagramError("unknown builtin diagram '" + name + "'");
}

HeegaardDiagram normalize(const HeegaardDiagram& d) {
  std::map<CrossingId, CrossingId> relabel;
  for (const auto& w : d.lower) {
    for (CrossingId c : w) relabel.emplace(c, static_cast<CrossingId>(relabel.size()));
  }
  for (const auto& w : d.upper) {
    for (CrossingId c : w) relabel.emplace(c, static_cast<CrossingId>(relabel.size()));
  }
  HeegaardDiagram out;
  out.genus = d.genus;
  out.closed_manifold = d.closed_manifold;
  for (const auto& w : d.lower) {
    CircleWord x;
    for (CrossingId c : w) x.push_back(relabel.at(c));
    out.lower.push_back(x);
  }
  for (const auto& w : d.upper) {
    CircleWord x;
    for (CrossingId c : w) x.push_back(relabel.at(c));
    out.upper.push_back(x);
  }
  for (auto [c, s] : d.sign) {
    if (relabel.count(c) != 0) out.sign[relabel.at(c)] = s;
  }
  return out;
}

std::string MoveRecord::describe() const {
  std::ostringstream os;
  const char* dir = direction == Direction::forward ? "" : " inverse";
  switch (kind) {
    case MoveKind::reverse_circle:
      os << "reverse " << to_string(family) << "[" << circle << "]";
      break;
    case MoveKind::two_point:
      os << "two-point" << (direction == Direction::forward ? " insert" : " remove") << " lower[" << circle << "]@"
         << position << " upper[" << other_circle << "]@" << other_position;
      if (direction == Direction::forward) {
        os << (order == PairOrder::parallel ? " parallel" : " antiparallel") << (first_sign > 0 ? " +-" : " -+");
      }
      break;
    case MoveKind::slide:
      os << "slide " << to_string(family) << "[" << circle << "]@" << position << " over [" << other_circle
         << "] from " << other_position << (reversed ? " reversed" : "");
      break;
    case MoveKind::trivial_circle:
      os << "trivial-circle " << (direction == Direction::forward ? "add " : "remove ") << to_string(family);
      if (direction == Direction::inverse) os << "[" << circle << "]";
      break;
    case MoveKind::stabilize:
      os << (direction == Direction::forward ? "stabilize" : "destabilize");
      if (direction == Direction::inverse) os << " c" << crossing;
      break;
    case MoveKind::mirror:
      os << "mirror" << dir;
      break;
  }
  return os.str();
}

HeegaardDiagram reverse_circle(const HeegaardDiagram& d, Family f, std::size_t index) {
  if (index >= d.circles(f).size()) throw DiagramError("reverse: no " + to_string(f) + " circle " + std::to_string(index));
  HeegaardDiagram out = d;
  auto& w = out.circles(f)[index];
  std::reverse(w.begin(), w.end());
  for (CrossingId c : w) out.sign[c] = -out.sign[c];
  return out;
}

HeegaardDiagram two_point_insert(const HeegaardDiagram& d, std::size_t lower_circle, std::size_t lower_pos,
                                 std::size_t upper_circle, std::size_t upper_pos, PairOrder order, int first_sign) {
  if (lower_circle >= d.lower.size() || upper_circle >= d.upper.size()) {
    throw DiagramError("two-point insert: circle index out of range");
  }
  if (lower_pos > d.lower[lower_circle].size() || upper_pos > d.upper[upper_circle].size()) {
    throw DiagramError("two-point insert: position out of range");
  }
  if (first_sign != 1 && first_sign != -1) throw DiagramError("two-point insert: sign must be +-1");
  HeegaardDiagram out = d;
  const CrossingId x = d.fresh_id();
  const CrossingId y = x + 1;
  auto& lo = out.lower[lower_circle];
  lo.insert(lo.begin() + static_cast<std::ptrdiff_t>(lower_pos), {x, y});
  auto& up = out.upper[upper_circle];
  if (order == PairOrder::parallel) {
    up.insert(up.begin() + static_cast<std::ptrdiff_t>(upper_pos), {x, y});
  } else {
    up.insert(up.begin() + static_cast<std::ptrdiff_t>(upper_pos), {y, x});
  }
  out.sign[x] = first_sign;
  out.sign[y] = -first_sign;
  return out;
}

HeegaardDiagram two_point_remove(const HeegaardDiagram& d, std::size_t lower_circle, std::size_t lower_pos,
                                 std::size_t upper_circle, std::size_t upper_pos) {
  if (lower_circle >= d.lower.size() || upper_circle >= d.upper.size()) {
    throw DiagramError("two-point remove: circle index out of range");
  }
  const auto& lo = d.lower[lower_circle];
  const auto& up = d.upper[upper_circle];
  if (lo.size() < 2 || up.size() < 2 || lower_pos >= lo.size() || upper_pos >= up.size()) {
    throw DiagramError("two-point remove: positions do not name an adjacent pair");
  }
  CrossingId x = lo[lower_pos];
  CrossingId y = lo[(lower_pos + 1) % lo.size()];
  CrossingId u = up[upper_pos];
  CrossingId v = up[(upper_pos + 1) % up.size()];
  if (!((u == x && v == y) || (u == y && v == x))) {
    throw DiagramError("two-point remove: the pair is not adjacent on both circles");
  }
  if (d.sign.at(x) != -d.sign.at(y)) throw DiagramError("two-point remove: the crossings do not have opposite signs");
  HeegaardDiagram out = d;
  for (auto* w : {&out.lower[lower_circle], &out.upper[upper_circle]}) {
    w->erase(std::remove_if(w->begin(), w->end(), [&](CrossingId c) { return c == x || c == y; }), w->end());
  }
  out.sign.erase(x);
  out.sign.erase(y);
  return out;
}

HeegaardDiagram slide(const HeegaardDiagram& d, Family f, std::size_t target, std::size_t position, std::size_t over,
                      std::size_t basepoint, bool reversed) {
  const auto& cs = d.circles(f);
  if (target >= cs.size() || over >= cs.size()) throw DiagramError("slide: circle index out of range");
  if (target == over) throw DiagramError("slide: a circle cannot slide over itself");
  if (position > cs[target].size()) throw DiagramError("slide: splice position out of range");
  const CircleWord& ow = cs[over];
  if (ow.empty()) {
    if (basepoint != 0) throw DiagramError("slide: basepoint out of range");
    return d;
  }
  if (basepoint >= ow.size()) throw DiagramError("slide: basepoint out of range");

  std::vector<CrossingId> originals;
  const std::size_t n = ow.size();
  for (std::size_t k = 0; k < n; ++k) {
    originals.push_back(reversed ? ow[(basepoint + n - k) % n] : ow[(basepoint + k) % n]);
  }
  HeegaardDiagram out = d;
  const Family opposite = f == Family::lower ? Family::upper : Family::lower;
  CircleWord block;
  CrossingId next = d.fresh_id();
  for (CrossingId orig : originals) {
    CrossingId copy = next++;
    int s = reversed ? -d.sign.at(orig) : d.sign.at(orig);
    out.sign[copy] = s;
    block.push_back(copy);
    Location loc = locate(out, opposite, orig);
    auto& w = out.circles(opposite)[loc.circle];
    std::size_t at = s > 0 ? loc.position + 1 : loc.position;
    w.insert(w.begin() + static_cast<std::ptrdiff_t>(at), copy);
  }
  auto& tw = out.circles(f)[target];
  tw.insert(tw.begin() + static_cast<std::ptrdiff_t>(position), block.begin(), block.end());
  return out;
}

HeegaardDiagram add_trivial_circle(const HeegaardDiagram& d, Family f) {
  HeegaardDiagram out = d;
  out.circles(f).emplace_back();
  out.closed_manifold = false;
  return out;
}

HeegaardDiagram remove_trivial_circle(const HeegaardDiagram& d, Family f, std::size_t index) {
  if (index >= d.circles(f).size()) throw DiagramError("trivial-circle remove: index out of range");
  if (!d.circles(f)[index].empty()) throw DiagramError("trivial-circle remove: circle is not empty");
  HeegaardDiagram out = d;
  out.circles(f).erase(out.circles(f).begin() + static_cast<std::ptrdiff_t>(index));
  out.closed_manifold = false;
  return out;
}

HeegaardDiagram stabilize(const HeegaardDiagram& d) {
  HeegaardDiagram out = d;
  CrossingId x = d.fresh_id();
  out.genus += 1;
  out.lower.push_back({x});
  out.upper.push_back({x});
  out.sign[x] = 1;
  return out;
}

HeegaardDiagram destabilize(const HeegaardDiagram& d, CrossingId c) {
  if (d.genus == 0) throw DiagramError("destabilize: genus is already 0");
  auto lo = std::find(d.lower.begin(), d.lower.end(), CircleWord{c});
  auto up = std::find(d.upper.begin(), d.upper.end(), CircleWord{c});
  if (lo == d.lower.end() || up == d.upper.end()) {
    throw DiagramError("destabilize: c" + std::to_string(c) + " is not alone on a lower and an upper circle");
  }
  HeegaardDiagram out = d;
  out.lower.erase(out.lower.begin() + (lo - d.lower.begin()));
  out.upper.erase(out.upper.begin() + (up - d.upper.begin()));
  out.sign.erase(c);
  out.genus -= 1;
  return out;
}

HeegaardDiagram destabilize(const HeegaardDiagram& d) {
  for (const auto& w : d.lower) {
    if (w.size() == 1 && std::find(d.upper.begin(), d.upper.end(), w) != d.upper.end()) return destabilize(d, w[0]);
  }
  throw DiagramError("destabilize: no one-crossing lower/upper pair");
}

HeegaardDiagram mirror(const HeegaardDiagram& d) {
  HeegaardDiagram out = d;
  for (auto& [c, s] : out.sign) s = -s;
  return out;
}

HeegaardDiagram apply_move(const HeegaardDiagram& d, const MoveRecord& m) {
  const bool fwd = m.direction == Direction::forward;
  switch (m.kind) {
    case MoveKind::reverse_circle:
      return reverse_circle(d, m.family, m.circle);
    case MoveKind::two_point:
      return fwd ? two_point_insert(d, m.circle, m.position, m.other_circle, m.other_position, m.order, m.first_sign)
                 : two_point_remove(d, m.circle, m.position, m.other_circle, m.other_position);
    case MoveKind::slide:
      return slide(d, m.family, m.circle, m.position, m.other_circle, m.other_position, m.reversed);
    case MoveKind::trivial_circle:
      return fwd ? add_trivial_circle(d, m.family) : remove_trivial_circle(d, m.family, m.circle);
    case MoveKind::stabilize:
      return fwd ? stabilize(d) : destabilize(d, m.crossing);
    case MoveKind::mirror:
      return mirror(d);
  }
  throw DiagramError("unknown move kind");
}

namespace {

class Picker {
 public:
  explicit Picker(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return n <= 1 ? 0 : static_cast<std::size_t>(rng_() % n); }
  bool coin() { return (rng_() & 1U) != 0; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

FuzzResult random_moves(const HeegaardDiagram& d, std::size_t count, std::uint64_t seed, const FuzzOptions& opt) {
  require_valid(d);
  FuzzResult res{d, {}};
  Picker pick(seed);
  for (std::size_t step = 0; step < count; ++step) {
    const HeegaardDiagram& cur = res.diagram;
    const std::size_t crossings = cur.crossing_count();
    std::vector<MoveKind> kinds;
    if (!cur.lower.empty() || !cur.upper.empty()) kinds.push_back(MoveKind::reverse_circle);
    if (!cur.lower.empty() && !cur.upper.empty() && crossings + 2 <= opt.max_crossings) kinds.push_back(MoveKind::two_point);
    // slide candidates: (family, target, over) within the crossing budget
    std::vector<std::tuple<Family, std::size_t, std::size_t>> slides;
    for (Family f : {Family::lower, Family::upper}) {
      const auto& cs = cur.circles(f);
      for (std::size_t t = 0; t < cs.size(); ++t)
        for (std::size_t o = 0; o < cs.size(); ++o)
          if (t != o && crossings + cs[o].size() <= opt.max_crossings) slides.emplace_back(f, t, o);
    }
    if (!slides.empty()) kinds.push_back(MoveKind::slide);
    bool room_lower = cur.lower.size() < opt.max_circles;
    bool room_upper = cur.upper.size() < opt.max_circles;
    if (opt.allow_trivial_circles && (room_lower || room_upper)) kinds.push_back(MoveKind::trivial_circle);
    if (cur.genus < opt.max_genus && room_lower && room_upper && crossings + 1 <= opt.max_crossings) {
      kinds.push_back(MoveKind::stabilize);
    }
    if (kinds.empty()) break;

    MoveRecord m;
    m.kind = kinds[pick.below(kinds.size())];
    switch (m.kind) {
      case MoveKind::reverse_circle: {
        std::size_t total = cur.lower.size() + cur.upper.size();
        std::size_t k = pick.below(total);
        m.family = k < cur.lower.size() ? Family::lower : Family::upper;
        m.circle = k < cur.lower.size() ? k : k - cur.lower.size();
        break;
      }
      case MoveKind::two_point:
        m.circle = pick.below(cur.lower.size());
        m.position = pick.below(cur.lower[m.circle].size() + 1);
        m.other_circle = pick.below(cur.upper.size());
        m.other_position = pick.below(cur.upper[m.other_circle].size() + 1);
        m.order = pick.coin() ? PairOrder::parallel : PairOrder::antiparallel;
        m.first_sign = pick.coin() ? 1 : -1;
        break;
      case MoveKind::slide: {
        auto [f, t, o] = slides[pick.below(slides.size())];
        m.family = f;
        m.circle = t;
        m.other_circle = o;
        m.position = pick.below(cur.circles(f)[t].size() + 1);
        m.other_position = pick.below(cur.circles(f)[o].size());
        m.reversed = pick.coin();
        break;
      }
      case MoveKind::trivial_circle:
        if (room_lower && room_upper) {
          m.family = pick.coin() ? Family::lower : Family::upper;
        } else {
          m.family = room_lower ? Family::lower : Family::upper;
        }
        break;
      case MoveKind::stabilize:
      case MoveKind::mirror:
        break;
    }
    res.diagram = apply_move(cur, m);
    res.log.push_back(m);
  }
  return res;
}

nlohmann::json diagram_to_json(const HeegaardDiagram& d) {
  auto name = [](CrossingId c) { return "c" + std::to_string(c); };
  nlohmann::json j;
  j["genus"] = d.genus;
  for (const char* key : {"lower", "upper"}) {
    const auto& cs = std::string(key) == "lower" ? d.lower : d.upper;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& w : cs) {
      nlohmann::json jw = nlohmann::json::array();
      for (CrossingId c : w) jw.push_back(name(c));
      arr.push_back(jw);
    }
    j[key] = arr;
  }
  nlohmann::json signs = nlohmann::json::object();
  for (auto [c, s] : d.sign) signs[name(c)] = s;
  j["signs"] = signs;
  if (d.closed_manifold) j["closed"] = true;
  return j;
}

HeegaardDiagram diagram_from_json(const nlohmann::json& j) {
  try {
    HeegaardDiagram d;
    d.genus = j.at("genus").get<std::size_t>();
    std::vector<std::string> names;
    auto collect = [&](const nlohmann::json& arr) {
      for (const auto& w : arr) {
        for (const auto& c : w) names.push_back(c.get<std::string>());
      }
    };
    collect(j.at("lower"));
    collect(j.at("upper"));
    for (const auto& [k, v] : j.at("signs").items()) names.push_back(k);
    // keep c<digits> numbering when it is usable, otherwise number by first appearance
    std::map<std::string, CrossingId> ids;
    bool numeric = true;
    std::set<CrossingId> used;
    for (const auto& n : names) {
      if (ids.count(n) != 0) continue;
      if (numeric && n.size() > 1 && n[0] == 'c' &&
          std::all_of(n.begin() + 1, n.end(), [](char ch) { return ch >= '0' && ch <= '9'; }) && n.size() < 10) {
        auto id = static_cast<CrossingId>(std::stoul(n.substr(1)));
        if (used.insert(id).second && "c" + std::to_string(id) == n) {
          ids[n] = id;
          continue;
        }
      }
      numeric = false;
      ids[n] = 0;
    }
    if (!numeric) {
      ids.clear();
      for (const auto& n : names) ids.emplace(n, static_cast<CrossingId>(ids.size()));
    }
    auto words = [&](const nlohmann::json& arr) {
      std::vector<CircleWord> out;
      for (const auto& w : arr) {
        CircleWord cw;
        for (const auto& c : w) cw.push_back(ids.at(c.get<std::string>()));
        out.push_back(cw);
      }
      return out;
    };
    d.lower = words(j.at("lower"));
    d.upper = words(j.at("upper"));
    for (const auto& [k, v] : j.at("signs").items()) d.sign[ids.at(k)] = v.get<int>();
    d.closed_manifold = j.value("closed", false);
    require_valid(d);
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw DiagramError(std::string("malformed diagram JSON: ") + e.what());
  }
}

nlohmann::json move_to_json(const MoveRecord& m) {
  static const char* kinds[] = {"reverse_circle", "two_point", "slide", "trivial_circle", "stabilize", "mirror"};
  nlohmann::json j;
  j["kind"] = kinds[static_cast<int>(m.kind)];
  j["direction"] = m.direction == Direction::forward ? "forward" : "inverse";
  j["family"] = to_string(m.family);
  j["circle"] = m.circle;
  j["position"] = m.position;
  j["other_circle"] = m.other_circle;
  j["other_position"] = m.other_position;
  j["order"] = m.order == PairOrder::parallel ? "parallel" : "antiparallel";
  j["first_sign"] = m.first_sign;
  j["reversed"] = m.reversed;
  j["crossing"] = m.crossing;
  j["description"] = m.describe();
  return j;
}

}  // namespace hopf3
