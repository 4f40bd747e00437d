#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "hopf3/heegaard.hpp"
#include "support.hpp"

using namespace hopf3;

namespace {

CircleWord ids(std::initializer_list<CrossingId> xs) { return CircleWord(xs); }

std::size_t circle_count(const HeegaardDiagram& d) { return d.lower.size() + d.upper.size(); }

bool same_cyclic(const CircleWord& a, const CircleWord& b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  for (std::size_t r = 0; r < a.size(); ++r) {
    CircleWord x = a;
    std::rotate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(r), x.end());
    if (x == b) return true;
  }
  return false;
}

// Equality up to cyclic rotation of each word.
bool same_up_to_rotation(const HeegaardDiagram& a, const HeegaardDiagram& b) {
  if (a.genus != b.genus || a.sign != b.sign || a.lower.size() != b.lower.size() ||
      a.upper.size() != b.upper.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.lower.size(); ++i) {
    if (!same_cyclic(a.lower[i], b.lower[i])) return false;
  }
  for (std::size_t i = 0; i < a.upper.size(); ++i) {
    if (!same_cyclic(a.upper[i], b.upper[i])) return false;
  }
  return true;
}

std::vector<HeegaardDiagram> sample_diagrams() {
  std::vector<HeegaardDiagram> out;
  for (const std::string& name : test::builder_names()) out.push_back(builtin_diagram(name));
  FuzzOptions opt;
  opt.max_crossings = 12;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) out.push_back(random_moves(lens(5, 2), 8, seed, opt).diagram);
  return out;
}

}  // namespace

TEST_CASE("builders") {
  HeegaardDiagram s = s3();
  CHECK(s.genus == 1);
  CHECK(s.lower == std::vector<CircleWord>{ids({0})});
  CHECK(s.upper == std::vector<CircleWord>{ids({0})});
  CHECK(s.sign.at(0) == 1);
  CHECK(s.closed_manifold);
  DiagramReport r = validate_diagram(s);
  CHECK(r.valid);
  CHECK(r.genus == 1);
  CHECK(r.lower_circles == 1);
  CHECK(r.upper_circles == 1);
  CHECK(r.crossings == 1);

  CHECK(lens(7, 2).upper[0] == ids({0, 2, 4, 6, 1, 3, 5}));
  CHECK(lens(8, 3).upper[0] == ids({0, 3, 6, 1, 4, 7, 2, 5}));
  CHECK(lens(8, 3).lower[0] == ids({0, 1, 2, 3, 4, 5, 6, 7}));
  for (std::size_t p = 2; p <= 9; ++p) {
    for (std::size_t q = 1; q < p; ++q) {
      if (std::gcd(p, q) != 1) {
        CHECK_THROWS_AS(lens(p, q), DiagramError);
        continue;
      }
      HeegaardDiagram l = lens(p, q);
      CHECK(validate_diagram(l).valid);
      CHECK(l.crossing_count() == p);
      for (auto [c, sgn] : l.sign) CHECK(sgn == 1);
      for (std::size_t k = 0; k < p; ++k) CHECK(l.upper[0][k] == (q * k) % p);
    }
  }
  CHECK_THROWS_AS(lens(3, 3), DiagramError);
  CHECK_THROWS_AS(lens(3, 0), DiagramError);

  HeegaardDiagram s12 = s1xs2();
  CHECK(s12.genus == 1);
  CHECK(s12.lower == std::vector<CircleWord>{CircleWord{}});
  CHECK(s12.upper == std::vector<CircleWord>{CircleWord{}});
  CHECK(s12.crossing_count() == 0);
}

TEST_CASE("connected sums and names") {
  HeegaardDiagram a = lens(3, 1), b = lens(5, 2);
  HeegaardDiagram c = connect_sum(a, b);
  CHECK(c.genus == 2);
  CHECK(c.lower.size() == 2);
  CHECK(c.upper.size() == 2);
  CHECK(c.crossing_count() == 8);
  CHECK(validate_diagram(c).valid);
  CHECK(c.closed_manifold);
  CHECK(c.lower[0] == a.lower[0]);
  CHECK(c.upper[0] == a.upper[0]);
  CHECK(builtin_diagram("connect-sum:L(3,1)+L(5,2)") == c);
  CHECK(builtin_diagram("connect-sum:S3+S1xS2+L(2,1)").genus == 3);
  CHECK(builtin_diagram("L(7,2)") == lens(7, 2));
  CHECK(builtin_diagram("S3") == s3());
  CHECK(builtin_diagram("S1xS2") == s1xs2());
  CHECK_THROWS_AS(builtin_diagram("T3"), DiagramError);
  CHECK_THROWS_AS(builtin_diagram("L(4,2)"), DiagramError);
  CHECK_THROWS_AS(builtin_diagram("L(4)"), DiagramError);
  CHECK_THROWS_AS(builtin_diagram("connect-sum:S3"), DiagramError);
}

TEST_CASE("validation") {
  HeegaardDiagram empty;
  CHECK(validate_diagram(empty).valid);
  CHECK(validate_diagram(empty).crossings == 0);

  HeegaardDiagram dup = lens(3, 1);
  dup.lower.push_back(ids({1}));
  dup.genus = 2;
  DiagramReport r = validate_diagram(dup);
  CHECK_FALSE(r.valid);
  CHECK_FALSE(r.problems.empty());
  CHECK_THROWS_AS(require_valid(dup), DiagramError);

  HeegaardDiagram missing = lens(3, 1);
  missing.upper[0].pop_back();
  CHECK_FALSE(validate_diagram(missing).valid);

  HeegaardDiagram unsigned_crossing = lens(3, 1);
  unsigned_crossing.sign.erase(2);
  CHECK_FALSE(validate_diagram(unsigned_crossing).valid);

  HeegaardDiagram bad_sign = lens(3, 1);
  bad_sign.sign[1] = 0;
  CHECK_FALSE(validate_diagram(bad_sign).valid);

  HeegaardDiagram extra_sign = lens(3, 1);
  extra_sign.sign[9] = 1;
  CHECK_FALSE(validate_diagram(extra_sign).valid);
}

TEST_CASE("locate") {
  HeegaardDiagram d = lens(7, 2);
  for (CrossingId c = 0; c < 7; ++c) {
    Location lo = locate(d, Family::lower, c);
    Location up = locate(d, Family::upper, c);
    CHECK(d.lower[lo.circle][lo.position] == c);
    CHECK(d.upper[up.circle][up.position] == c);
  }
  CHECK_THROWS_AS(locate(d, Family::lower, 99), DiagramError);
}

TEST_CASE("reverse and mirror are involutions") {
  for (const HeegaardDiagram& d : sample_diagrams()) {
    CHECK(mirror(mirror(d)) == d);
    HeegaardDiagram m = mirror(d);
    for (auto [c, s] : d.sign) CHECK(m.sign.at(c) == -s);
    CHECK(m.lower == d.lower);
    CHECK(m.upper == d.upper);
    for (Family f : {Family::lower, Family::upper}) {
      for (std::size_t i = 0; i < d.circles(f).size(); ++i) {
        HeegaardDiagram once = reverse_circle(d, f, i);
        CHECK(validate_diagram(once).valid);
        CHECK(reverse_circle(once, f, i) == d);
        CircleWord w = d.circles(f)[i];
        std::reverse(w.begin(), w.end());
        CHECK(once.circles(f)[i] == w);
        for (CrossingId c : w) CHECK(once.sign.at(c) == -d.sign.at(c));
      }
      CHECK_THROWS_AS(reverse_circle(d, f, d.circles(f).size()), DiagramError);
    }
  }
}

TEST_CASE("two-point insert and remove are inverse") {
  for (const HeegaardDiagram& d : sample_diagrams()) {
    for (std::size_t lc = 0; lc < d.lower.size(); ++lc) {
      for (std::size_t lp = 0; lp <= d.lower[lc].size(); ++lp) {
        for (std::size_t uc = 0; uc < d.upper.size(); ++uc) {
          for (std::size_t up = 0; up <= d.upper[uc].size(); ++up) {
            for (PairOrder o : {PairOrder::parallel, PairOrder::antiparallel}) {
              for (int s : {1, -1}) {
                HeegaardDiagram x = two_point_insert(d, lc, lp, uc, up, o, s);
                REQUIRE(validate_diagram(x).valid);
                CHECK(x.crossing_count() == d.crossing_count() + 2);
                const CrossingId a = x.lower[lc][lp];
                const CrossingId b = x.lower[lc][lp + 1];
                CHECK(x.sign.at(a) == s);
                CHECK(x.sign.at(b) == -s);
                CHECK(x.upper[uc][up] == (o == PairOrder::parallel ? a : b));
                CHECK(two_point_remove(x, lc, lp, uc, up) == d);
              }
            }
          }
        }
      }
    }
  }
  HeegaardDiagram l = lens(3, 1);
  CHECK_THROWS_AS(two_point_insert(l, 1, 0, 0, 0, PairOrder::parallel), DiagramError);
  CHECK_THROWS_AS(two_point_insert(l, 0, 4, 0, 0, PairOrder::parallel), DiagramError);
  CHECK_THROWS_AS(two_point_insert(l, 0, 0, 0, 0, PairOrder::parallel, 2), DiagramError);
  // all signs +: no removable pair
  CHECK_THROWS_AS(two_point_remove(l, 0, 0, 0, 0), DiagramError);
  HeegaardDiagram k = lens(5, 2);
  HeegaardDiagram mixed = k;
  mixed.sign[1] = -1;
  // 0,1 adjacent below but not above
  CHECK_THROWS_AS(two_point_remove(mixed, 0, 0, 0, 0), DiagramError);
  CHECK_THROWS_AS(two_point_remove(s1xs2(), 0, 0, 0, 0), DiagramError);
}

TEST_CASE("two-point remove across the word seam") {
  HeegaardDiagram d = lens(3, 1);
  HeegaardDiagram x = two_point_insert(d, 0, 3, 0, 3, PairOrder::parallel);
  // rotate both words so the pair straddles the seam
  std::rotate(x.lower[0].begin(), x.lower[0].begin() + 4, x.lower[0].end());
  std::rotate(x.upper[0].begin(), x.upper[0].begin() + 4, x.upper[0].end());
  HeegaardDiagram back = two_point_remove(x, 0, 4, 0, 4);
  CHECK(same_up_to_rotation(back, d));
}

TEST_CASE("slides") {
  // over an empty circle: no-op
  HeegaardDiagram d = connect_sum(lens(3, 1), s1xs2());
  CHECK(slide(d, Family::lower, 0, 1, 1, 0, false) == d);
  CHECK(slide(d, Family::upper, 0, 2, 1, 0, true) == d);
  CHECK_THROWS_AS(slide(d, Family::lower, 0, 0, 0, 0, false), DiagramError);
  CHECK_THROWS_AS(slide(d, Family::lower, 0, 9, 1, 0, false), DiagramError);
  CHECK_THROWS_AS(slide(d, Family::lower, 0, 0, 2, 0, false), DiagramError);
  CHECK_THROWS_AS(slide(d, Family::lower, 0, 0, 1, 1, false), DiagramError);

  HeegaardDiagram e = connect_sum(lens(2, 1), lens(2, 1));
  for (const HeegaardDiagram& base : {e, connect_sum(lens(5, 2), lens(3, 1)), sample_diagrams().back()}) {
    for (Family f : {Family::lower, Family::upper}) {
      const auto& cs = base.circles(f);
      const Family opp = f == Family::lower ? Family::upper : Family::lower;
      for (std::size_t t = 0; t < cs.size(); ++t) {
        for (std::size_t o = 0; o < cs.size(); ++o) {
          if (t == o || cs[o].empty()) continue;
          for (std::size_t pos = 0; pos <= cs[t].size(); ++pos) {
            for (std::size_t bp = 0; bp < cs[o].size(); ++bp) {
              for (bool rev : {false, true}) {
                HeegaardDiagram s = slide(base, f, t, pos, o, bp, rev);
                REQUIRE(validate_diagram(s).valid);
                const std::size_t n = cs[o].size();
                CHECK(s.crossing_count() == base.crossing_count() + n);
                CHECK(s.circles(f)[t].size() == cs[t].size() + n);
                CHECK(s.circles(f)[o] == cs[o]);
                for (std::size_t k = 0; k < n; ++k) {
                  const CrossingId copy = s.circles(f)[t][pos + k];
                  const CrossingId orig = rev ? cs[o][(bp + n - k) % n] : cs[o][(bp + k) % n];
                  const int sg = rev ? -base.sign.at(orig) : base.sign.at(orig);
                  CHECK(s.sign.at(copy) == sg);
                  Location lc = locate(s, opp, copy);
                  Location lo = locate(s, opp, orig);
                  CHECK(lc.circle == lo.circle);
                  CHECK(lc.position == (sg > 0 ? lo.position + 1 : lo.position - 1));
                }
              }
            }
          }
        }
      }
    }
  }
}

TEST_CASE("trivial circles and stabilization") {
  for (const HeegaardDiagram& d : sample_diagrams()) {
    for (Family f : {Family::lower, Family::upper}) {
      HeegaardDiagram x = add_trivial_circle(d, f);
      CHECK(x.circles(f).size() == d.circles(f).size() + 1);
      CHECK(x.circles(f).back().empty());
      CHECK(x.genus == d.genus);
      CHECK_FALSE(x.closed_manifold);
      CHECK(remove_trivial_circle(x, f, x.circles(f).size() - 1) == d);
      if (!d.circles(f).empty() && !d.circles(f)[0].empty()) {
        CHECK_THROWS_AS(remove_trivial_circle(d, f, 0), DiagramError);
      }
      CHECK_THROWS_AS(remove_trivial_circle(x, f, x.circles(f).size()), DiagramError);
    }
    HeegaardDiagram st = stabilize(d);
    CHECK(st.genus == d.genus + 1);
    CHECK(validate_diagram(st).valid);
    CHECK(st.closed_manifold == d.closed_manifold);
    const CrossingId fresh = st.lower.back().front();
    CHECK(st.lower.back() == ids({fresh}));
    CHECK(st.upper.back() == ids({fresh}));
    CHECK(st.sign.at(fresh) == 1);
    CHECK(destabilize(st, fresh) == d);
  }
  CHECK(destabilize(s3()) == HeegaardDiagram{});
  CHECK_THROWS_AS(destabilize(lens(3, 1)), DiagramError);
  CHECK_THROWS_AS(destabilize(s1xs2()), DiagramError);
  CHECK_THROWS_AS(destabilize(lens(3, 1), 0), DiagramError);
}

TEST_CASE("every single move keeps the diagram valid") {
  for (const HeegaardDiagram& d : sample_diagrams()) {
    for (const MoveRecord& m : test::all_single_moves(d)) {
      CAPTURE(m.describe());
      HeegaardDiagram x = apply_move(d, m);
      CHECK(validate_diagram(x).valid);
      CHECK_FALSE(m.describe().empty());
      if (m.kind == MoveKind::reverse_circle) CHECK(apply_move(x, m) == d);
    }
  }
}

TEST_CASE("apply_move dispatches to the named move") {
  HeegaardDiagram d = connect_sum(lens(5, 2), lens(3, 1));
  MoveRecord m;
  m.kind = MoveKind::slide;
  m.family = Family::upper;
  m.circle = 1;
  m.position = 2;
  m.other_circle = 0;
  m.other_position = 3;
  m.reversed = true;
  CHECK(apply_move(d, m) == slide(d, Family::upper, 1, 2, 0, 3, true));
  m = MoveRecord{};
  m.kind = MoveKind::two_point;
  m.circle = 1;
  m.position = 1;
  m.other_circle = 0;
  m.other_position = 4;
  m.order = PairOrder::antiparallel;
  m.first_sign = -1;
  HeegaardDiagram x = apply_move(d, m);
  CHECK(x == two_point_insert(d, 1, 1, 0, 4, PairOrder::antiparallel, -1));
  m.direction = Direction::inverse;
  CHECK(apply_move(x, m) == d);
  m = MoveRecord{};
  m.kind = MoveKind::mirror;
  CHECK(apply_move(d, m) == mirror(d));
  m.kind = MoveKind::stabilize;
  HeegaardDiagram st = apply_move(d, m);
  m.direction = Direction::inverse;
  m.crossing = st.lower.back().front();
  CHECK(apply_move(st, m) == d);
}

TEST_CASE("random moves") {
  HeegaardDiagram l = lens(7, 2);
  FuzzResult zero = random_moves(l, 0, 5);
  CHECK(zero.diagram == l);
  CHECK(zero.log.empty());

  FuzzResult a = random_moves(l, 100, 42);
  FuzzResult b = random_moves(l, 100, 42);
  CHECK(a.diagram == b.diagram);
  CHECK(a.log == b.log);
  CHECK(a.log.size() == 100);
  FuzzResult c = random_moves(l, 100, 43);
  CHECK_FALSE(c.log == a.log);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    FuzzOptions opt;
    opt.max_crossings = 16;
    opt.max_genus = 3;
    opt.max_circles = 4;
    opt.allow_trivial_circles = seed % 2 == 0;
    FuzzResult r = random_moves(connect_sum(lens(3, 1), s1xs2()), 60, seed, opt);
    HeegaardDiagram replay = connect_sum(lens(3, 1), s1xs2());
    for (const MoveRecord& m : r.log) {
      replay = apply_move(replay, m);
      CHECK(validate_diagram(replay).valid);
      CHECK(replay.crossing_count() <= opt.max_crossings);
      CHECK(replay.genus <= opt.max_genus);
      CHECK(replay.lower.size() <= opt.max_circles);
      CHECK(replay.upper.size() <= opt.max_circles);
      CHECK(m.direction == Direction::forward);
      CHECK(m.kind != MoveKind::mirror);
      if (!opt.allow_trivial_circles) CHECK(m.kind != MoveKind::trivial_circle);
    }
    CHECK(replay == r.diagram);
    if (!opt.allow_trivial_circles) CHECK(r.diagram.closed_manifold);
    CHECK(r.diagram.lower.size() + r.diagram.upper.size() >= 4);
  }

  HeegaardDiagram bad = lens(3, 1);
  bad.sign.erase(0);
  CHECK_THROWS_AS(random_moves(bad, 3, 1), DiagramError);
}

TEST_CASE("random moves exercise every move kind and both pair orders") {
  std::set<MoveKind> kinds;
  std::set<PairOrder> orders;
  std::set<int> signs;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const MoveRecord& m : random_moves(s1xs2(), 50, seed).log) {
      kinds.insert(m.kind);
      if (m.kind == MoveKind::two_point) {
        orders.insert(m.order);
        signs.insert(m.first_sign);
      }
    }
  }
  CHECK(kinds.size() == 5);
  CHECK(orders.size() == 2);
  CHECK(signs.size() == 2);
}

TEST_CASE("normalize relabels in order of appearance") {
  for (const HeegaardDiagram& d : sample_diagrams()) {
    HeegaardDiagram n = normalize(d);
    CHECK(validate_diagram(n).valid);
    CHECK(normalize(n) == n);
    CrossingId expect = 0;
    for (const auto& w : n.lower) {
      for (CrossingId c : w) CHECK(c == expect++);
    }
    // a shifted copy normalizes to the same diagram
    HeegaardDiagram shifted = d;
    shifted.sign.clear();
    for (auto* fam : {&shifted.lower, &shifted.upper}) {
      for (auto& w : *fam) {
        for (CrossingId& c : w) c += 100;
      }
    }
    for (auto [c, s] : d.sign) shifted.sign[c + 100] = s;
    CHECK(normalize(shifted) == n);
  }
}

TEST_CASE("diagram JSON") {
  for (const HeegaardDiagram& d : sample_diagrams()) {
    nlohmann::json j = diagram_to_json(d);
    HeegaardDiagram back = diagram_from_json(j);
    CHECK(back == d);
    CHECK(back.closed_manifold == d.closed_manifold);
    CHECK(diagram_from_json(nlohmann::json::parse(j.dump())) == d);
    CHECK(circle_count(back) == circle_count(d));
  }
  nlohmann::json j = diagram_to_json(lens(3, 1));
  CHECK(j["genus"] == 1);
  CHECK(j["lower"] == nlohmann::json::parse(R"([["c0","c1","c2"]])"));
  CHECK(j["signs"]["c2"] == 1);

  nlohmann::json named = nlohmann::json::parse(
      R"({"genus": 1, "lower": [["x","y"]], "upper": [["y","x"]], "signs": {"x": 1, "y": -1}})");
  HeegaardDiagram d = diagram_from_json(named);
  CHECK(d.crossing_count() == 2);
  CHECK(d.lower[0].size() == 2);
  CHECK(d.sign.at(d.lower[0][0]) == 1);
  CHECK(d.upper[0][0] == d.lower[0][1]);

  CHECK_THROWS_AS(diagram_from_json(nlohmann::json::parse(R"({"genus": 1})")), DiagramError);
  CHECK_THROWS_AS(
      diagram_from_json(nlohmann::json::parse(R"({"genus":1,"lower":[["c0"]],"upper":[["c1"]],"signs":{"c0":1}})")),
      DiagramError);

  MoveRecord m;
  m.kind = MoveKind::two_point;
  m.order = PairOrder::antiparallel;
  m.first_sign = -1;
  nlohmann::json mj = move_to_json(m);
  CHECK(mj["kind"] == "two_point");
  CHECK(mj["order"] == "antiparallel");
  CHECK(mj["first_sign"] == -1);
  CHECK(mj["direction"] == "forward");
}
