#include "hopf3/groups.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <random>
#include <thread>

namespace hopf3 {

FiniteGroup::FiniteGroup(std::vector<std::vector<std::size_t>> table, std::string name)
    : table_(std::move(table)), name_(std::move(name)) {
  const std::size_t n = table_.size();
  if (n == 0) throw GroupError("group table is empty");
  for (const auto& row : table_) {
    if (row.size() != n) throw GroupError("group table is not square");
    std::vector<bool> seen(n, false);
    for (std::size_t x : row) {
      if (x >= n || seen[x]) throw GroupError("group table is not a Latin square");
      seen[x] = true;
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<bool> seen(n, false);
    for (std::size_t r = 0; r < n; ++r) {
      if (seen[table_[r][c]]) throw GroupError("group table is not a Latin square");
      seen[table_[r][c]] = true;
    }
  }
  bool found = false;
  for (std::size_t e = 0; e < n && !found; ++e) {
    bool ok = true;
    for (std::size_t a = 0; a < n && ok; ++a) ok = table_[e][a] == a && table_[a][e] == a;
    if (ok) {
      identity_ = e;
      found = true;
    }
  }
  if (!found) throw GroupError("group table has no identity");
  auto check = [&](std::size_t a, std::size_t b, std::size_t c) {
    if (table_[table_[a][b]][c] != table_[a][table_[b][c]]) {
      throw GroupError("group table is not associative at (" + std::to_string(a) + "," + std::to_string(b) + "," +
                       std::to_string(c) + ")");
    }
  };
  if (n <= 64) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c) check(a, b, c);
  } else {
    std::mt19937_64 rng(0x5eed);
    for (int k = 0; k < 200000; ++k) check(rng() % n, rng() % n, rng() % n);
  }
  inverse_.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (table_[a][b] == identity_) {
        inverse_[a] = b;
        break;
      }
    }
    if (table_[inverse_[a]][a] != identity_) throw GroupError("inverses inconsistent with table");
  }
}

std::size_t FiniteGroup::power(std::size_t a, std::int64_t n) const {
  std::size_t base = n < 0 ? inverse_[a] : a;
  std::uint64_t e = n < 0 ? static_cast<std::uint64_t>(-n) : static_cast<std::uint64_t>(n);
  std::size_t r = identity_;
  while (e > 0) {
    if (e & 1) r = table_[r][base];
    base = table_[base][base];
    e >>= 1;
  }
  return r;
}

bool FiniteGroup::is_abelian() const {
  for (std::size_t a = 0; a < order(); ++a)
    for (std::size_t b = 0; b < a; ++b)
      if (table_[a][b] != table_[b][a]) return false;
  return true;
}

FiniteGroup cyclic_group(std::size_t n) {
  if (n == 0) throw GroupError("cyclic group of order 0");
  std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return FiniteGroup(std::move(t), "Z/" + std::to_string(n));
}

FiniteGroup dihedral_group(std::size_t n) {
  if (n < 2) throw GroupError("dihedral group needs n >= 2");
  // r^k s^f has index k + n f; s r s = r^-1
  const std::size_t order = 2 * n;
  std::vector<std::vector<std::size_t>> t(order, std::vector<std::size_t>(order));
  for (std::size_t x = 0; x < order; ++x) {
    for (std::size_t y = 0; y < order; ++y) {
      std::size_t a = x % n, f = x / n, b = y % n, g = y / n;
      std::size_t k = f == 0 ? (a + b) % n : (a + n - b) % n;
      t[x][y] = k + n * ((f + g) % 2);
    }
  }
  return FiniteGroup(std::move(t), "D" + std::to_string(n));
}

FiniteGroup symmetric_group_3() {
  std::vector<std::array<int, 3>> perms;
  std::array<int, 3> p = {0, 1, 2};
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  std::vector<std::vector<std::size_t>> t(6, std::vector<std::size_t>(6));
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = 0; b < 6; ++b) {
      std::array<int, 3> c{};
      for (int x = 0; x < 3; ++x) c[x] = perms[a][perms[b][x]];
      t[a][b] = static_cast<std::size_t>(std::find(perms.begin(), perms.end(), c) - perms.begin());
    }
  }
  return FiniteGroup(std::move(t), "S3");
}

FiniteGroup quaternion_group() {
  // index 2u + s for unit u in {1,i,j,k} and sign s (0 = +, 1 = -)
  // unit products: table[u][v] = (unit, sign)
  static constexpr std::array<std::array<std::pair<int, int>, 4>, 4> units = {{
      {{{0, 0}, {1, 0}, {2, 0}, {3, 0}}},
      {{{1, 0}, {0, 1}, {3, 0}, {2, 1}}},
      {{{2, 0}, {3, 1}, {0, 1}, {1, 0}}},
      {{{3, 0}, {2, 0}, {1, 1}, {0, 1}}},
  }};
  std::vector<std::vector<std::size_t>> t(8, std::vector<std::size_t>(8));
  for (std::size_t x = 0; x < 8; ++x) {
    for (std::size_t y = 0; y < 8; ++y) {
      auto [u, s] = units[x / 2][y / 2];
      int sign = (s + static_cast<int>(x % 2) + static_cast<int>(y % 2)) % 2;
      t[x][y] = static_cast<std::size_t>(2 * u + sign);
    }
  }
  return FiniteGroup(std::move(t), "Q8");
}

FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b) {
  const std::size_t na = a.order(), nb = b.order();
  std::vector<std::vector<std::size_t>> t(na * nb, std::vector<std::size_t>(na * nb));
  // (x1,y1)(x2,y2) with the identity pair placed first
  auto idx = [&](std::size_t x, std::size_t y) {
    std::size_t xx = (x + na - a.identity()) % na;
    std::size_t yy = (y + nb - b.identity()) % nb;
    return xx * nb + yy;
  };
  for (std::size_t x1 = 0; x1 < na; ++x1)
    for (std::size_t y1 = 0; y1 < nb; ++y1)
      for (std::size_t x2 = 0; x2 < na; ++x2)
        for (std::size_t y2 = 0; y2 < nb; ++y2) t[idx(x1, y1)][idx(x2, y2)] = idx(a.mul(x1, x2), b.mul(y1, y2));
  return FiniteGroup(std::move(t), a.name() + "x" + b.name());
}

namespace {

std::size_t parse_size(std::string_view s, std::string_view whole) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw GroupError("unknown group '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

FiniteGroup builtin_group(std::string_view name) {
  if (auto x = name.find('x'); x != std::string_view::npos) {
    return direct_product(builtin_group(name.substr(0, x)), builtin_group(name.substr(x + 1)));
  }
  if (name == "S3") return symmetric_group_3();
  if (name == "Q8") return quaternion_group();
  if (name.starts_with("Z/")) {
    std::size_t n = parse_size(name.substr(2), name);
    if (n == 0) throw GroupError("Z/0 is not finite");
    return cyclic_group(n);
  }
  if (name.starts_with("D")) {
    std::size_t n = parse_size(name.substr(1), name);
    if (n < 2) throw GroupError("dihedral group needs n >= 2");
    return dihedral_group(n);
  }
  throw GroupError("unknown group '" + std::string(name) + "'");
}

std::vector<std::string> builtin_group_names() {
  return {"Z/2", "Z/3", "Z/4", "Z/5", "Z/6", "Z/7", "Z/8", "S3", "D4", "Q8"};
}

HopfAlgebra group_algebra(const FiniteGroup& g, Field field) {
  const std::size_t n = g.order();
  if (!field.is_rational() && n % field.characteristic() == 0) {
    throw HopfError("characteristic " + std::to_string(field.characteristic()) + " divides |G| = " +
                    std::to_string(n) + ": dimension not invertible");
  }
  using V = Variance;
  const Scalar one = Scalar::one(field);
  Tensor m({{n, V::down}, {n, V::down}, {n, V::up}}, field);
  Tensor delta({{n, V::down}, {n, V::up}, {n, V::up}}, field);
  Tensor s({{n, V::down}, {n, V::up}}, field);
  Tensor unit({{n, V::up}}, field);
  Tensor counit({{n, V::down}}, field);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) m.set({a, b, g.mul(a, b)}, one);
    delta.set({a, a, a}, one);
    s.set({a, g.inverse(a)}, one);
    counit.set({a}, one);
  }
  unit.set({g.identity()}, one);
  return HopfAlgebra(std::move(m), std::move(delta), std::move(s), std::move(unit), std::move(counit));
}

HopfAlgebra function_algebra(const FiniteGroup& g, Field field) { return dual(group_algebra(g, field)); }

void GroupPresentation::validate() const {
  for (const Word& w : relators) {
    for (auto [gen, exp] : w) {
      if (gen >= generators) throw GroupError("relator uses generator " + std::to_string(gen) + " out of range");
      if (exp != 1 && exp != -1) throw GroupError("relator exponent must be +1 or -1");
    }
  }
}

namespace {

struct HomCounter {
  const FiniteGroup& g;
  std::size_t gens;
  // relators grouped by the generator after which they become fully determined
  std::vector<std::vector<const Word*>> ready_at;
  std::vector<std::size_t> image;

  bool satisfied(const Word& w) const {
    std::size_t acc = g.identity();
    for (auto [gen, exp] : w) acc = g.mul(acc, exp > 0 ? image[gen] : g.inverse(image[gen]));
    return acc == g.identity();
  }

  std::uint64_t count_from(std::size_t k) {
    if (k == gens) return 1;
    std::uint64_t total = 0;
    for (std::size_t x = 0; x < g.order(); ++x) {
      image[k] = x;
      if (prefix_ok(k)) total += count_from(k + 1);
    }
    return total;
  }

  bool prefix_ok(std::size_t k) const {
    for (const Word* w : ready_at[k]) {
      if (!satisfied(*w)) return false;
    }
    return true;
  }
};

}  // namespace

std::uint64_t hom_count(const GroupPresentation& p, const FiniteGroup& g, std::uint64_t bound, unsigned threads) {
  p.validate();
  std::uint64_t states = 1;
  for (std::size_t k = 0; k < p.generators; ++k) {
    if (states > bound / g.order()) {
      throw ResourceLimit("hom_count: |G|^g = " + std::to_string(g.order()) + "^" + std::to_string(p.generators) +
                          " exceeds the enumeration bound " + std::to_string(bound));
    }
    states *= g.order();
  }
  // Relators with no letters are always satisfied.
  HomCounter base{g, p.generators, std::vector<std::vector<const Word*>>(std::max<std::size_t>(p.generators, 1)),
                  std::vector<std::size_t>(p.generators, g.identity())};
  for (const Word& w : p.relators) {
    if (w.empty()) continue;
    std::size_t last = 0;
    for (auto [gen, exp] : w) last = std::max(last, gen);
    base.ready_at[last].push_back(&w);
  }
  if (p.generators == 0) return 1;

  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(g.order())));
  if (threads == 1) return base.count_from(0);

  std::vector<std::uint64_t> partial(threads, 0);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      HomCounter local = base;
      for (std::size_t x = t; x < g.order(); x += threads) {
        local.image[0] = x;
        if (local.prefix_ok(0)) partial[t] += local.count_from(1);
      }
    });
  }
  for (auto& th : pool) th.join();
  std::uint64_t total = 0;
  for (auto v : partial) total += v;
  return total;
}

}  // namespace hopf3
