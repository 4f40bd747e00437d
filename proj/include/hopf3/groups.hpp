#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hopf3/hopf.hpp"
#include "hopf3/network.hpp"

namespace hopf3 {

class GroupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A finite group by its multiplication table: table[a][b] = a*b.
class FiniteGroup {
 public:
  /// Validates the Latin-square property, identity, inverses, and
  /// associativity (exhaustive up to order 64, sampled beyond).
  explicit FiniteGroup(std::vector<std::vector<std::size_t>> table, std::string name = "");

  [[nodiscard]] std::size_t order() const { return table_.size(); }
  [[nodiscard]] std::size_t identity() const { return identity_; }
  [[nodiscard]] std::size_t mul(std::size_t a, std::size_t b) const { return table_[a][b]; }
  [[nodiscard]] std::size_t inverse(std::size_t a) const { return inverse_[a]; }
  [[nodiscard]] std::size_t power(std::size_t a, std::int64_t n) const;
  [[nodiscard]] const std::vector<std::vector<std::size_t>>& table() const { return table_; }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] bool is_abelian() const;

 private:
  std::vector<std::vector<std::size_t>> table_;
  std::vector<std::size_t> inverse_;
  std::size_t identity_ = 0;
  std::string name_;
};

FiniteGroup cyclic_group(std::size_t n);
/// The dihedral group of order 2n (symmetries of the n-gon), n >= 2.
FiniteGroup dihedral_group(std::size_t n);
FiniteGroup symmetric_group_3();
FiniteGroup quaternion_group();
FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b);

/// Names: "Z/n", "Dn" (order 2n), "S3", "Q8", and products "AxB".
FiniteGroup builtin_group(std::string_view name);
/// The groups used by the test grids: Z/2..Z/8, S3, D4, Q8.
std::vector<std::string> builtin_group_names();

/// k[G]: basis G, M_ab^c = [ab=c], Delta_a^bc = [a=b=c], S_a^b = [b=a^-1],
/// unit = e, counit = 1.  Throws HopfError if char k divides |G|.
HopfAlgebra group_algebra(const FiniteGroup& g, Field field = Field::rationals());
/// The dual of k[G].
HopfAlgebra function_algebra(const FiniteGroup& g, Field field = Field::rationals());

/// A letter is (generator index, exponent +1 or -1).
using Letter = std::pair<std::size_t, int>;
using Word = std::vector<Letter>;

struct GroupPresentation {
  std::size_t generators = 0;
  std::vector<Word> relators;
  /// Throws GroupError on a generator index out of range or an exponent
  /// other than +-1.
  void validate() const;
  friend bool operator==(const GroupPresentation&, const GroupPresentation&) = default;
};

inline constexpr std::uint64_t kDefaultEnumerationBound = 100'000'000;

/// Number of assignments generators -> G satisfying every relator, by
/// lexicographic enumeration with prefix pruning.  Throws ResourceLimit
/// when |G|^generators exceeds `bound`.  `threads` > 1 splits the first
/// generator's range; the sum is independent of the split.
std::uint64_t hom_count(const GroupPresentation& p, const FiniteGroup& g,
                        std::uint64_t bound = kDefaultEnumerationBound, unsigned threads = 1);

}  // namespace hopf3
