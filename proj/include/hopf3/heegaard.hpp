#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace hopf3 {

using CrossingId = std::uint32_t;
using CircleWord = std::vector<CrossingId>;

class DiagramError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Family { lower, upper };
std::string to_string(Family f);

/// A combinatorial Heegaard diagram: lower and upper circles as cyclic words
/// of crossing ids, and a sign per crossing.  Every crossing occurs exactly
/// once among the lower words and exactly once among the upper words.
/// Embeddability on the genus-g surface is not checked.
struct HeegaardDiagram {
  std::size_t genus = 0;
  std::vector<CircleWord> lower;
  std::vector<CircleWord> upper;
  std::map<CrossingId, int> sign;
  /// Set by builders for closed-manifold diagrams (one lower and one upper
  /// circle per handle); kept by moves that preserve that form.
  bool closed_manifold = false;

  [[nodiscard]] const std::vector<CircleWord>& circles(Family f) const { return f == Family::lower ? lower : upper; }
  std::vector<CircleWord>& circles(Family f) { return f == Family::lower ? lower : upper; }
  [[nodiscard]] std::size_t crossing_count() const { return sign.size(); }
  [[nodiscard]] CrossingId fresh_id() const { return sign.empty() ? 0 : sign.rbegin()->first + 1; }

  /// Structural equality; the closed-manifold tag is not compared.
  friend bool operator==(const HeegaardDiagram& a, const HeegaardDiagram& b) {
    return a.genus == b.genus && a.lower == b.lower && a.upper == b.upper && a.sign == b.sign;
  }
};

struct DiagramReport {
  bool valid = true;
  std::vector<std::string> problems;
  std::size_t genus = 0;
  std::size_t lower_circles = 0;
  std::size_t upper_circles = 0;
  std::size_t crossings = 0;
};

DiagramReport validate_diagram(const HeegaardDiagram& d);
/// Throws DiagramError with the first problem.
void require_valid(const HeegaardDiagram& d);

/// Where a crossing sits: circle index and position within its word.
struct Location {
  std::size_t circle = 0;
  std::size_t position = 0;
};
Location locate(const HeegaardDiagram& d, Family f, CrossingId c);

// Builders -----------------------------------------------------------------

HeegaardDiagram s3();
/// Genus one; lower word (c0..c_{p-1}), upper word (c_{qk mod p})_k, all
/// signs positive.  lens(1, q) is s3().
HeegaardDiagram lens(std::size_t p, std::size_t q);
HeegaardDiagram s1xs2();
HeegaardDiagram connect_sum(const HeegaardDiagram& a, const HeegaardDiagram& b);
/// Parses "S3", "S1xS2", "L(p,q)", "connect-sum:A+B" (nested sums allowed).
HeegaardDiagram builtin_diagram(const std::string& name);

/// Relabels crossings 0..n-1 in order of appearance along the lower words.
HeegaardDiagram normalize(const HeegaardDiagram& d);

// Moves ----------------------------------------------------------------------

enum class MoveKind { reverse_circle, two_point, slide, trivial_circle, stabilize, mirror };
enum class Direction { forward, inverse };
enum class PairOrder { parallel, antiparallel };

/// A move and its parameters; replaying a record with apply_move reproduces it.
struct MoveRecord {
  MoveKind kind = MoveKind::mirror;
  Direction direction = Direction::forward;
  Family family = Family::lower;  // reverse, slide, trivial_circle
  std::size_t circle = 0;         // reverse, slide target, trivial remove, two-point lower circle
  std::size_t position = 0;       // slide splice position, two-point lower position
  std::size_t other_circle = 0;   // slide "over" circle, two-point upper circle
  std::size_t other_position = 0; // slide basepoint, two-point upper position
  PairOrder order = PairOrder::parallel;
  int first_sign = 1;             // two-point: sign of the first inserted crossing
  bool reversed = false;          // slide
  CrossingId crossing = 0;        // destabilize: the shared crossing

  [[nodiscard]] std::string describe() const;
  friend bool operator==(const MoveRecord&, const MoveRecord&) = default;
};

HeegaardDiagram reverse_circle(const HeegaardDiagram& d, Family f, std::size_t index);

/// Insert: fresh crossings x, y of opposite signs (x gets first_sign) placed
/// as (x, y) at the lower position and as (x, y) or (y, x) at the upper
/// position.  Remove: the crossings at lower positions (p, p+1) and upper
/// positions (q, q+1), cyclically, must be the same pair with opposite signs.
HeegaardDiagram two_point_insert(const HeegaardDiagram& d, std::size_t lower_circle, std::size_t lower_pos,
                                 std::size_t upper_circle, std::size_t upper_pos, PairOrder order,
                                 int first_sign = 1);
HeegaardDiagram two_point_remove(const HeegaardDiagram& d, std::size_t lower_circle, std::size_t lower_pos,
                                 std::size_t upper_circle, std::size_t upper_pos);

/// Slides `target` over `over` (same family): a copy of over's word read
/// from `basepoint` (reversed, with signs flipped, when `reversed`) is
/// spliced into target's word at `position`.  Each copy gets a fresh id and
/// is placed next to its original on the opposite-family circle: after it
/// when the copy's sign is +1, before it when -1.
HeegaardDiagram slide(const HeegaardDiagram& d, Family f, std::size_t target, std::size_t position, std::size_t over,
                      std::size_t basepoint, bool reversed);

HeegaardDiagram add_trivial_circle(const HeegaardDiagram& d, Family f);
/// The circle must have an empty word.
HeegaardDiagram remove_trivial_circle(const HeegaardDiagram& d, Family f, std::size_t index);

HeegaardDiagram stabilize(const HeegaardDiagram& d);
/// Removes a lower and an upper circle whose words are both the single
/// crossing c.
HeegaardDiagram destabilize(const HeegaardDiagram& d, CrossingId c);
/// Finds the first destabilizable crossing; throws DiagramError if none.
HeegaardDiagram destabilize(const HeegaardDiagram& d);

/// Flips every crossing sign.
HeegaardDiagram mirror(const HeegaardDiagram& d);

HeegaardDiagram apply_move(const HeegaardDiagram& d, const MoveRecord& m);

struct FuzzOptions {
  std::size_t max_crossings = 24;
  std::size_t max_genus = 4;
  std::size_t max_circles = 6;  // per family
  bool allow_trivial_circles = true;
};

struct FuzzResult {
  HeegaardDiagram diagram;
  std::vector<MoveRecord> log;
};

/// Applies `count` moves, each drawn uniformly from the move kinds that have
/// an applicable instance (insert-direction two-point, slide, trivial-circle
/// add, stabilize, reverse), with parameters drawn uniformly.  Moves that
/// would exceed the FuzzOptions limits count as inapplicable.
FuzzResult random_moves(const HeegaardDiagram& d, std::size_t count, std::uint64_t seed,
                        const FuzzOptions& options = {});

// JSON ---------------------------------------------------------------------

nlohmann::json diagram_to_json(const HeegaardDiagram& d);
HeegaardDiagram diagram_from_json(const nlohmann::json& j);
nlohmann::json move_to_json(const MoveRecord& m);

}  // namespace hopf3
