#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace hopf3 {

/// Exact rational number, always in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in 64 bits are stored inline;
/// anything larger is promoted to a shared, immutable GMP rational.  The
/// representation is canonical: a value that fits inline is never stored as a
/// big number, so structural equality is value equality.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n);  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t n, std::int64_t d);
  explicit Rational(const mpq_class& q);

  /// Parses "n" or "n/d" (optional leading '-'); throws std::invalid_argument.
  static Rational parse(std::string_view text);

  [[nodiscard]] bool is_zero() const { return big_ == nullptr && num_ == 0; }
  [[nodiscard]] bool is_one() const { return big_ == nullptr && num_ == 1 && den_ == 1; }
  [[nodiscard]] bool is_integer() const;
  [[nodiscard]] bool is_small() const { return big_ == nullptr; }
  [[nodiscard]] int sign() const;

  /// Only meaningful when is_small().
  [[nodiscard]] std::int64_t small_num() const { return num_; }
  [[nodiscard]] std::int64_t small_den() const { return den_; }

  [[nodiscard]] mpq_class to_mpq() const;
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] Rational inverse() const;
  [[nodiscard]] Rational pow(std::int64_t exponent) const;

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const;

  friend bool operator==(const Rational& a, const Rational& b);
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  void assign_big(mpq_class q);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::shared_ptr<const mpq_class> big_;
};

}  // namespace hopf3
