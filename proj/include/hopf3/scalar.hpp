#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "hopf3/rational.hpp"

namespace hopf3 {

/// Ground field: the rationals, or F_p for a prime p.
class Field {
 public:
  Field() = default;  // the rationals
  static Field rationals() { return Field(0); }
  /// Throws std::invalid_argument unless p is prime and below 2^62.
  static Field prime(std::uint64_t p);

  [[nodiscard]] bool is_rational() const { return p_ == 0; }
  [[nodiscard]] std::uint64_t characteristic() const { return p_; }
  [[nodiscard]] std::string name() const;

  friend bool operator==(Field a, Field b) = default;

 private:
  explicit Field(std::uint64_t p) : p_(p) {}
  std::uint64_t p_ = 0;
};

bool is_prime(std::uint64_t n);

class FieldMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An element of a Field.  Rational values are held exactly; prime-field
/// values are residues in [0, p).
class Scalar {
 public:
  Scalar() = default;  // rational zero
  Scalar(Rational q) : value_(std::move(q)) {}  // NOLINT(google-explicit-constructor)
  Scalar(std::int64_t n) : value_(n) {}         // NOLINT(google-explicit-constructor)

  static Scalar zero(Field f) { return from_integer(f, 0); }
  static Scalar one(Field f) { return from_integer(f, 1); }
  static Scalar from_integer(Field f, std::int64_t n);
  /// Maps a rational into f; throws std::domain_error if the denominator
  /// vanishes mod p.
  static Scalar from_rational(Field f, const Rational& q);

  [[nodiscard]] Field field() const { return field_; }
  [[nodiscard]] bool is_zero() const { return value_.is_zero(); }
  [[nodiscard]] bool is_one() const { return value_.is_one(); }
  /// The rational value, or the residue as an integer for F_p.
  [[nodiscard]] const Rational& value() const { return value_; }
  [[nodiscard]] std::string to_string() const { return value_.to_string(); }

  [[nodiscard]] Scalar inverse() const;
  [[nodiscard]] Scalar pow(std::int64_t exponent) const;

  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o) { return *this *= o.inverse(); }
  /// this += a * b, the contraction inner step.
  void add_product(const Scalar& a, const Scalar& b);

  friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
  friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
  friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
  friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
  Scalar operator-() const;

  friend bool operator==(const Scalar& a, const Scalar& b) {
    return a.field_ == b.field_ && a.value_ == b.value_;
  }

 private:
  Scalar(Field f, Rational v) : field_(f), value_(std::move(v)) {}
  void check_same_field(const Scalar& o) const;
  [[nodiscard]] std::uint64_t residue() const {
    return static_cast<std::uint64_t>(value_.small_num());
  }

  Field field_ = Field::rationals();
  Rational value_;
};

}  // namespace hopf3
