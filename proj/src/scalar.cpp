#include "hopf3/scalar.hpp"

namespace hopf3 {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (e > 0) {
    if (e & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    e >>= 1;
  }
  return r;
}

std::uint64_t reduce(const Rational& q, std::uint64_t p) {
  mpz_class num = q.to_mpq().get_num() % static_cast<unsigned long>(p);
  if (num < 0) num += static_cast<unsigned long>(p);
  mpz_class den = q.to_mpq().get_den() % static_cast<unsigned long>(p);
  if (den == 0) throw std::domain_error("denominator vanishes in F_" + std::to_string(p));
  std::uint64_t n = num.get_ui();
  std::uint64_t d = den.get_ui();
  return mulmod(n, powmod(d, p - 2, p), p);
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic Miller-Rabin witness set for all 64-bit n.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

Field Field::prime(std::uint64_t p) {
  if (p >= (1ULL << 62)) throw std::invalid_argument("field characteristic too large");
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
  return Field(p);
}

std::string Field::name() const { return is_rational() ? "Q" : "F_" + std::to_string(p_); }

Scalar Scalar::from_integer(Field f, std::int64_t n) {
  if (f.is_rational()) return Scalar(f, Rational(n));
  auto p = static_cast<std::int64_t>(f.characteristic());
  std::int64_t r = n % p;
  if (r < 0) r += p;
  return Scalar(f, Rational(r));
}

Scalar Scalar::from_rational(Field f, const Rational& q) {
  if (f.is_rational()) return Scalar(f, q);
  return Scalar(f, Rational(static_cast<std::int64_t>(reduce(q, f.characteristic()))));
}

void Scalar::check_same_field(const Scalar& o) const {
  if (!(field_ == o.field_)) {
    throw FieldMismatch("field mismatch: " + field_.name() + " vs " + o.field_.name());
  }
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero");
  if (field_.is_rational()) return Scalar(field_, value_.inverse());
  std::uint64_t p = field_.characteristic();
  return Scalar(field_, Rational(static_cast<std::int64_t>(powmod(residue(), p - 2, p))));
}

Scalar Scalar::pow(std::int64_t exponent) const {
  if (exponent < 0) return inverse().pow(-exponent);
  if (field_.is_rational()) return Scalar(field_, value_.pow(exponent));
  std::uint64_t p = field_.characteristic();
  return Scalar(field_, Rational(static_cast<std::int64_t>(
                            powmod(residue(), static_cast<std::uint64_t>(exponent), p))));
}

Scalar Scalar::operator-() const {
  if (field_.is_rational()) return Scalar(field_, -value_);
  std::uint64_t p = field_.characteristic();
  std::uint64_t r = residue();
  return Scalar(field_, Rational(static_cast<std::int64_t>(r == 0 ? 0 : p - r)));
}

Scalar& Scalar::operator+=(const Scalar& o) {
  check_same_field(o);
  if (field_.is_rational()) {
    value_ += o.value_;
  } else {
    std::uint64_t p = field_.characteristic();
    std::uint64_t s = residue() + o.residue();
    if (s >= p) s -= p;
    value_ = Rational(static_cast<std::int64_t>(s));
  }
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) { return *this += -o; }

Scalar& Scalar::operator*=(const Scalar& o) {
  check_same_field(o);
  if (field_.is_rational()) {
    value_ *= o.value_;
  } else {
    value_ = Rational(static_cast<std::int64_t>(mulmod(residue(), o.residue(), field_.characteristic())));
  }
  return *this;
}

void Scalar::add_product(const Scalar& a, const Scalar& b) {
  if (a.is_zero() || b.is_zero()) return;
  if (field_.is_rational() && a.value_.is_small() && b.value_.is_small() && value_.is_small() &&
      a.value_.small_den() == 1 && b.value_.small_den() == 1 && value_.small_den() == 1 &&
      a.field_ == field_ && b.field_ == field_) {
    // Integer fast path: the common case for structure tensors.
    __int128 r = static_cast<__int128>(a.value_.small_num()) * b.value_.small_num() + value_.small_num();
    if (r >= INT64_MIN && r <= INT64_MAX) {
      value_ = Rational(static_cast<std::int64_t>(r));
      return;
    }
  }
  *this += a * b;
}

}  // namespace hopf3
