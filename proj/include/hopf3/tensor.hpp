#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hopf3/scalar.hpp"

namespace hopf3 {

enum class Variance { up, down };

inline Variance flip(Variance v) { return v == Variance::up ? Variance::down : Variance::up; }
std::string to_string(Variance v);

struct Axis {
  std::size_t dim = 1;
  Variance variance = Variance::up;
  friend bool operator==(const Axis&, const Axis&) = default;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense tensor over an exact field.  Entries are stored row-major over the
/// axes (last axis fastest).  A tensor with no axes holds exactly one entry.
class Tensor {
 public:
  Tensor() : Tensor(std::vector<Axis>{}, Field::rationals()) {}
  /// Zero tensor of the given shape.
  Tensor(std::vector<Axis> axes, Field field);
  Tensor(std::vector<Axis> axes, std::vector<Scalar> entries);

  static Tensor scalar(const Scalar& s);

  [[nodiscard]] Field field() const { return field_; }
  [[nodiscard]] const std::vector<Axis>& axes() const { return axes_; }
  [[nodiscard]] std::size_t rank() const { return axes_.size(); }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] const std::vector<Scalar>& entries() const { return entries_; }

  [[nodiscard]] const Scalar& at(std::span<const std::size_t> index) const;
  [[nodiscard]] const Scalar& at(std::initializer_list<std::size_t> index) const;
  void set(std::span<const std::size_t> index, Scalar value);
  void set(std::initializer_list<std::size_t> index, Scalar value);

  [[nodiscard]] std::size_t offset(std::span<const std::size_t> index) const;
  /// Inverse of offset().
  [[nodiscard]] std::vector<std::size_t> unravel(std::size_t offset) const;

  /// The value of a rank-0 tensor.
  [[nodiscard]] const Scalar& value() const;

  Scalar& entry(std::size_t flat) { return entries_[flat]; }
  [[nodiscard]] const Scalar& entry(std::size_t flat) const { return entries_[flat]; }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.field_ == b.field_ && a.axes_ == b.axes_ && a.entries_ == b.entries_;
  }

 private:
  std::vector<Axis> axes_;
  Field field_;
  std::vector<Scalar> entries_;
};

std::size_t shape_size(std::span<const Axis> axes);

/// Result axis k is input axis perm[k].
Tensor permute_axes(const Tensor& t, std::span<const std::size_t> perm);
Tensor tensor_product(const Tensor& a, const Tensor& b);
/// Traces an up axis against a down axis of equal dimension; both are removed.
Tensor contract_pair(const Tensor& t, std::size_t up_axis, std::size_t down_axis);

/// Contracts a and b along the listed (axis of a, axis of b) pairs.  Result
/// axes are the uncontracted axes of a in order, then those of b.
Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// First multi-index where a and b differ, or empty if equal.  Shapes must match.
std::vector<std::size_t> first_difference(const Tensor& a, const Tensor& b);

/// Rank of a matrix given as a rank-2 tensor, by fraction-free elimination.
std::size_t matrix_rank(const Tensor& m);

}  // namespace hopf3
