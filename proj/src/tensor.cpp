#include "hopf3/tensor.hpp"

#include <algorithm>
#include <numeric>

namespace hopf3 {

std::string to_string(Variance v) { return v == Variance::up ? "up" : "down"; }

std::size_t shape_size(std::span<const Axis> axes) {
  std::size_t n = 1;
  for (const Axis& a : axes) n *= a.dim;
  return n;
}

Tensor::Tensor(std::vector<Axis> axes, Field field)
    : axes_(std::move(axes)), field_(field), entries_(shape_size(axes_), Scalar::zero(field)) {
  for (const Axis& a : axes_) {
    if (a.dim == 0) throw ShapeError("tensor axis of dimension 0");
  }
}

Tensor::Tensor(std::vector<Axis> axes, std::vector<Scalar> entries)
    : axes_(std::move(axes)), entries_(std::move(entries)) {
  for (const Axis& a : axes_) {
    if (a.dim == 0) throw ShapeError("tensor axis of dimension 0");
  }
  if (entries_.size() != shape_size(axes_)) {
    throw ShapeError("entry count " + std::to_string(entries_.size()) + " does not match shape size " +
                     std::to_string(shape_size(axes_)));
  }
  field_ = entries_.front().field();
  for (const Scalar& s : entries_) {
    if (!(s.field() == field_)) throw FieldMismatch("tensor entries from different fields");
  }
}

Tensor Tensor::scalar(const Scalar& s) { return Tensor({}, std::vector<Scalar>{s}); }

std::size_t Tensor::offset(std::span<const std::size_t> index) const {
  if (index.size() != axes_.size()) throw ShapeError("index rank mismatch");
  std::size_t off = 0;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    if (index[k] >= axes_[k].dim) throw ShapeError("index out of range");
    off = off * axes_[k].dim + index[k];
  }
  return off;
}

std::vector<std::size_t> Tensor::unravel(std::size_t off) const {
  std::vector<std::size_t> index(axes_.size());
  for (std::size_t k = axes_.size(); k-- > 0;) {
    index[k] = off % axes_[k].dim;
    off /= axes_[k].dim;
  }
  return index;
}

const Scalar& Tensor::at(std::span<const std::size_t> index) const { return entries_[offset(index)]; }

const Scalar& Tensor::at(std::initializer_list<std::size_t> index) const {
  return at(std::span<const std::size_t>(index.begin(), index.size()));
}

void Tensor::set(std::span<const std::size_t> index, Scalar value) {
  if (!(value.field() == field_)) throw FieldMismatch("entry field differs from tensor field");
  entries_[offset(index)] = std::move(value);
}

void Tensor::set(std::initializer_list<std::size_t> index, Scalar value) {
  set(std::span<const std::size_t>(index.begin(), index.size()), std::move(value));
}

const Scalar& Tensor::value() const {
  if (!axes_.empty()) throw ShapeError("value() on a tensor of rank " + std::to_string(axes_.size()));
  return entries_.front();
}

namespace {

std::vector<std::size_t> strides_of(std::span<const Axis> axes) {
  std::vector<std::size_t> s(axes.size());
  std::size_t acc = 1;
  for (std::size_t k = axes.size(); k-- > 0;) {
    s[k] = acc;
    acc *= axes[k].dim;
  }
  return s;
}

bool is_identity(std::span<const std::size_t> perm) {
  for (std::size_t k = 0; k < perm.size(); ++k) {
    if (perm[k] != k) return false;
  }
  return true;
}

}  // namespace

Tensor permute_axes(const Tensor& t, std::span<const std::size_t> perm) {
  const std::size_t r = t.rank();
  if (perm.size() != r) throw ShapeError("permutation length does not match tensor rank");
  std::vector<bool> seen(r, false);
  for (std::size_t p : perm) {
    if (p >= r || seen[p]) throw ShapeError("not a permutation of axis positions");
    seen[p] = true;
  }
  if (is_identity(perm)) return t;

  std::vector<Axis> axes(r);
  for (std::size_t k = 0; k < r; ++k) axes[k] = t.axes()[perm[k]];
  auto old_strides = strides_of(t.axes());
  std::vector<std::size_t> src_stride(r);
  for (std::size_t k = 0; k < r; ++k) src_stride[k] = old_strides[perm[k]];

  std::vector<Scalar> entries;
  entries.reserve(t.size());
  std::vector<std::size_t> idx(r, 0);
  std::size_t src = 0;
  for (std::size_t n = 0; n < t.size(); ++n) {
    entries.push_back(t.entry(src));
    // odometer increment over the new axes
    for (std::size_t k = r; k-- > 0;) {
      if (++idx[k] < axes[k].dim) {
        src += src_stride[k];
        break;
      }
      src -= src_stride[k] * (axes[k].dim - 1);
      idx[k] = 0;
    }
  }
  return Tensor(std::move(axes), std::move(entries));
}

Tensor tensor_product(const Tensor& a, const Tensor& b) {
  if (!(a.field() == b.field())) throw FieldMismatch("tensor product across fields");
  std::vector<Axis> axes = a.axes();
  axes.insert(axes.end(), b.axes().begin(), b.axes().end());
  std::vector<Scalar> entries;
  entries.reserve(a.size() * b.size());
  for (const Scalar& x : a.entries()) {
    for (const Scalar& y : b.entries()) entries.push_back(x * y);
  }
  return Tensor(std::move(axes), std::move(entries));
}

Tensor contract_pair(const Tensor& t, std::size_t up_axis, std::size_t down_axis) {
  if (up_axis >= t.rank() || down_axis >= t.rank() || up_axis == down_axis) {
    throw ShapeError("contract_pair: invalid axis positions");
  }
  const Axis& u = t.axes()[up_axis];
  const Axis& d = t.axes()[down_axis];
  if (u.variance != Variance::up || d.variance != Variance::down) {
    throw ShapeError("contract_pair: axes must be one up and one down");
  }
  if (u.dim != d.dim) throw ShapeError("contract_pair: dimension mismatch");

  std::vector<std::size_t> perm;
  for (std::size_t k = 0; k < t.rank(); ++k) {
    if (k != up_axis && k != down_axis) perm.push_back(k);
  }
  perm.push_back(up_axis);
  perm.push_back(down_axis);
  Tensor p = permute_axes(t, perm);

  std::vector<Axis> axes(p.axes().begin(), p.axes().end() - 2);
  Tensor out(axes, t.field());
  const std::size_t dim = u.dim;
  const std::size_t block = dim * dim;
  for (std::size_t i = 0; i < out.size(); ++i) {
    Scalar acc = Scalar::zero(t.field());
    for (std::size_t j = 0; j < dim; ++j) acc += p.entry(i * block + j * dim + j);
    out.entry(i) = std::move(acc);
  }
  return out;
}

Tensor contract(const Tensor& a, const Tensor& b,
                std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  if (!(a.field() == b.field())) throw FieldMismatch("contraction across fields");
  std::vector<bool> a_used(a.rank(), false);
  std::vector<bool> b_used(b.rank(), false);
  for (auto [ia, ib] : pairs) {
    if (ia >= a.rank() || ib >= b.rank() || a_used[ia] || b_used[ib]) {
      throw ShapeError("contract: invalid or repeated axis");
    }
    const Axis& x = a.axes()[ia];
    const Axis& y = b.axes()[ib];
    if (x.variance == y.variance) throw ShapeError("contract: paired axes must have opposite variance");
    if (x.dim != y.dim) throw ShapeError("contract: paired axes differ in dimension");
    a_used[ia] = true;
    b_used[ib] = true;
  }

  std::vector<std::size_t> a_perm;
  std::vector<std::size_t> b_perm;
  std::vector<Axis> out_axes;
  for (std::size_t k = 0; k < a.rank(); ++k) {
    if (!a_used[k]) {
      a_perm.push_back(k);
      out_axes.push_back(a.axes()[k]);
    }
  }
  std::size_t shared = 1;
  for (auto [ia, ib] : pairs) {
    a_perm.push_back(ia);
    b_perm.push_back(ib);
    shared *= a.axes()[ia].dim;
  }
  for (std::size_t k = 0; k < b.rank(); ++k) {
    if (!b_used[k]) {
      b_perm.push_back(k);
      out_axes.push_back(b.axes()[k]);
    }
  }
  Tensor pa = permute_axes(a, a_perm);
  Tensor pb = permute_axes(b, b_perm);
  const std::size_t rows = pa.size() / shared;
  const std::size_t cols = pb.size() / shared;

  Tensor out(std::move(out_axes), a.field());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < shared; ++k) {
      const Scalar& x = pa.entry(i * shared + k);
      if (x.is_zero()) continue;
      const std::size_t brow = k * cols;
      const std::size_t orow = i * cols;
      for (std::size_t j = 0; j < cols; ++j) {
        const Scalar& y = pb.entry(brow + j);
        if (!y.is_zero()) out.entry(orow + j).add_product(x, y);
      }
    }
  }
  return out;
}

std::vector<std::size_t> first_difference(const Tensor& a, const Tensor& b) {
  if (a.axes() != b.axes()) throw ShapeError("first_difference: shapes differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.entry(i) == b.entry(i))) return a.unravel(i);
  }
  return {};
}

namespace {

std::size_t rank_rational(const Tensor& m) {
  const std::size_t rows = m.axes()[0].dim;
  const std::size_t cols = m.axes()[1].dim;
  // Scale every row to integers, then Bareiss elimination.
  std::vector<std::vector<mpz_class>> a(rows, std::vector<mpz_class>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < cols; ++j) {
      mpz_class d = m.at({i, j}).value().to_mpq().get_den();
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
    }
    for (std::size_t j = 0; j < cols; ++j) {
      mpq_class q = m.at({i, j}).value().to_mpq() * l;
      a[i][j] = q.get_num();
    }
  }
  mpz_class prev = 1;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][c] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    for (std::size_t i = rank + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        a[i][j] = (a[rank][c] * a[i][j] - a[i][c] * a[rank][j]);
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[rank][c];
    ++rank;
  }
  return rank;
}

std::size_t rank_prime(const Tensor& m) {
  const std::size_t rows = m.axes()[0].dim;
  const std::size_t cols = m.axes()[1].dim;
  std::vector<std::vector<Scalar>> a(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) a[i].push_back(m.at({i, j}));
  }
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows && a[pivot][c].is_zero()) ++pivot;
    if (pivot == rows) continue;
    std::swap(a[pivot], a[rank]);
    Scalar inv = a[rank][c].inverse();
    for (std::size_t i = rank + 1; i < rows; ++i) {
      if (a[i][c].is_zero()) continue;
      Scalar f = a[i][c] * inv;
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

std::size_t matrix_rank(const Tensor& m) {
  if (m.rank() != 2) throw ShapeError("matrix_rank expects a rank-2 tensor");
  return m.field().is_rational() ? rank_rational(m) : rank_prime(m);
}

}  // namespace hopf3
