#include "hopf3/hopf.hpp"

#include <algorithm>

#include "hopf3/network.hpp"

namespace hopf3 {

namespace {

using Labels = std::vector<std::string>;

void expect_shape(const Tensor& t, const char* name, std::initializer_list<Variance> variances, std::size_t dim) {
  if (t.rank() != variances.size()) {
    throw HopfError(std::string(name) + " has rank " + std::to_string(t.rank()) + ", expected " +
                    std::to_string(variances.size()));
  }
  std::size_t k = 0;
  for (Variance v : variances) {
    if (t.axes()[k].variance != v || t.axes()[k].dim != dim) {
      throw HopfError(std::string(name) + " axis " + std::to_string(k) + " should be (" + std::to_string(dim) + ", " +
                      to_string(v) + ")");
    }
    ++k;
  }
}

Tensor identity_matrix(std::size_t dim, Field f) {
  Tensor id({{dim, Variance::down}, {dim, Variance::up}}, f);
  for (std::size_t i = 0; i < dim; ++i) id.set({i, i}, Scalar::one(f));
  return id;
}

Tensor flipped(const Tensor& t) {
  std::vector<Axis> axes = t.axes();
  for (Axis& a : axes) a.variance = flip(a.variance);
  return Tensor(std::move(axes), t.entries());
}

Tensor permuted_flipped(const Tensor& t, std::initializer_list<std::size_t> perm) {
  std::vector<std::size_t> p(perm);
  return flipped(permute_axes(t, p));
}

AxiomResult compare(std::string name, const Tensor& lhs, const Tensor& rhs) {
  AxiomResult r;
  r.name = std::move(name);
  r.witness = first_difference(lhs, rhs);
  r.passed = r.witness.empty();
  if (!r.passed) {
    r.detail = "lhs " + lhs.at(r.witness).to_string() + " != rhs " + rhs.at(r.witness).to_string();
  }
  return r;
}

}  // namespace

HopfAlgebra::HopfAlgebra(Tensor m, Tensor delta, Tensor s, Tensor unit, Tensor counit) {
  if (m.rank() != 3) throw HopfError("M must have rank 3");
  dim_ = m.axes()[0].dim;
  field_ = m.field();
  using V = Variance;
  expect_shape(m, "M", {V::down, V::down, V::up}, dim_);
  expect_shape(delta, "Delta", {V::down, V::up, V::up}, dim_);
  expect_shape(s, "S", {V::down, V::up}, dim_);
  expect_shape(unit, "unit", {V::up}, dim_);
  expect_shape(counit, "counit", {V::down}, dim_);
  for (const Tensor* t : {&delta, &s, &unit, &counit}) {
    if (!(t->field() == field_)) throw HopfError("structure tensors over different fields");
  }
  if (!field_.is_rational() && dim_ % field_.characteristic() == 0) {
    throw HopfError("dimension " + std::to_string(dim_) + " is not invertible in " + field_.name());
  }
  m_ = std::make_shared<const Tensor>(std::move(m));
  delta_ = std::make_shared<const Tensor>(std::move(delta));
  s_ = std::make_shared<const Tensor>(std::move(s));
  unit_ = std::make_shared<const Tensor>(std::move(unit));
  counit_ = std::make_shared<const Tensor>(std::move(counit));
}

Scalar HopfAlgebra::dimension_scalar() const {
  return Scalar::from_integer(field_, static_cast<std::int64_t>(dim_));
}

bool operator==(const HopfAlgebra& a, const HopfAlgebra& b) {
  return a.M() == b.M() && a.Delta() == b.Delta() && a.S() == b.S() && a.unit() == b.unit() &&
         a.counit() == b.counit();
}

bool AxiomReport::all_passed() const {
  return std::all_of(axioms.begin(), axioms.end(), [](const AxiomResult& r) { return r.passed; });
}

const AxiomResult* AxiomReport::find(const std::string& name) const {
  for (const auto& r : axioms) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

AxiomReport validate_hopf(const HopfAlgebra& h, ValidationOptions options) {
  const Field f = h.field();
  const Tensor& M = h.M();
  const Tensor& D = h.Delta();
  const Tensor& S = h.S();
  const Tensor& i = h.unit();
  const Tensor& e = h.counit();
  const Tensor id = identity_matrix(h.dim(), f);
  AxiomReport rep;
  auto add = [&](std::string name, const std::vector<EinsumOperand>& lhs, const std::vector<EinsumOperand>& rhs,
                 const Labels& out) { rep.axioms.push_back(compare(std::move(name), einsum(lhs, out, f), einsum(rhs, out, f))); };

  add("associativity", {{&M, {"a", "b", "x"}}, {&M, {"x", "c", "d"}}}, {{&M, {"b", "c", "x"}}, {&M, {"a", "x", "d"}}},
      {"a", "b", "c", "d"});
  add("coassociativity", {{&D, {"a", "x", "d"}}, {&D, {"x", "b", "c"}}}, {{&D, {"a", "b", "x"}}, {&D, {"x", "c", "d"}}},
      {"a", "b", "c", "d"});
  add("unit_left", {{&i, {"x"}}, {&M, {"x", "b", "c"}}}, {{&id, {"b", "c"}}}, {"b", "c"});
  add("unit_right", {{&M, {"a", "x", "c"}}, {&i, {"x"}}}, {{&id, {"a", "c"}}}, {"a", "c"});
  add("counit_left", {{&D, {"a", "x", "c"}}, {&e, {"x"}}}, {{&id, {"a", "c"}}}, {"a", "c"});
  add("counit_right", {{&D, {"a", "b", "x"}}, {&e, {"x"}}}, {{&id, {"a", "b"}}}, {"a", "b"});
  add("bialgebra_multiplicative", {{&M, {"a", "b", "x"}}, {&D, {"x", "c", "d"}}},
      {{&D, {"a", "p", "q"}}, {&D, {"b", "r", "s"}}, {&M, {"p", "r", "c"}}, {&M, {"q", "s", "d"}}},
      {"a", "b", "c", "d"});
  add("counit_multiplicative", {{&M, {"a", "b", "x"}}, {&e, {"x"}}}, {{&e, {"a"}}, {&e, {"b"}}}, {"a", "b"});
  add("unit_comultiplicative", {{&i, {"x"}}, {&D, {"x", "b", "c"}}}, {{&i, {"b"}}, {&i, {"c"}}}, {"b", "c"});
  {
    const Tensor one = Tensor::scalar(Scalar::one(f));
    add("counit_of_unit", {{&e, {"x"}}, {&i, {"x"}}}, {{&one, {}}}, {});
  }
  add("antipode_left", {{&D, {"a", "p", "q"}}, {&S, {"p", "r"}}, {&M, {"r", "q", "c"}}},
      {{&e, {"a"}}, {&i, {"c"}}}, {"a", "c"});
  add("antipode_right", {{&D, {"a", "p", "q"}}, {&S, {"q", "r"}}, {&M, {"p", "r", "c"}}},
      {{&e, {"a"}}, {&i, {"c"}}}, {"a", "c"});
  {
    AxiomResult inv;
    inv.name = "antipode_invertible";
    std::size_t r = matrix_rank(S);
    inv.passed = r == h.dim();
    if (!inv.passed) inv.detail = "rank " + std::to_string(r) + " < " + std::to_string(h.dim());
    rep.axioms.push_back(inv);
  }
  {
    AxiomResult invol = compare("involutory", einsum({{&S, {"a", "x"}}, {&S, {"x", "b"}}}, {"a", "b"}, f), id);
    if (!invol.passed && !options.require_involutory) {
      rep.warnings.push_back("S*S != I at (" + std::to_string(invol.witness[0]) + "," +
                             std::to_string(invol.witness[1]) + ")");
      invol.passed = true;
      invol.detail = "downgraded to warning";
    }
    rep.axioms.push_back(invol);
  }
  {
    AxiomResult dimr;
    dimr.name = "invertible_dimension";
    dimr.passed = !h.dimension_scalar().is_zero();
    rep.axioms.push_back(dimr);
  }
  return rep;
}

void require_valid(const HopfAlgebra& h, ValidationOptions options) {
  AxiomReport rep = validate_hopf(h, options);
  if (rep.all_passed()) return;
  std::string failed;
  for (const auto& r : rep.axioms) {
    if (!r.passed) failed += (failed.empty() ? "" : ", ") + r.name;
  }
  throw HopfError("Hopf algebra fails axioms: " + failed);
}

Tensor trace_vector(const HopfAlgebra& h) { return einsum({{&h.M(), {"a", "b", "b"}}}, {"a"}, h.field()); }

Tensor cotrace_vector(const HopfAlgebra& h) { return einsum({{&h.Delta(), {"b", "b", "a"}}}, {"a"}, h.field()); }

Tensor tracial_product(const HopfAlgebra& h, std::size_t n) {
  const Tensor T = trace_vector(h);
  const Field f = h.field();
  if (n == 0) return einsum({{&T, {"x"}}, {&h.unit(), {"x"}}}, {}, f);
  Labels out;
  for (std::size_t k = 0; k < n; ++k) out.push_back("a" + std::to_string(k));
  if (n == 1) return T;
  std::vector<EinsumOperand> ops;
  std::string acc = out[0];
  for (std::size_t k = 1; k < n; ++k) {
    std::string next = "x" + std::to_string(k);
    ops.push_back({&h.M(), {acc, out[k], next}});
    acc = next;
  }
  ops.push_back({&T, {acc}});
  return einsum(ops, out, f);
}

Tensor tracial_coproduct(const HopfAlgebra& h, std::size_t n) {
  const Tensor C = cotrace_vector(h);
  const Field f = h.field();
  if (n == 0) return einsum({{&h.counit(), {"x"}}, {&C, {"x"}}}, {}, f);
  if (n == 1) return C;
  Labels out;
  for (std::size_t k = 0; k < n; ++k) out.push_back("a" + std::to_string(k));
  // Left-associated: the first output is split again until n leaves remain.
  std::vector<EinsumOperand> ops;
  ops.push_back({&C, {"x" + std::to_string(n - 1)}});
  for (std::size_t k = n - 1; k >= 1; --k) {
    std::string in = "x" + std::to_string(k);
    std::string left = k == 1 ? out[0] : "x" + std::to_string(k - 1);
    ops.push_back({&h.Delta(), {in, left, out[k]}});
  }
  return einsum(ops, out, f);
}

bool integral_check(const HopfAlgebra& h, const Tensor& phi, Side side) {
  if (phi.rank() != 1 || phi.axes()[0].variance != Variance::down || phi.axes()[0].dim != h.dim()) {
    throw HopfError("integral candidate must be a dual vector of dimension dim H");
  }
  const Field f = h.field();
  Labels d = side == Side::left ? Labels{"a", "b", "c"} : Labels{"a", "c", "b"};
  Labels phi_label = {"c"};
  Tensor lhs = einsum({{&h.Delta(), d}, {&phi, phi_label}}, {"a", "b"}, f);
  Tensor rhs = einsum({{&phi, {"a"}}, {&h.unit(), {"b"}}}, {"a", "b"}, f);
  return lhs == rhs;
}

bool cointegral_check(const HopfAlgebra& h, const Tensor& v, Side side) {
  if (v.rank() != 1 || v.axes()[0].variance != Variance::up || v.axes()[0].dim != h.dim()) {
    throw HopfError("cointegral candidate must be a vector of dimension dim H");
  }
  const Field f = h.field();
  Labels m = side == Side::left ? Labels{"a", "b", "c"} : Labels{"b", "a", "c"};
  Tensor lhs = einsum({{&h.M(), m}, {&v, {"b"}}}, {"a", "c"}, f);
  Tensor rhs = einsum({{&h.counit(), {"a"}}, {&v, {"c"}}}, {"a", "c"}, f);
  return lhs == rhs;
}

SemisimpleForm semisimple_form(const HopfAlgebra& h) {
  const Tensor T = trace_vector(h);
  SemisimpleForm out{einsum({{&T, {"c"}}, {&h.M(), {"a", "b", "c"}}}, {"a", "b"}, h.field()), 0, false};
  out.rank = matrix_rank(out.form);
  out.nondegenerate = out.rank == h.dim();
  return out;
}

bool ladder_check(const HopfAlgebra& h) {
  const Field f = h.field();
  const Tensor& D = h.Delta();
  const Tensor& M = h.M();
  const Tensor& S = h.S();
  // L_xy^pq = Delta_x^pr M_ry^q ; K_xy^pq = Delta_x^pr S_r^s M_sy^q
  Tensor L = einsum({{&D, {"x", "p", "r"}}, {&M, {"r", "y", "q"}}}, {"x", "y", "p", "q"}, f);
  Tensor K = einsum({{&D, {"x", "p", "r"}}, {&S, {"r", "s"}}, {&M, {"s", "y", "q"}}}, {"x", "y", "p", "q"}, f);
  Tensor id = identity_matrix(h.dim(), f);
  Tensor id2 = einsum({{&id, {"x", "u"}}, {&id, {"y", "v"}}}, {"x", "y", "u", "v"}, f);
  Tensor kl = einsum({{&L, {"x", "y", "p", "q"}}, {&K, {"p", "q", "u", "v"}}}, {"x", "y", "u", "v"}, f);
  Tensor lk = einsum({{&K, {"x", "y", "p", "q"}}, {&L, {"p", "q", "u", "v"}}}, {"x", "y", "u", "v"}, f);
  return kl == id2 && lk == id2;
}

namespace {

HopfAlgebra checked(HopfAlgebra out, const char* what) {
  AxiomReport rep = validate_hopf(out);
  if (!rep.all_passed()) {
    throw std::logic_error(std::string(what) + " produced an invalid Hopf algebra; the input was not valid");
  }
  return out;
}

}  // namespace

HopfAlgebra op(const HopfAlgebra& h) {
  std::vector<std::size_t> swap = {1, 0, 2};
  return checked(HopfAlgebra(permute_axes(h.M(), swap), h.Delta(), h.S(), h.unit(), h.counit()), "op");
}

HopfAlgebra cop(const HopfAlgebra& h) {
  std::vector<std::size_t> swap = {0, 2, 1};
  return checked(HopfAlgebra(h.M(), permute_axes(h.Delta(), swap), h.S(), h.unit(), h.counit()), "cop");
}

HopfAlgebra dual(const HopfAlgebra& h) {
  // M*_ab^c = Delta_c^ab ; Delta*_a^bc = M_bc^a ; S*_a^b = S_b^a
  return checked(HopfAlgebra(permuted_flipped(h.Delta(), {1, 2, 0}), permuted_flipped(h.M(), {2, 0, 1}),
                             permuted_flipped(h.S(), {1, 0}), flipped(h.counit()), flipped(h.unit())),
                 "dual");
}

}  // namespace hopf3
