#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hopf3/tensor.hpp"

namespace hopf3 {

class HopfError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A finite-dimensional Hopf algebra given by structure tensors in a fixed
/// basis.  Axis layouts (inputs first, then outputs):
///   M      (down, down, up)   M_ab^c
///   Delta  (down, up, up)     Delta_a^bc
///   S      (down, up)         S_a^b
///   unit   (up)               i^a
///   counit (down)             eps_a
class HopfAlgebra {
 public:
  /// Checks shapes and invertibility of the dimension; axioms are checked
  /// separately by validate_hopf().  Throws HopfError.
  HopfAlgebra(Tensor m, Tensor delta, Tensor s, Tensor unit, Tensor counit);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] Field field() const { return field_; }
  [[nodiscard]] const Tensor& M() const { return *m_; }
  [[nodiscard]] const Tensor& Delta() const { return *delta_; }
  [[nodiscard]] const Tensor& S() const { return *s_; }
  [[nodiscard]] const Tensor& unit() const { return *unit_; }
  [[nodiscard]] const Tensor& counit() const { return *counit_; }

  [[nodiscard]] const std::shared_ptr<const Tensor>& M_ptr() const { return m_; }
  [[nodiscard]] const std::shared_ptr<const Tensor>& Delta_ptr() const { return delta_; }
  [[nodiscard]] const std::shared_ptr<const Tensor>& S_ptr() const { return s_; }
  [[nodiscard]] const std::shared_ptr<const Tensor>& unit_ptr() const { return unit_; }
  [[nodiscard]] const std::shared_ptr<const Tensor>& counit_ptr() const { return counit_; }

  /// dim H as a field element.
  [[nodiscard]] Scalar dimension_scalar() const;

  friend bool operator==(const HopfAlgebra& a, const HopfAlgebra& b);

 private:
  std::size_t dim_;
  Field field_;
  std::shared_ptr<const Tensor> m_, delta_, s_, unit_, counit_;
};

struct AxiomResult {
  std::string name;
  bool passed = true;
  std::vector<std::size_t> witness;  // first failing index tuple
  std::string detail;
};

struct AxiomReport {
  std::vector<AxiomResult> axioms;
  std::vector<std::string> warnings;
  [[nodiscard]] bool all_passed() const;
  [[nodiscard]] const AxiomResult* find(const std::string& name) const;
};

struct ValidationOptions {
  /// When false an S*S != I failure is reported as a warning instead.
  bool require_involutory = true;
};

/// Checks associativity, coassociativity, unit and counit laws, bialgebra
/// compatibility, both antipode laws, S invertibility and involutivity.
AxiomReport validate_hopf(const HopfAlgebra& h, ValidationOptions options = {});

/// Throws HopfError naming the failing axioms unless validate_hopf passes.
void require_valid(const HopfAlgebra& h, ValidationOptions options = {});

/// T_a = M_ab^b.
Tensor trace_vector(const HopfAlgebra& h);
/// C^a = Delta_b^ba.
Tensor cotrace_vector(const HopfAlgebra& h);
/// T(a_1 ... a_n), a (0,n) tensor; n = 0 gives T(i).
Tensor tracial_product(const HopfAlgebra& h, std::size_t n);
/// Delta^(n)(C), an (n,0) tensor; n = 0 gives eps(C).
Tensor tracial_coproduct(const HopfAlgebra& h, std::size_t n);

enum class Side { left, right };

/// left: Delta_a^bc phi_c = phi_a i^b;  right: Delta_a^bc phi_b = phi_a i^c.
bool integral_check(const HopfAlgebra& h, const Tensor& phi, Side side);
/// left: M_ab^c v^b = eps_a v^c;  right: M_ab^c v^a = eps_b v^c.
bool cointegral_check(const HopfAlgebra& h, const Tensor& v, Side side);

struct SemisimpleForm {
  Tensor form;  // B_ab = T_c M_ab^c
  std::size_t rank = 0;
  bool nondegenerate = false;
};
SemisimpleForm semisimple_form(const HopfAlgebra& h);

/// x (x) y -> x_(1) (x) x_(2) y on H (x) H, checked invertible against the
/// candidate inverse x (x) y -> x_(1) (x) S(x_(2)) y.
bool ladder_check(const HopfAlgebra& h);

/// Reversed multiplication.
HopfAlgebra op(const HopfAlgebra& h);
/// Reversed comultiplication.
HopfAlgebra cop(const HopfAlgebra& h);
/// M and Delta swapped with variances flipped, unit and counit swapped, S transposed.
HopfAlgebra dual(const HopfAlgebra& h);

}  // namespace hopf3
