#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hopf3/groups.hpp"
#include "hopf3/heegaard.hpp"

namespace hopf3 {

/// One generator per lower circle; one relator per upper circle, reading
/// each crossing as (its lower circle, its sign).  Only defined for
/// diagrams carrying the closed-manifold tag with n_l = n_u = genus.
GroupPresentation presentation_from_diagram(const HeegaardDiagram& d);

std::uint64_t invariant_via_homs(const HeegaardDiagram& d, const FiniteGroup& g,
                                 std::uint64_t bound = kDefaultEnumerationBound, unsigned threads = 1);

struct CrossCheckReport {
  std::string label;
  nlohmann::json diagram;
  std::string group;
  Scalar invariant;
  std::uint64_t hom_count = 0;
  bool match = false;
};

/// Compares the invariant over k[G] (rationals) with the homomorphism count.
CrossCheckReport cross_check(const HeegaardDiagram& d, const FiniteGroup& g, const std::string& label = "",
                             std::uint64_t bound = kDefaultEnumerationBound, unsigned threads = 1);

nlohmann::json report_to_json(const CrossCheckReport& r);

/// Builtin names of the standard oracle grid: S3, S1xS2, every L(p,q) with
/// 2 <= p <= 8, and three connected sums.
std::vector<std::string> oracle_grid_diagram_names();

}  // namespace hopf3
