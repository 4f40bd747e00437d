#pragma once

#include <string>

#include "json.hpp"

#include "hopf3/groups.hpp"
#include "hopf3/hopf.hpp"
#include "hopf3/tensor.hpp"

namespace hopf3 {

class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "Q" or {"prime": p}.
nlohmann::json field_to_json(Field f);
Field field_from_json(const nlohmann::json& j);

/// Nested arrays of "n" / "n/d" strings, outermost index first.
nlohmann::json entries_to_json(const Tensor& t);
Tensor entries_from_json(const nlohmann::json& j, const std::vector<Axis>& axes, Field f);

/// {"field": ..., "axes": [{"dim": n, "variance": "up"|"down"}, ...], "entries": nested}
nlohmann::json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j);

/// {"dim", "field", "M", "Delta", "S", "unit", "counit"}
nlohmann::json hopf_to_json(const HopfAlgebra& h);
HopfAlgebra hopf_from_json(const nlohmann::json& j);

/// {"order": n, "table": [[...]]}
nlohmann::json group_to_json(const FiniteGroup& g);
FiniteGroup group_from_json(const nlohmann::json& j);

/// {"generators": g, "relators": [[[gen, exp], ...], ...]}
nlohmann::json presentation_to_json(const GroupPresentation& p);
GroupPresentation presentation_from_json(const nlohmann::json& j);

/// Reads a whole file; throws FormatError when unreadable or not JSON.
nlohmann::json read_json_file(const std::string& path);

}  // namespace hopf3
