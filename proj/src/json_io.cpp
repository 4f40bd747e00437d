#include "hopf3/json_io.hpp"

#include <fstream>
#include <sstream>

namespace hopf3 {

nlohmann::json field_to_json(Field f) {
  if (f.is_rational()) return "Q";
  return {{"prime", f.characteristic()}};
}

Field field_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "Q") return Field::rationals();
    throw FormatError("unknown field '" + j.get<std::string>() + "'");
  }
  if (j.is_object() && j.contains("prime")) {
    try {
      return Field::prime(j.at("prime").get<std::uint64_t>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("bad prime: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what());
    }
  }
  throw FormatError("field must be \"Q\" or {\"prime\": p}");
}

namespace {

nlohmann::json nest(const Tensor& t, std::size_t axis, std::size_t& flat) {
  if (axis == t.rank()) return t.entry(flat++).to_string();
  nlohmann::json a = nlohmann::json::array();
  for (std::size_t k = 0; k < t.axes()[axis].dim; ++k) a.push_back(nest(t, axis + 1, flat));
  return a;
}

Scalar parse_scalar(const nlohmann::json& j, Field f) {
  if (j.is_string()) {
    try {
      return Scalar::from_rational(f, Rational::parse(j.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("bad scalar: ") + e.what());
    } catch (const std::domain_error& e) {
      throw FormatError(std::string("bad scalar: ") + e.what());
    }
  }
  if (j.is_number_integer()) return Scalar::from_integer(f, j.get<std::int64_t>());
  throw FormatError("scalar entries must be strings \"n\" or \"n/d\" or integers");
}

void unnest(const nlohmann::json& j, const std::vector<Axis>& axes, std::size_t axis, Field f,
            std::vector<Scalar>& out) {
  if (axis == axes.size()) {
    out.push_back(parse_scalar(j, f));
    return;
  }
  if (!j.is_array() || j.size() != axes[axis].dim) {
    throw FormatError("entries: expected an array of length " + std::to_string(axes[axis].dim) + " at depth " +
                      std::to_string(axis));
  }
  for (const auto& x : j) unnest(x, axes, axis + 1, f, out);
}

template <class F>
auto guarded(F&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

nlohmann::json entries_to_json(const Tensor& t) {
  std::size_t flat = 0;
  return nest(t, 0, flat);
}

Tensor entries_from_json(const nlohmann::json& j, const std::vector<Axis>& axes, Field f) {
  std::vector<Scalar> out;
  unnest(j, axes, 0, f, out);
  return Tensor(axes, std::move(out));
}

nlohmann::json tensor_to_json(const Tensor& t) {
  nlohmann::json axes = nlohmann::json::array();
  for (const Axis& a : t.axes()) axes.push_back({{"dim", a.dim}, {"variance", to_string(a.variance)}});
  return {{"field", field_to_json(t.field())}, {"axes", axes}, {"entries", entries_to_json(t)}};
}

Tensor tensor_from_json(const nlohmann::json& j) {
  return guarded([&] {
    Field f = j.contains("field") ? field_from_json(j.at("field")) : Field::rationals();
    std::vector<Axis> axes;
    for (const auto& a : j.at("axes")) {
      std::string v = a.at("variance").get<std::string>();
      if (v != "up" && v != "down") throw FormatError("variance must be \"up\" or \"down\"");
      axes.push_back({a.at("dim").get<std::size_t>(), v == "up" ? Variance::up : Variance::down});
    }
    return entries_from_json(j.at("entries"), axes, f);
  });
}

nlohmann::json hopf_to_json(const HopfAlgebra& h) {
  return {{"dim", h.dim()},
          {"field", field_to_json(h.field())},
          {"M", entries_to_json(h.M())},
          {"Delta", entries_to_json(h.Delta())},
          {"S", entries_to_json(h.S())},
          {"unit", entries_to_json(h.unit())},
          {"counit", entries_to_json(h.counit())}};
}

HopfAlgebra hopf_from_json(const nlohmann::json& j) {
  return guarded([&] {
    const std::size_t n = j.at("dim").get<std::size_t>();
    if (n == 0) throw FormatError("dim must be positive");
    Field f = j.contains("field") ? field_from_json(j.at("field")) : Field::rationals();
    const Axis up{n, Variance::up};
    const Axis down{n, Variance::down};
    return HopfAlgebra(entries_from_json(j.at("M"), {down, down, up}, f),
                       entries_from_json(j.at("Delta"), {down, up, up}, f),
                       entries_from_json(j.at("S"), {down, up}, f), entries_from_json(j.at("unit"), {up}, f),
                       entries_from_json(j.at("counit"), {down}, f));
  });
}

nlohmann::json group_to_json(const FiniteGroup& g) {
  nlohmann::json j = {{"order", g.order()}, {"table", g.table()}};
  if (!g.name().empty()) j["name"] = g.name();
  return j;
}

FiniteGroup group_from_json(const nlohmann::json& j) {
  return guarded([&] {
    auto table = j.at("table").get<std::vector<std::vector<std::size_t>>>();
    if (j.contains("order") && j.at("order").get<std::size_t>() != table.size()) {
      throw FormatError("group order does not match the table");
    }
    return FiniteGroup(std::move(table), j.value("name", std::string()));
  });
}

nlohmann::json presentation_to_json(const GroupPresentation& p) {
  nlohmann::json rel = nlohmann::json::array();
  for (const auto& w : p.relators) {
    nlohmann::json jw = nlohmann::json::array();
    for (const auto& [gen, e] : w) jw.push_back({gen, e});
    rel.push_back(jw);
  }
  return {{"generators", p.generators}, {"relators", rel}};
}

GroupPresentation presentation_from_json(const nlohmann::json& j) {
  return guarded([&] {
    GroupPresentation p;
    p.generators = j.at("generators").get<std::size_t>();
    for (const auto& w : j.at("relators")) {
      Word r;
      for (const auto& l : w) r.emplace_back(l.at(0).get<std::size_t>(), l.at(1).get<int>());
      p.relators.push_back(r);
    }
    try {
      p.validate();
    } catch (const GroupError& e) {
      throw FormatError(e.what());
    }
    return p;
  });
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace hopf3
