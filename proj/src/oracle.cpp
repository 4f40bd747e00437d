#include "hopf3/oracle.hpp"

#include <numeric>

#include "hopf3/netcompile.hpp"

namespace hopf3 {

GroupPresentation presentation_from_diagram(const HeegaardDiagram& d) {
  require_valid(d);
  if (!d.closed_manifold) throw DiagramError("diagram is not tagged as a closed-manifold diagram");
  if (d.lower.size() != d.genus || d.upper.size() != d.genus) {
    throw DiagramError("closed-manifold diagram needs one lower and one upper circle per handle");
  }
  std::map<CrossingId, std::size_t> circle_of;
  for (std::size_t i = 0; i < d.lower.size(); ++i) {
    for (CrossingId c : d.lower[i]) circle_of[c] = i;
  }
  GroupPresentation p;
  p.generators = d.lower.size();
  for (const auto& w : d.upper) {
    Word r;
    for (CrossingId c : w) r.emplace_back(circle_of.at(c), d.sign.at(c));
    p.relators.push_back(r);
  }
  return p;
}

std::uint64_t invariant_via_homs(const HeegaardDiagram& d, const FiniteGroup& g, std::uint64_t bound,
                                 unsigned threads) {
  return hom_count(presentation_from_diagram(d), g, bound, threads);
}

CrossCheckReport cross_check(const HeegaardDiagram& d, const FiniteGroup& g, const std::string& label,
                             std::uint64_t bound, unsigned threads) {
  CrossCheckReport r;
  r.label = label;
  r.diagram = diagram_to_json(d);
  r.group = g.name();
  r.hom_count = invariant_via_homs(d, g, bound, threads);
  r.invariant = invariant(d, group_algebra(g)).value;
  r.match = r.invariant == Scalar(static_cast<std::int64_t>(r.hom_count));
  return r;
}

nlohmann::json report_to_json(const CrossCheckReport& r) {
  return {{"diagram", r.label.empty() ? r.diagram : nlohmann::json(r.label)}, {"group", r.group}, {"invariant", r.invariant.to_string()},
          {"hom_count", r.hom_count}, {"match", r.match}};
}

std::vector<std::string> oracle_grid_diagram_names() {
  std::vector<std::string> names = {"S3", "S1xS2"};
  for (std::size_t p = 2; p <= 8; ++p) {
    for (std::size_t q = 1; q < p; ++q) {
      if (std::gcd(p, q) == 1) names.push_back("L(" + std::to_string(p) + "," + std::to_string(q) + ")");
    }
  }
  names.emplace_back("connect-sum:L(2,1)+L(3,1)");
  names.emplace_back("connect-sum:L(3,1)+L(3,1)");
  names.emplace_back("connect-sum:S1xS2+L(4,1)");
  return names;
}

}  // namespace hopf3
