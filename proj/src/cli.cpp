#include "hopf3/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "hopf3/groups.hpp"
#include "hopf3/heegaard.hpp"
#include "hopf3/hopf.hpp"
#include "hopf3/json_io.hpp"
#include "hopf3/netcompile.hpp"
#include "hopf3/oracle.hpp"

namespace hopf3 {

namespace {

using nlohmann::json;

struct DiagramArgs {
  std::string builtin;
  std::string file;
};

struct AlgebraArgs {
  std::string hopf_file;
  std::string group_algebra;
  std::string function_algebra;
  std::string field = "Q";
  std::string variant;
};

struct Loaded {
  HeegaardDiagram diagram;
  std::string name;
};

struct LoadedAlgebra {
  HopfAlgebra algebra;
  std::string name;
};

unsigned default_threads() {
  if (const char* env = std::getenv("HOPF3_THREADS")) {
    try {
      unsigned long n = std::stoul(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (const std::exception&) {
      // fall through to the default
    }
  }
  return 1;
}

Field parse_field(const std::string& s) {
  if (s == "Q") return Field::rationals();
  std::string digits = s.rfind("F_", 0) == 0 ? s.substr(2) : s;
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw FormatError("field must be Q, a prime p, or F_p");
  }
  return Field::prime(std::stoull(digits));
}

Loaded load_diagram(const DiagramArgs& a) {
  if (a.builtin.empty() == a.file.empty()) throw FormatError("give exactly one of --builtin or --diagram");
  if (!a.builtin.empty()) return {builtin_diagram(a.builtin), a.builtin};
  return {diagram_from_json(read_json_file(a.file)), a.file};
}

LoadedAlgebra load_algebra(const AlgebraArgs& a) {
  int given = !a.hopf_file.empty() + !a.group_algebra.empty() + !a.function_algebra.empty();
  if (given != 1) throw FormatError("give exactly one of --hopf, --group-algebra or --function-algebra");
  Field f = parse_field(a.field);
  std::optional<HopfAlgebra> h;
  std::string name;
  if (!a.hopf_file.empty()) {
    h = hopf_from_json(read_json_file(a.hopf_file));
    name = a.hopf_file;
  } else if (!a.group_algebra.empty()) {
    h = group_algebra(builtin_group(a.group_algebra), f);
    name = "k[" + a.group_algebra + "]";
  } else {
    h = function_algebra(builtin_group(a.function_algebra), f);
    name = "k[" + a.function_algebra + "]*";
  }
  if (!a.variant.empty()) {
    require_valid(*h);
    if (a.variant == "op") {
      h = op(*h);
    } else if (a.variant == "cop") {
      h = cop(*h);
    } else if (a.variant == "dual") {
      h = dual(*h);
    } else {
      throw FormatError("--variant must be op, cop or dual");
    }
    name = a.variant + "(" + name + ")";
  }
  if (f != Field::rationals() && a.hopf_file.empty()) name += " over " + f.name();
  return {std::move(*h), name};
}

void add_diagram_options(CLI::App* app, DiagramArgs& a) {
  app->add_option("--builtin", a.builtin, "builtin diagram: S3, S1xS2, L(p,q), connect-sum:A+B");
  app->add_option("--diagram", a.file, "diagram JSON file");
}

void add_algebra_options(CLI::App* app, AlgebraArgs& a) {
  app->add_option("--hopf", a.hopf_file, "Hopf algebra JSON file");
  app->add_option("--group-algebra", a.group_algebra, "group algebra k[G] of a builtin group");
  app->add_option("--function-algebra", a.function_algebra, "function algebra k[G]* of a builtin group");
  app->add_option("--field", a.field, "Q (default) or a prime p")->capture_default_str();
  app->add_option("--variant", a.variant, "apply op, cop or dual to the algebra");
}

std::string witness_text(const std::vector<std::size_t>& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s + ")";
}

int cmd_invariant(const DiagramArgs& da, const AlgebraArgs& aa, const std::string& format, bool formal,
                  const std::string& emit_graph, std::size_t max_peak, const std::string& assoc, bool slice,
                  std::ostream& out) {
  Loaded d = load_diagram(da);
  LoadedAlgebra h = load_algebra(aa);
  InvariantOptions opt;
  opt.peak_bound = max_peak;
  opt.slice = slice;
  if (assoc == "right") {
    opt.association = ChainAssociation::right;
  } else if (assoc != "left") {
    throw FormatError("--assoc must be left or right");
  }
  if (!emit_graph.empty()) {
    std::ofstream g(emit_graph);
    if (!g) throw FormatError("cannot write '" + emit_graph + "'");
    g << graph_to_json(compile_diagram(d.diagram, opt.association)).dump(2) << "\n";
  }
  InvariantResult r = invariant(d.diagram, h.algebra, opt);
  if (format == "json") {
    json j = {{"diagram", d.name},      {"algebra", h.name},           {"Z", r.Z.to_string()},
              {"exponent", r.exponent}, {"value", r.value.to_string()}, {"peak_entries", r.peak_entries},
              {"sliced_edges", r.sliced_edges}};
    if (formal) j["formal"] = formal_expr(d.diagram);
    out << j.dump() << "\n";
  } else {
    if (formal) out << formal_expr(d.diagram) << "\n";
    out << "diagram  " << d.name << "\n"
        << "algebra  " << h.name << "\n"
        << "Z        " << r.Z.to_string() << "\n"
        << "exponent " << r.exponent << "\n"
        << "value    " << r.value.to_string() << "\n";
  }
  return kExitOk;
}

int cmd_check(const AlgebraArgs& aa, bool allow_non_involutory, const std::string& format, std::ostream& out) {
  LoadedAlgebra h = load_algebra(aa);
  ValidationOptions vo;
  vo.require_involutory = !allow_non_involutory;
  AxiomReport rep = validate_hopf(h.algebra, vo);
  std::vector<AxiomResult> derived;
  if (rep.all_passed()) {
    Tensor t = trace_vector(h.algebra);
    Tensor c = cotrace_vector(h.algebra);
    auto add = [&](const std::string& name, bool ok) { derived.push_back({name, ok, {}, ""}); };
    add("trace_left_integral", integral_check(h.algebra, t, Side::left));
    add("trace_right_integral", integral_check(h.algebra, t, Side::right));
    add("cotrace_left_cointegral", cointegral_check(h.algebra, c, Side::left));
    add("cotrace_right_cointegral", cointegral_check(h.algebra, c, Side::right));
    const std::vector<std::pair<std::size_t, std::size_t>> pair{{0, 0}};
    Tensor tc = contract(t, c, pair);
    add("trace_cotrace_is_dim", tc.value() == h.algebra.dimension_scalar());
    add("semisimple_form_nondegenerate", semisimple_form(h.algebra).nondegenerate);
    add("ladder_invertible", ladder_check(h.algebra));
  }
  bool ok = rep.all_passed() && std::all_of(derived.begin(), derived.end(), [](const AxiomResult& r) { return r.passed; });
  if (format == "json") {
    json arr = json::array();
    for (const auto* list : {&rep.axioms, &derived}) {
      for (const auto& r : *list) {
        json e = {{"name", r.name}, {"passed", r.passed}};
        if (!r.passed && !r.witness.empty()) e["witness"] = r.witness;
        if (!r.detail.empty()) e["detail"] = r.detail;
        arr.push_back(e);
      }
    }
    out << json{{"algebra", h.name}, {"dim", h.algebra.dim()}, {"field", h.algebra.field().name()},
                {"checks", arr}, {"warnings", rep.warnings}, {"all_passed", ok}}
               .dump()
        << "\n";
  } else {
    out << "algebra " << h.name << " (dim " << h.algebra.dim() << " over " << h.algebra.field().name() << ")\n";
    for (const auto* list : {&rep.axioms, &derived}) {
      for (const auto& r : *list) {
        out << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.passed && !r.witness.empty()) out << " at " << witness_text(r.witness);
        if (!r.detail.empty()) out << " (" << r.detail << ")";
        out << "\n";
      }
    }
    for (const auto& w : rep.warnings) out << "WARN " << w << "\n";
    if (!rep.all_passed()) out << "derived checks skipped: axioms failed\n";
    out << (ok ? "all checks passed" : "some checks failed") << "\n";
  }
  return ok ? kExitOk : kExitFalsified;
}

struct FuzzArgs {
  std::size_t moves = 100;
  std::uint64_t seed = 42;
  FuzzOptions options;
  bool no_trivial = false;
};

int cmd_fuzz(const DiagramArgs& da, const AlgebraArgs& aa, const FuzzArgs& fa, std::size_t max_peak,
             const std::string& format, std::ostream& out, std::ostream& err) {
  Loaded d = load_diagram(da);
  LoadedAlgebra h = load_algebra(aa);
  require_valid(h.algebra);
  InvariantOptions opt;
  opt.validate = false;
  opt.peak_bound = max_peak;
  FuzzOptions fo = fa.options;
  fo.allow_trivial_circles = !fa.no_trivial;
  FuzzResult plan = random_moves(d.diagram, fa.moves, fa.seed, fo);
  const Scalar initial = invariant(d.diagram, h.algebra, opt).value;
  HeegaardDiagram cur = d.diagram;
  json log = json::array();
  if (format != "json") {
    out << "diagram " << d.name << ", algebra " << h.name << ", seed " << fa.seed << ", " << fa.moves << " moves\n";
    out << "initial value " << initial.to_string() << "\n";
  }
  for (std::size_t k = 0; k < plan.log.size(); ++k) {
    const MoveRecord& m = plan.log[k];
    cur = apply_move(cur, m);
    Scalar v = invariant(cur, h.algebra, opt).value;
    const bool same = v == initial;
    if (format == "json") {
      log.push_back({{"step", k + 1}, {"move", move_to_json(m)}, {"value", v.to_string()}});
    } else {
      out << "step " << (k + 1) << ": " << m.describe() << " -> " << v.to_string() << "\n";
    }
    if (!same) {
      err << "invariant changed at step " << (k + 1) << " (" << m.describe() << "): " << initial.to_string()
          << " -> " << v.to_string() << "\n";
      err << move_to_json(m).dump() << "\n";
      if (format == "json") {
        out << json{{"diagram", d.name}, {"algebra", h.name}, {"seed", fa.seed}, {"moves", fa.moves},
                    {"initial", initial.to_string()}, {"log", log}, {"constant", false},
                    {"failing_diagram", diagram_to_json(cur)}}
                   .dump()
            << "\n";
      }
      return kExitFalsified;
    }
  }
  if (format == "json") {
    out << json{{"diagram", d.name}, {"algebra", h.name}, {"seed", fa.seed}, {"moves", fa.moves},
                {"initial", initial.to_string()}, {"log", log}, {"constant", true},
                {"final_diagram", diagram_to_json(cur)}}
               .dump()
        << "\n";
  } else {
    out << "constant " << initial.to_string() << " over " << plan.log.size() << " moves\n";
  }
  return kExitOk;
}

int cmd_oracle(const DiagramArgs& da, const std::string& group, bool grid, std::uint64_t bound, unsigned threads,
               const std::string& format, std::ostream& out) {
  struct Cell {
    std::string diagram;
    std::string group;
  };
  std::vector<Cell> cells;
  if (grid) {
    if (!da.builtin.empty() || !da.file.empty() || !group.empty()) {
      throw FormatError("--grid takes no diagram or group");
    }
    for (const auto& dn : oracle_grid_diagram_names()) {
      for (const auto& gn : builtin_group_names()) cells.push_back({dn, gn});
    }
  } else {
    if (group.empty()) throw FormatError("--group is required without --grid");
    load_diagram(da);  // reject bad input before any work
    cells.push_back({da.builtin.empty() ? da.file : da.builtin, group});
  }
  std::vector<std::optional<CrossCheckReport>> reports(cells.size());
  std::vector<std::string> failures(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        HeegaardDiagram d = grid || !da.builtin.empty() ? builtin_diagram(cells[i].diagram)
                                                        : diagram_from_json(read_json_file(da.file));
        reports[i] = cross_check(d, builtin_group(cells[i].group), cells[i].diagram, bound);
      } catch (const ResourceLimit& e) {
        failures[i] = std::string("resource:") + e.what();
      } catch (const std::exception& e) {
        failures[i] = std::string("input:") + e.what();
      }
    }
  };
  const unsigned n = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (const auto& f : failures) {
    if (f.rfind("resource:", 0) == 0) throw ResourceLimit(f.substr(9));
    if (!f.empty()) throw FormatError(f.substr(6));
  }
  bool all = true;
  json arr = json::array();
  for (const auto& r : reports) {
    all = all && r->match;
    if (format == "json") {
      arr.push_back(report_to_json(*r));
    } else {
      out << (r->match ? "match    " : "MISMATCH ") << r->label << " x " << r->group << ": invariant "
          << r->invariant.to_string() << ", hom count " << r->hom_count << "\n";
    }
  }
  if (format == "json") {
    out << (grid || arr.size() != 1 ? json{{"cells", arr}, {"all_match", all}} : arr[0]).dump() << "\n";
  } else if (grid) {
    out << cells.size() << " cells, " << (all ? "all match" : "mismatches found") << "\n";
  }
  return all ? kExitOk : kExitFalsified;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact evaluation of the involutory Hopf algebra invariant of Heegaard diagrams", "hopf3"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text";
  unsigned threads = default_threads();
  std::size_t max_peak = kDefaultPeakBound;
  std::uint64_t bound = kDefaultEnumerationBound;
  app.add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  app.add_option("--threads", threads, "worker threads for grids (env HOPF3_THREADS)");
  app.add_option("--max-peak", max_peak, "bound on planned intermediate tensor entries")->capture_default_str();
  app.add_option("--bound", bound, "bound on homomorphism enumeration states")->capture_default_str();

  DiagramArgs da;
  AlgebraArgs aa;

  auto* inv = app.add_subcommand("invariant", "compute the invariant of a diagram over an algebra");
  add_diagram_options(inv, da);
  add_algebra_options(inv, aa);
  bool formal = false;
  std::string emit_graph;
  std::string assoc = "left";
  inv->add_flag("--formal", formal, "print the index-notation expression");
  inv->add_option("--emit-graph", emit_graph, "write the contraction graph JSON to a file");
  inv->add_option("--assoc", assoc, "chain association: left or right")->capture_default_str();
  bool slice = false;
  inv->add_flag("--slice", slice, "slice edges to keep intermediates within dim^3 entries");

  auto* chk = app.add_subcommand("check", "validate a Hopf algebra");
  add_algebra_options(chk, aa);
  bool allow_non_involutory = false;
  chk->add_flag("--allow-non-involutory", allow_non_involutory, "report S*S != I as a warning");

  auto* fz = app.add_subcommand("fuzz", "apply random moves and check the invariant stays constant");
  add_diagram_options(fz, da);
  add_algebra_options(fz, aa);
  FuzzArgs fa;
  fz->add_option("--moves", fa.moves, "number of moves")->capture_default_str();
  fz->add_option("--seed", fa.seed, "random seed")->capture_default_str();
  fz->add_option("--max-crossings", fa.options.max_crossings, "crossing budget")->capture_default_str();
  fz->add_option("--max-genus", fa.options.max_genus, "genus budget")->capture_default_str();
  fz->add_option("--max-circles", fa.options.max_circles, "circles per family")->capture_default_str();
  fz->add_flag("--no-trivial-circles", fa.no_trivial, "never add trivial circles");

  auto* orc = app.add_subcommand("oracle", "compare the invariant over k[G] with |Hom(pi_1, G)|");
  add_diagram_options(orc, da);
  std::string group;
  bool grid = false;
  orc->add_option("--group", group, "builtin group");
  orc->add_flag("--grid", grid, "run every standard diagram against every builtin group");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (inv->parsed()) return cmd_invariant(da, aa, format, formal, emit_graph, max_peak, assoc, slice, out);
    if (chk->parsed()) return cmd_check(aa, allow_non_involutory, format, out);
    if (fz->parsed()) return cmd_fuzz(da, aa, fa, max_peak, format, out, err);
    if (orc->parsed()) return cmd_oracle(da, group, grid, bound, threads, format, out);
  } catch (const ResourceLimit& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  }
  return kExitInvalidInput;
}

}  // namespace hopf3
