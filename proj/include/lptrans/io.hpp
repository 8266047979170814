#pragma once

// File formats: point-set CSV, JSON specs for point sets, functions and
// systems, and JSON/CSV emitters for reports.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lptrans/error.hpp"
#include "lptrans/haar.hpp"
#include "lptrans/lpfunc.hpp"
#include "lptrans/pointset.hpp"
#include "lptrans/translate_system.hpp"

namespace lpt::io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

/// Resolves relative paths against the directory of the spec being read and
/// records a digest of every file ingested.
struct IngestContext {
  fs::path base_dir = ".";
  std::vector<std::pair<std::string, std::string>> digests;  // (path, fnv1a-64 hex)
  std::vector<std::string> warnings;
};

inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string read_file(const fs::path& path, IngestContext* ctx = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  if (ctx) ctx->digests.emplace_back(path.string(), fnv1a_hex(s));
  return s;
}

inline fs::path resolve(const IngestContext& ctx, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : ctx.base_dir / path;
}

/// Decimal with 17 significant digits.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

// ---------------------------------------------------------------------------
// Field helpers with path-qualified diagnostics

inline const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw InputError(where + ": missing field '" + key + "'");
  return j.at(key);
}

inline double as_number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw InputError(where + ": expected a number");
}

inline std::vector<double> as_numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline Point as_point(const json& j, const std::string& where) {
  if (j.is_number()) return Point{j.get<double>()};
  return Point(as_numbers(j, where));
}

// ---------------------------------------------------------------------------
// Point sets

inline json parse_json_file(const fs::path& path, IngestContext& ctx) {
  const std::string text = read_file(path, &ctx);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

inline std::vector<double> parse_csv_row(const std::string& line, bool& numeric, std::size_t* bad_column = nullptr) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  numeric = true;
  while (std::getline(ss, cell, ',')) {
    if (numeric && bad_column) *bad_column = row.size() + 1;
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    const std::string t = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) numeric = false;
      row.push_back(v);
    } catch (const std::exception&) {
      numeric = false;
    }
  }
  return row;
}

/// One point per row, d comma-separated columns, optional header row.
inline PointSet points_from_csv_text(const std::string& text, const std::string& origin = "<csv>") {
  std::vector<Point> pts;
  std::map<Point, std::size_t> seen;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0, dim = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    bool numeric = false;
    std::size_t column = 0;
    auto row = parse_csv_row(line, numeric, &column);
    if (!numeric) {
      if (pts.empty() && lineno == 1) continue;  // header
      throw InputError(origin + ":" + std::to_string(lineno) + ":" + std::to_string(column) + ": non-numeric field");
    }
    if (dim == 0) dim = row.size();
    if (row.size() != dim)
      throw InputError(origin + ":" + std::to_string(lineno) + ": expected " + std::to_string(dim) + " columns, got " +
                       std::to_string(row.size()));
    for (double v : row)
      if (!std::isfinite(v)) throw InputError(origin + ":" + std::to_string(lineno) + ": non-finite coordinate");
    Point pt(std::move(row));
    if (auto [it, fresh] = seen.emplace(pt, lineno); !fresh) {
      std::string coords;
      for (std::size_t i = 0; i < pt.dim(); ++i) coords += (i ? ", " : "") + format_number(pt[i]);
      throw InputError(origin + ":" + std::to_string(lineno) + ": duplicate point (" + coords + "), first seen on line " +
                       std::to_string(it->second));
    }
    pts.push_back(std::move(pt));
  }
  try {
    return PointSet(std::move(pts));
  } catch (const PreconditionError& e) {
    throw InputError(origin + ": " + e.what());
  }
}

inline PointSet read_points_csv(const fs::path& path, IngestContext* ctx = nullptr) {
  return points_from_csv_text(read_file(path, ctx), path.string());
}

inline std::string points_to_csv(const PointSet& s) {
  std::string out;
  for (const Point& p : s.points()) {
    for (std::size_t i = 0; i < p.dim(); ++i) out += (i ? "," : "") + format_number(p[i]);
    out += "\n";
  }
  return out;
}

inline PointSet parse_point_set(const json& j, IngestContext& ctx, const std::string& where = "gamma");

inline PointSet parse_point_set(const json& j, IngestContext& ctx, const std::string& where) {
  if (j.is_string()) return read_points_csv(resolve(ctx, j.get<std::string>()), &ctx);
  const std::string kind = field(j, "kind", where).get<std::string>();
  try {
    if (kind == "lattice") {
      gen::Lattice spec;
      const json& basis = field(j, "basis", where);
      if (!basis.is_array()) throw InputError(where + ".basis: expected an array of vectors");
      for (std::size_t i = 0; i < basis.size(); ++i)
        spec.basis.push_back(as_numbers(basis[i], where + ".basis[" + std::to_string(i) + "]"));
      spec.window = as_number(field(j, "window", where), where + ".window");
      if (j.contains("offset")) spec.offset = as_numbers(j["offset"], where + ".offset");
      return make_lattice(spec);
    }
    if (kind == "reciprocal") {
      return make_reciprocal(field(j, "N", where).get<std::int64_t>());
    }
    if (kind == "union") {
      const json& ch = field(j, "children", where);
      std::vector<std::string> tags;
      std::vector<PointSet> parts;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const std::string w = where + ".children[" + std::to_string(i) + "]";
        tags.push_back(ch[i].is_object() && ch[i].contains("tag") ? ch[i]["tag"].get<std::string>()
                                                                   : "part" + std::to_string(i));
        parts.push_back(parse_point_set(ch[i].is_object() && ch[i].contains("set") ? ch[i]["set"] : ch[i], ctx, w));
      }
      return make_union(std::move(tags), std::move(parts));
    }
    if (kind == "explicit") {
      const json& rows = field(j, "rows", where);
      std::vector<Point> pts;
      for (std::size_t i = 0; i < rows.size(); ++i)
        pts.push_back(as_point(rows[i], where + ".rows[" + std::to_string(i) + "]"));
      try {
        return PointSet(std::move(pts));
      } catch (const PreconditionError& e) {
        throw InputError(where + ": " + e.what());
      }
    }
    if (kind == "csv") return read_points_csv(resolve(ctx, field(j, "path", where).get<std::string>()), &ctx);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(where + ": " + e.what());
  }
  throw InputError(where + ": unknown point-set kind '" + kind + "'");
}

inline json to_json(const PointSet& s) {
  json rows = json::array();
  for (const Point& p : s.points()) {
    json r = json::array();
    for (double x : p.coords()) r.push_back(x);
    rows.push_back(r);
  }
  return json{{"kind", "explicit"}, {"rows", rows}};
}

// ---------------------------------------------------------------------------
// Functions

inline Box parse_box(const json& j, const std::string& where) {
  return Box(as_point(field(j, "lower", where), where + ".lower"), as_point(field(j, "upper", where), where + ".upper"));
}

inline PiecewiseFn parse_function(const json& j, IngestContext& ctx, const std::string& where = "f") {
  if (j.is_string()) {
    const fs::path path = resolve(ctx, j.get<std::string>());
    return parse_function(parse_json_file(path, ctx), ctx, path.string());
  }
  const std::string kind = j.contains("kind") ? j["kind"].get<std::string>() : "pieces";
  try {
    if (kind == "pieces") {
      const auto dim = field(j, "dimension", where).get<std::size_t>();
      const json& pcs = field(j, "pieces", where);
      std::vector<Piece> pieces;
      for (std::size_t i = 0; i < pcs.size(); ++i) {
        const std::string w = where + ".pieces[" + std::to_string(i) + "]";
        const double re = pcs[i].contains("re") ? as_number(pcs[i]["re"], w + ".re") : 0.0;
        const double im = pcs[i].contains("im") ? as_number(pcs[i]["im"], w + ".im") : 0.0;
        Box b = parse_box(pcs[i], w);
        if (b.dim() != dim) throw InputError(w + ": box dimension differs from declared dimension");
        pieces.push_back({std::move(b), Complex(re, im)});
      }
      PiecewiseFn quick = PiecewiseFn::trusted(dim, pieces);
      if (!quick.pieces_disjoint()) {
        ctx.warnings.push_back(where + ": overlapping pieces were canonicalized (values summed)");
        return canonicalize(dim, std::move(pieces));
      }
      return quick;
    }
    if (kind == "indicator") {
      const double re = j.contains("re") ? as_number(j["re"], where + ".re") : 1.0;
      const double im = j.contains("im") ? as_number(j["im"], where + ".im") : 0.0;
      if (j.contains("cube")) {
        const json& c = j["cube"];
        return PiecewiseFn::indicator(
            Cube(as_point(field(c, "center", where + ".cube"), where + ".cube.center"),
                 as_number(field(c, "side", where + ".cube"), where + ".cube.side")),
            Complex(re, im));
      }
      return PiecewiseFn::indicator(parse_box(j, where), Complex(re, im));
    }
    if (kind == "sampled") {
      const std::string expr = field(j, "expression", where).get<std::string>();
      const double step = as_number(field(j, "step", where), where + ".step");
      const Box support = parse_box(field(j, "support", where), where + ".support");
      const double p = j.contains("p") ? as_number(j["p"], where + ".p") : 2.0;
      auto s = sample(expr, step, support, p);
      ctx.warnings.push_back(where + ": sampled '" + expr + "' with L^p error bound " + format_number(s.error_bound));
      return s.fn;
    }
    if (kind == "haar") {
      HaarIndex idx;
      if (!(j.contains("constant") && j["constant"].get<bool>())) {
        idx.level = field(j, "level", where).get<int>();
        idx.offset = field(j, "offset", where).get<std::int64_t>();
      }
      const double p = as_number(field(j, "p", where), where + ".p");
      return j.contains("dual") && j["dual"].get<bool>() ? dual_fn(idx, p) : haar_fn(idx, p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(where + ": " + e.what());
  }
  throw InputError(where + ": unknown function kind '" + kind + "'");
}

inline json to_json(const PiecewiseFn& f) {
  json pieces = json::array();
  for (const auto& pc : f.pieces()) {
    json lo = json::array(), hi = json::array();
    for (double x : pc.box.lower().coords()) lo.push_back(x);
    for (double x : pc.box.upper().coords()) hi.push_back(x);
    pieces.push_back(json{{"lower", lo}, {"upper", hi}, {"re", pc.value.real()}, {"im", pc.value.imag()}});
  }
  return json{{"dimension", f.dim()}, {"pieces", pieces}};
}

// ---------------------------------------------------------------------------
// Systems

inline TranslateSystem parse_system(const json& j, IngestContext& ctx, const std::string& where = "system") {
  if (j.is_string()) {
    const fs::path path = resolve(ctx, j.get<std::string>());
    return parse_system(parse_json_file(path, ctx), ctx, path.string());
  }
  const double p = as_number(field(j, "p", where), where + ".p");
  const json& gens = field(j, "generators", where);
  if (!gens.is_array() || gens.empty()) throw InputError(where + ".generators: expected a nonempty array");
  std::vector<Generator> out;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string w = where + ".generators[" + std::to_string(i) + "]";
    std::string label = gens[i].contains("label") ? gens[i]["label"].get<std::string>() : "g" + std::to_string(i);
    out.emplace_back(parse_function(field(gens[i], "f", w), ctx, w + ".f"),
                     parse_point_set(field(gens[i], "gamma", w), ctx, w + ".gamma"), std::move(label));
  }
  return TranslateSystem(std::move(out), ExponentPair::from_p(p));
}

inline HaarExpansion parse_expansion(const json& j, const std::string& where = "expansion") {
  if (!j.is_array()) throw InputError(where + ": expected an array of terms");
  HaarExpansion out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    HaarIndex idx;
    if (!(j[i].contains("constant") && j[i]["constant"].get<bool>())) {
      idx.level = field(j[i], "level", w).get<int>();
      idx.offset = field(j[i], "offset", w).get<std::int64_t>();
    }
    validate(idx);
    const double re = j[i].contains("re") ? as_number(j[i]["re"], w + ".re") : 0.0;
    const double im = j[i].contains("im") ? as_number(j[i]["im"], w + ".im") : 0.0;
    out[idx] += Complex(re, im);
  }
  return out;
}

// ---------------------------------------------------------------------------
// File ingestion

inline PointSet ingest_points(const fs::path& path, IngestContext& ctx) {
  if (path.extension() == ".json") return parse_point_set(parse_json_file(path, ctx), ctx, path.string());
  return read_points_csv(path, &ctx);
}

inline PiecewiseFn ingest_function(const fs::path& path, IngestContext& ctx) {
  return parse_function(json(path.string()), ctx, path.string());
}

inline TranslateSystem ingest_system(const fs::path& path, IngestContext& ctx) {
  return parse_system(json(path.string()), ctx, path.string());
}

// ---------------------------------------------------------------------------
// Report emitters

inline json to_json(const Point& p) {
  json a = json::array();
  for (double x : p.coords()) a.push_back(num(x));
  return a;
}

inline json to_json(const Box& b) { return json{{"lower", to_json(b.lower())}, {"upper", to_json(b.upper())}}; }

inline json to_json(const Cube& c) { return json{{"center", to_json(c.center())}, {"side", num(c.side())}}; }

inline json to_json(Complex z) { return json{{"re", num(z.real())}, {"im", num(z.imag())}}; }

inline json to_json(const DensityProfile& prof) {
  json rows = json::array();
  for (const auto& r : prof.rows)
    rows.push_back(json{{"h", num(r.h)},
                        {"nu_lower", r.nu_lower},
                        {"nu_upper", r.nu_upper},
                        {"ratio_lower", num(r.ratio_lower)},
                        {"ratio_upper", num(r.ratio_upper)}});
  return json{{"rows", rows},
              {"density_estimate", num(prof.density_estimate)},
              {"exact", prof.exact},
              {"truncation_bias", prof.truncation_bias}};
}

inline std::string density_csv(const DensityProfile& prof) {
  std::string out = "h,nu_lower,nu_upper,ratio_lower,ratio_upper\n";
  for (const auto& r : prof.rows)
    out += format_number(r.h) + "," + std::to_string(r.nu_lower) + "," + std::to_string(r.nu_upper) + "," +
           format_number(r.ratio_lower) + "," + format_number(r.ratio_upper) + "\n";
  return out;
}

inline json to_json(const SeparationReport& rep) {
  return json{{"min_gap", num(rep.min_gap)}, {"delta", num(rep.delta)}, {"part_count", rep.part_count},
              {"parts", rep.parts}};
}

inline json to_json(const BesselEstimate& est) {
  json rows = json::array();
  for (const auto& r : est.per_test)
    rows.push_back(json{{"id", r.id}, {"bessel_sum", num(r.bessel_sum)}, {"q_norm", num(r.q_norm)},
                        {"ratio", num(r.ratio)}});
  return json{{"p_prime", num(est.p_prime)}, {"per_test", rows}, {"bound_estimate", num(est.bound_estimate)}};
}

inline json to_json(const BlowupWitness& w) {
  return json{{"beta", to_json(w.beta)},           {"h", num(w.h)},
              {"grid_inf", num(w.grid_inf)},       {"points_in_cube", w.points_in_cube},
              {"count", w.count},                  {"sum_lower_bound", num(w.sum_lower_bound)}};
}

inline json to_json(const CqSweep& s) {
  json rows = json::array();
  for (const auto& r : s.rows)
    rows.push_back(json{{"h", num(r.h)},
                        {"q_norm", num(r.q_norm)},
                        {"p_power_sum", num(r.p_power_sum)},
                        {"K_required", num(r.k_required)},
                        {"localized_mass", num(r.localized_mass)},
                        {"unbounded_witness", r.unbounded_witness}});
  return json{{"rows", rows}, {"verdict", s.verdict}, {"slope", num(s.slope)}, {"r_squared", num(s.r_squared)}};
}

inline std::string cq_csv(const CqSweep& s) {
  std::string out = "h,q_norm,p_power_sum,K_required,localized_mass\n";
  for (const auto& r : s.rows)
    out += format_number(r.h) + "," + format_number(r.q_norm) + "," + format_number(r.p_power_sum) + "," +
           format_number(r.k_required) + "," + format_number(r.localized_mass) + "\n";
  return out;
}

inline json to_json(const LocalizedMassReport& r) {
  json per = json::array();
  for (const auto& e : r.per_generator) per.push_back(json{{"label", e.label}, {"mass", num(e.mass)}});
  json out{{"cube", to_json(r.cube)}, {"per_generator", per}, {"total", num(r.total)}};
  if (r.finiteness_bound) {
    json eps = json::array();
    for (double e : r.bound_eps) eps.push_back(num(e));
    out["finiteness_bound"] = json{{"value", num(*r.finiteness_bound)}, {"N", r.bound_N}, {"eps", eps}};
  } else {
    out["finiteness_bound"] = nullptr;
  }
  return out;
}

inline json to_json(const DichotomyReport& r) {
  json bessel = json::array();
  for (const auto& b : r.bessel_rows) {
    json row{{"truncation", num(b.truncation)},
             {"points", b.points},
             {"bound_estimate", num(b.bound_estimate)},
             {"nu_plus_1", b.nu_plus_1}};
    row["witness"] = b.witness ? to_json(*b.witness) : json(nullptr);
    bessel.push_back(row);
  }
  json sub = json::array();
  for (const auto& s : r.subadditivity)
    sub.push_back(json{{"h", num(s.h)},
                       {"union_upper", s.union_upper},
                       {"parts_sum_upper", s.parts_sum_upper},
                       {"union_density", num(s.union_density)},
                       {"parts_density_sum", num(s.parts_density_sum)},
                       {"holds", s.holds}});
  json out{{"bessel_growth", bessel},
           {"bessel_verdict", r.bessel_verdict},
           {"bessel_variation", num(r.bessel_variation)},
           {"cq_verdict", r.cq_verdict}};
  out["cq_sweep"] = r.cq ? to_json(*r.cq) : json(nullptr);
  if (!r.cq_note.empty()) out["cq_note"] = r.cq_note;
  out["subadditivity"] = sub;
  out["subadditivity_holds"] = r.subadditivity_holds;
  out["horn"] = r.horn;
  out["consistent"] = r.consistent;
  return out;
}

inline json to_json(const Prop43Report& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back(json{{"test_q_norm", num(row.test_q_norm)},
                        {"bessel_ratio", num(row.bessel_ratio)},
                        {"K_required", num(row.k_required)}});
  return json{{"p", num(r.p)},
              {"q", num(r.q)},
              {"cutoff", r.cutoff},
              {"bessel_exponent", num(r.bessel_exponent)},
              {"cq_index", num(r.cq_index)},
              {"dual_sum_exponent", num(r.dual_sum_exponent)},
              {"max_bessel_ratio", num(r.max_bessel_ratio)},
              {"max_K_required", num(r.max_k_required)},
              {"dual_norms",
               json{{"inf_p", num(r.dual_inf_p)}, {"sup_p", num(r.dual_sup_p)}, {"inf_q", num(r.dual_inf_q)},
                    {"sup_q", num(r.dual_sup_q)}}},
              {"rows", rows}};
}

inline json to_json(const SandwichFit& f) {
  return json{{"p", num(f.p)},           {"lower", num(f.lower)},  {"upper", num(f.upper)},
              {"raw_lower", num(f.raw_lower)}, {"raw_upper", num(f.raw_upper)}, {"margin", num(f.margin)}};
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace lpt::io
