#pragma once

// Experiment runner: dispatches a JSON experiment spec to the analysis
// operations and assembles a deterministic report.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lptrans/error.hpp"
#include "lptrans/haar.hpp"
#include "lptrans/io.hpp"
#include "lptrans/pointset.hpp"
#include "lptrans/random_families.hpp"
#include "lptrans/translate_system.hpp"

namespace lpt::cli {

using io::json;
namespace fs = std::filesystem;

inline constexpr const char* kToolkitVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kInputError = 2, kPreconditionError = 3, kVerdictFailure = 4 };

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"density",        "separate",   "pair",       "bessel",
                                              "blowup-witness", "cq-sweep",   "localized-mass",
                                              "mass-decay",     "haar-check", "dichotomy"};
  return names;
}

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the spec's "seed"
};

struct StepOutput {
  json result;
  json verdicts = json::object();
  bool verdicts_hold = true;
  std::map<std::string, std::string> tables;  // file name -> CSV text
};

struct RunResult {
  json report;
  std::map<std::string, std::string> tables;
  int exit_code = kOk;
};

namespace detail {

inline double number_or(const json& spec, const char* key, double fallback) {
  return spec.contains(key) ? io::as_number(spec[key], key) : fallback;
}

inline std::vector<double> numbers(const json& spec, const char* key) {
  return io::as_numbers(io::field(spec, key, "spec"), key);
}

inline void verdict(StepOutput& out, const std::string& name, bool ok) {
  out.verdicts[name] = ok;
  out.verdicts_hold = out.verdicts_hold && ok;
}

inline std::uint64_t require_seed(const json& spec, const RunOptions& opt) {
  if (opt.seed) return *opt.seed;
  if (spec.contains("seed")) return spec["seed"].get<std::uint64_t>();
  throw InputError("this command uses randomness: a seed is required (spec \"seed\" or --seed)");
}

// The generator list named by the spec: a "system", or a single "f" + "points".
inline TranslateSystem system_or_generator(const json& spec, io::IngestContext& ctx) {
  if (spec.contains("system")) return io::parse_system(spec["system"], ctx);
  const double p = number_or(spec, "p", 2.0);
  std::vector<Generator> gens;
  gens.emplace_back(io::parse_function(io::field(spec, "f", "spec"), ctx, "f"),
                    io::parse_point_set(io::field(spec, "points", "spec"), ctx, "points"),
                    spec.contains("label") ? spec["label"].get<std::string>() : "g0");
  return TranslateSystem(std::move(gens), ExponentPair::from_p(p));
}

inline StepOutput run_density(const json& spec, io::IngestContext& ctx) {
  const PointSet s = io::parse_point_set(io::field(spec, "points", "spec"), ctx, "points");
  const auto hs = numbers(spec, "h_values");
  const DensityProfile prof = density_profile(s, hs);
  StepOutput out;
  out.result = io::to_json(prof);
  out.result["points"] = s.size();
  out.result["dimension"] = s.dim();
  bool ordered = true;
  for (const auto& r : prof.rows) ordered = ordered && r.nu_lower <= r.nu_upper;
  verdict(out, "nu_lower_le_upper", ordered);
  out.tables["density.csv"] = io::density_csv(prof);
  return out;
}

inline StepOutput run_separate(const json& spec, io::IngestContext& ctx) {
  const PointSet s = io::parse_point_set(io::field(spec, "points", "spec"), ctx, "points");
  const double delta = io::as_number(io::field(spec, "delta", "spec"), "delta");
  const SeparationReport rep = decompose_separated(s, delta);
  StepOutput out;
  out.result = io::to_json(rep);
  bool separated = true;
  std::size_t covered = 0;
  for (const auto& part : rep.parts) {
    covered += part.size();
    for (std::size_t a = 0; a < part.size(); ++a)
      for (std::size_t b = a + 1; b < part.size(); ++b)
        separated = separated && distance(s[part[a]], s[part[b]]) >= delta;
  }
  verdict(out, "parts_delta_separated", separated);
  verdict(out, "parts_partition_input", covered == s.size());
  return out;
}

inline StepOutput run_pair(const json& spec, io::IngestContext& ctx) {
  const PiecewiseFn h = io::parse_function(io::field(spec, "h", "spec"), ctx, "h");
  const PiecewiseFn f = io::parse_function(io::field(spec, "f", "spec"), ctx, "f");
  const ExponentPair e = ExponentPair::from_p(number_or(spec, "p", 2.0));
  const Complex v = pair(h, f);
  StepOutput out;
  out.result = json{{"pair", io::to_json(v)},
                    {"abs", io::num(std::abs(v))},
                    {"p", io::num(e.p)},
                    {"q", io::num(e.q)},
                    {"h_q_norm", io::num(lp_norm(h, e.q))},
                    {"f_p_norm", io::num(lp_norm(f, e.p))}};
  if (spec.contains("freq")) {
    const Point freq = io::as_point(spec["freq"], "freq");
    out.result["pair_modulated_f"] = io::to_json(pair_modulated(f, freq));
  }
  verdict(out, "holder", std::abs(v) <= lp_norm(h, e.q) * lp_norm(f, e.p) * (1.0 + 1e-12));
  return out;
}

inline StepOutput run_bessel(const json& spec, io::IngestContext& ctx) {
  const TranslateSystem sys = system_or_generator(spec, ctx);
  const json& tj = io::field(spec, "tests", "spec");
  std::vector<PiecewiseFn> tests;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < tj.size(); ++i) {
    tests.push_back(io::parse_function(tj[i], ctx, "tests[" + std::to_string(i) + "]"));
    ids.push_back(tj[i].is_object() && tj[i].contains("id") ? tj[i]["id"].get<std::string>()
                                                             : "test" + std::to_string(i));
  }
  const double pp = number_or(spec, "p_prime", sys.exponents().q);
  const BesselEstimate est = bessel_bound_estimate(sys, tests, pp, ids);
  StepOutput out;
  out.result = io::to_json(est);
  out.result["system_size"] = sys.size();
  bool nonneg = true;
  for (const auto& r : est.per_test) nonneg = nonneg && r.ratio >= 0.0;
  verdict(out, "ratios_nonnegative", nonneg);
  return out;
}

inline StepOutput run_blowup(const json& spec, io::IngestContext& ctx) {
  const PiecewiseFn f = io::parse_function(io::field(spec, "f", "spec"), ctx, "f");
  const PiecewiseFn fd = spec.contains("f_dual") ? io::parse_function(spec["f_dual"], ctx, "f_dual") : f;
  const PointSet s = io::parse_point_set(io::field(spec, "points", "spec"), ctx, "points");
  const double eps = io::as_number(io::field(spec, "epsilon", "spec"), "epsilon");
  const double pp = number_or(spec, "p_prime", 2.0);
  const BlowupWitness w = blowup_witness(f, fd, s, eps, pp);
  std::vector<Generator> gens;
  gens.emplace_back(f, s, "g0");
  const TranslateSystem sys(std::move(gens), ExponentPair::from_p(number_or(spec, "p", 2.0)));
  const double direct = bessel_sum(sys, translate(fd, w.beta), pp);
  StepOutput out;
  out.result = io::to_json(w);
  out.result["bessel_sum_at_witness"] = io::num(direct);
  verdict(out, "witness_sound", w.sum_lower_bound <= direct);
  return out;
}

inline StepOutput run_cq_sweep(const json& spec, io::IngestContext& ctx) {
  const TranslateSystem sys = system_or_generator(spec, ctx);
  const auto hs = numbers(spec, "h_values");
  CqSweepOptions opt;
  opt.r2_threshold = number_or(spec, "r2_threshold", 0.99);
  const CqSweep sweep = spec.contains("test")
                            ? cq_fixed_test_sweep(sys, io::parse_function(spec["test"], ctx, "test"), hs, opt)
                            : cq_indicator_sweep(sys, hs, opt);
  StepOutput out;
  out.result = io::to_json(sweep);
  if (!spec.contains("test")) {
    bool chain = true;
    const double p = sys.exponents().p;
    for (const auto& r : sweep.rows)
      chain = chain && r.p_power_sum <= std::pow(r.q_norm, p) * r.localized_mass * (1.0 + 1e-12);
    verdict(out, "holder_mass_chain", chain);
  }
  if (spec.contains("expect_verdict"))
    verdict(out, "expected_verdict", spec["expect_verdict"].get<std::string>() == sweep.verdict);
  out.tables["cq_sweep.csv"] = io::cq_csv(sweep);
  return out;
}

inline StepOutput run_localized_mass(const json& spec, io::IngestContext& ctx) {
  const TranslateSystem sys = system_or_generator(spec, ctx);
  const json& cj = io::field(spec, "cube", "spec");
  const Cube q(io::as_point(io::field(cj, "center", "cube"), "cube.center"),
               io::as_number(io::field(cj, "side", "cube"), "cube.side"));
  const double p = number_or(spec, "p", sys.exponents().p);
  const LocalizedMassReport rep = localized_mass(sys.generators(), q, p);
  StepOutput out;
  out.result = io::to_json(rep);
  if (rep.finiteness_bound) verdict(out, "mass_within_bound", rep.total <= *rep.finiteness_bound * (1.0 + 1e-12));
  return out;
}

inline StepOutput run_mass_decay(const json& spec, io::IngestContext& ctx) {
  const TranslateSystem sys = system_or_generator(spec, ctx);
  const Point x = io::as_point(io::field(spec, "x", "spec"), "x");
  const auto hs = numbers(spec, "h_values");
  const double p = number_or(spec, "p", sys.exponents().p);
  StepOutput out;
  json per = json::array();
  bool monotone = true;
  std::string csv = "generator,h,mass\n";
  for (const auto& g : sys.generators()) {
    const auto rows = mass_decay_sweep(g, x, hs, p);
    json jr = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      jr.push_back(json{{"h", io::num(rows[i].first)}, {"mass", io::num(rows[i].second)}});
      if (i > 0) monotone = monotone && rows[i].second <= rows[i - 1].second * (1.0 + 1e-12);
      csv += g.label + "," + io::format_number(rows[i].first) + "," + io::format_number(rows[i].second) + "\n";
    }
    per.push_back(json{{"label", g.label}, {"rows", jr}});
  }
  out.result = json{{"x", io::to_json(x)}, {"p", io::num(p)}, {"per_generator", per}};
  verdict(out, "monotone_in_h", monotone);
  out.tables["mass_decay.csv"] = csv;
  return out;
}

inline StepOutput run_haar_check(const json& spec, const RunOptions& opt) {
  const std::uint64_t seed = require_seed(spec, opt);
  const double p = io::as_number(io::field(spec, "p", "spec"), "p");
  const int cutoff = spec.value("cutoff", 8);
  const auto batch = static_cast<std::size_t>(spec.value("batch_size", 1000));
  const auto terms = static_cast<std::size_t>(spec.value("terms", 16));
  const int max_level = spec.value("max_level", 5);
  const auto n_tests = static_cast<std::size_t>(spec.value("tests", 50));
  const auto trials = static_cast<std::size_t>(spec.value("trials", 200));
  const double margin = number_or(spec, "margin", 0.10);
  const int bio_level = spec.value("biorthogonality_level", 6);
  StepOutput out;

  double bio_err = 0.0;
  const auto idx = haar_indices(bio_level + 1);
  for (const auto& i : idx)
    for (const auto& j : idx) {
      const Complex v = pair(dual_fn(i, p), haar_fn(j, p));
      bio_err = std::max(bio_err, std::abs(v - Complex(i == j ? 1.0 : 0.0)));
    }
  verdict(out, "biorthogonality", bio_err <= 1e-14);

  auto rows_of = [&](std::uint64_t s) {
    std::vector<SandwichRow> rows;
    for (const auto& e : random::haar_batch(s, batch, terms, max_level)) rows.push_back(coefficient_sandwich_check(e, p));
    return rows;
  };
  const auto fit_a = fit_sandwich_constants(rows_of(seed), p, margin);
  const auto fit_b = fit_sandwich_constants(rows_of(seed + 1), p, margin);
  const std::size_t violations = count_sandwich_violations(rows_of(seed + 2), fit_a);
  const double stab_lower = std::max(fit_a.lower, fit_b.lower) / std::min(fit_a.lower, fit_b.lower);
  const double stab_upper = std::max(fit_a.upper, fit_b.upper) / std::min(fit_a.upper, fit_b.upper);
  verdict(out, "sandwich_heldout_zero_violations", violations == 0);
  verdict(out, "sandwich_constants_stable_factor2", stab_lower <= 2.0 && stab_upper <= 2.0);

  const auto family = random::haar_batch(seed + 3, 20, std::min<std::size_t>(terms, 10), max_level);
  const UnconditionalEstimate unc = unconditional_constant_estimate(family, p, trials, seed + 4);

  const auto tests = random::step_functions(seed + 5, n_tests, 6);
  const Prop43Report at = prop43_check(p, cutoff, tests);
  const Prop43Report deeper = prop43_check(p, cutoff + 2, tests);
  const double bessel_change = std::abs(deeper.max_bessel_ratio / at.max_bessel_ratio - 1.0);
  const double k_change = std::abs(deeper.max_k_required / at.max_k_required - 1.0);
  verdict(out, "prop43_stable_20pct", bessel_change <= 0.2 && k_change <= 0.2);

  out.result = json{{"p", io::num(p)},
                    {"seed", seed},
                    {"biorthogonality_max_error", io::num(bio_err)},
                    {"sandwich_fit", io::to_json(fit_a)},
                    {"sandwich_fit_independent", io::to_json(fit_b)},
                    {"sandwich_heldout_violations", violations},
                    {"unconditional_estimate",
                     json{{"max_ratio", io::num(unc.max_ratio)},
                          {"patterns", unc.patterns_evaluated},
                          {"exhaustive", unc.exhaustive}}},
                    {"prop43", io::to_json(at)},
                    {"prop43_deeper", io::to_json(deeper)},
                    {"prop43_relative_change", json{{"bessel", io::num(bessel_change)}, {"K", io::num(k_change)}}}};
  out.tables["haar_check.csv"] = "p,cutoff,fitted_lower,fitted_upper,max_bessel_ratio,max_K_required\n" +
                                 io::format_number(p) + "," + std::to_string(cutoff) + "," +
                                 io::format_number(fit_a.lower) + "," + io::format_number(fit_a.upper) + "," +
                                 io::format_number(at.max_bessel_ratio) + "," + io::format_number(at.max_k_required) +
                                 "\n" + io::format_number(p) + "," + std::to_string(cutoff + 2) + "," +
                                 io::format_number(fit_b.lower) + "," + io::format_number(fit_b.upper) + "," +
                                 io::format_number(deeper.max_bessel_ratio) + "," +
                                 io::format_number(deeper.max_k_required) + "\n";
  return out;
}

inline DichotomyConfig parse_dichotomy_config(const json& j) {
  DichotomyConfig cfg;
  cfg.h_values = io::as_numbers(io::field(j, "h_values", "config"), "config.h_values");
  cfg.truncation_radii = io::as_numbers(io::field(j, "truncation_radii", "config"), "config.truncation_radii");
  if (j.contains("p_prime")) cfg.p_prime = io::as_number(j["p_prime"], "config.p_prime");
  if (j.contains("density_h_values")) cfg.density_h_values = io::as_numbers(j["density_h_values"], "config.density_h_values");
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    if (t.contains("variation")) cfg.variation_tolerance = io::as_number(t["variation"], "tolerances.variation");
    if (t.contains("r2")) cfg.r2_threshold = io::as_number(t["r2"], "tolerances.r2");
  }
  if (j.contains("accumulation")) {
    const json& a = j["accumulation"];
    if (a.contains("radius")) cfg.accumulation_radius = io::as_number(a["radius"], "accumulation.radius");
    if (a.contains("threshold")) cfg.accumulation_threshold = a["threshold"].get<std::size_t>();
  }
  return cfg;
}

inline StepOutput run_dichotomy(const json& spec, io::IngestContext& ctx) {
  const TranslateSystem sys = io::parse_system(io::field(spec, "system", "spec"), ctx);
  const DichotomyConfig cfg = parse_dichotomy_config(io::field(spec, "config", "spec"));
  const DichotomyReport rep = dichotomy_report(sys, cfg);
  StepOutput out;
  out.result = io::to_json(rep);
  verdict(out, "not_both_bounded", rep.consistent);
  verdict(out, "subadditivity", rep.subadditivity_holds);
  if (rep.cq) out.tables["dichotomy_cq_sweep.csv"] = io::cq_csv(*rep.cq);
  return out;
}

}  // namespace detail

/// Runs one command on its spec object.
inline StepOutput run_step(const std::string& command, const json& spec, io::IngestContext& ctx,
                           const RunOptions& opt) {
  if (command == "density") return detail::run_density(spec, ctx);
  if (command == "separate") return detail::run_separate(spec, ctx);
  if (command == "pair") return detail::run_pair(spec, ctx);
  if (command == "bessel") return detail::run_bessel(spec, ctx);
  if (command == "blowup-witness") return detail::run_blowup(spec, ctx);
  if (command == "cq-sweep") return detail::run_cq_sweep(spec, ctx);
  if (command == "localized-mass") return detail::run_localized_mass(spec, ctx);
  if (command == "mass-decay") return detail::run_mass_decay(spec, ctx);
  if (command == "haar-check") return detail::run_haar_check(spec, opt);
  if (command == "dichotomy") return detail::run_dichotomy(spec, ctx);
  throw InputError("unknown command '" + command + "'");
}

/// Runs `command` (or every entry of "steps" when command is "run") and
/// assembles the report. Exceptions map to exit codes: input 2,
/// precondition 3; a failed declared check gives 4.
inline RunResult run(const std::string& command, const json& spec, io::IngestContext ctx, const RunOptions& opt,
                     const std::string& spec_digest = "") {
  RunResult res;
  json steps = json::array();
  std::vector<std::pair<std::string, json>> todo;
  if (spec.contains("steps")) {
    for (const auto& s : spec["steps"]) {
      const std::string c = io::field(s, "command", "steps[]").get<std::string>();
      if (command != "run" && c != command)
        throw InputError("spec step command '" + c + "' does not match subcommand '" + command + "'");
      todo.emplace_back(c, s);
    }
  } else {
    std::string c = command;
    if (spec.contains("command")) {
      const auto declared = spec["command"].get<std::string>();
      if (command != "run" && declared != command)
        throw InputError("spec command '" + declared + "' does not match subcommand '" + command + "'");
      c = declared;
    }
    if (c == "run") throw InputError("spec for 'run' needs \"steps\" or a \"command\"");
    todo.emplace_back(c, spec);
  }
  RunOptions step_opt = opt;
  if (!step_opt.seed && spec.contains("seed")) step_opt.seed = spec["seed"].get<std::uint64_t>();
  bool all_hold = true;
  for (std::size_t i = 0; i < todo.size(); ++i) {
    StepOutput out = run_step(todo[i].first, todo[i].second, ctx, step_opt);
    all_hold = all_hold && out.verdicts_hold;
    steps.push_back(json{{"command", todo[i].first},
                         {"spec", todo[i].second},
                         {"result", std::move(out.result)},
                         {"verdicts", std::move(out.verdicts)},
                         {"verdicts_hold", out.verdicts_hold}});
    for (auto& [name, text] : out.tables) {
      const std::string key = todo.size() > 1 ? std::to_string(i) + "_" + name : name;
      res.tables[key] = std::move(text);
    }
  }
  json inputs = json::array();
  for (const auto& [path, digest] : ctx.digests) inputs.push_back(json{{"path", path}, {"fnv1a64", digest}});
  json prov{{"toolkit_version", kToolkitVersion}, {"spec_fnv1a64", spec_digest}, {"inputs", inputs}};
  if (opt.seed) prov["seed"] = *opt.seed;
  else if (spec.contains("seed")) prov["seed"] = spec["seed"];
  else prov["seed"] = nullptr;
  res.report = json{{"command", command}, {"steps", steps}, {"warnings", ctx.warnings}, {"provenance", prov}};
  res.exit_code = all_hold ? kOk : kVerdictFailure;
  return res;
}

/// Reads the spec file, runs it and writes report.json plus tables into
/// `out_dir` (empty: $LPTRANS_OUT_DIR, else ./lptrans-out). Returns the
/// process exit code; diagnostics go to `err`, verdict lines to `log`.
inline int execute(const std::string& command, const fs::path& spec_path, fs::path out_dir, const RunOptions& opt,
                   std::ostream& log, std::ostream& err) {
  if (out_dir.empty()) {
    const char* env = std::getenv("LPTRANS_OUT_DIR");
    out_dir = env && *env ? fs::path(env) : fs::path("lptrans-out");
  }
  try {
    const std::string text = io::read_file(spec_path);
    json spec;
    try {
      spec = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(spec_path.string() + ": " + e.what());
    }
    io::IngestContext ctx;
    ctx.base_dir = spec_path.parent_path();
    const RunResult res = run(command, spec, std::move(ctx), opt, io::fnv1a_hex(text));
    io::write_text(out_dir / "report.json", res.report.dump(2) + "\n");
    for (const auto& [name, table] : res.tables) io::write_text(out_dir / name, table);
    for (const auto& step : res.report["steps"])
      for (const auto& [name, ok] : step["verdicts"].items())
        log << step["command"].get<std::string>() << " " << name << ": " << (ok.get<bool>() ? "ok" : "FAILED") << "\n";
    log << "report: " << (out_dir / "report.json").string() << "\n";
    return res.exit_code;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return kPreconditionError;
  }
}

}  // namespace lpt::cli
