#pragma once

// Systems of translates  U_k {T_gamma f_k : gamma in Gamma_k}  in L^p(R^d):
// Bessel sums, blowup witnesses, required (C_q) constants and localized mass.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "lptrans/error.hpp"
#include "lptrans/fit.hpp"
#include "lptrans/geometry.hpp"
#include "lptrans/lpfunc.hpp"
#include "lptrans/pointset.hpp"

namespace lpt {

struct Generator {
  PiecewiseFn f;
  PointSet gamma;
  std::string label;

  Generator(PiecewiseFn fn, PointSet g, std::string lbl)
      : f(std::move(fn)), gamma(std::move(g)), label(std::move(lbl)) {
    require(!f.is_zero(), "generator function must be nonzero");
    require(gamma.empty() || gamma.dim() == f.dim(), "generator dimensions disagree");
  }
};

/// Finite disjoint union of translate families; elements are tagged by their
/// generator even where the point sets overlap.
class TranslateSystem {
 public:
  TranslateSystem(std::vector<Generator> generators, ExponentPair exps)
      : generators_(std::move(generators)), exps_(exps) {
    require(!generators_.empty(), "translate system needs at least one generator");
    for (const auto& g : generators_)
      require(g.f.dim() == generators_.front().f.dim(), "generators differ in dimension");
  }

  const std::vector<Generator>& generators() const { return generators_; }
  const ExponentPair& exponents() const { return exps_; }
  std::size_t dim() const { return generators_.front().f.dim(); }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& g : generators_) n += g.gamma.size();
    return n;
  }

  /// Same generators with every point set re-generated at `truncation`.
  TranslateSystem regenerated(double truncation) const {
    std::vector<Generator> gens;
    for (const auto& g : generators_) gens.emplace_back(g.f, regenerate(g.gamma, truncation), g.label);
    return TranslateSystem(std::move(gens), exps_);
  }

  /// The whole configuration moved by `shift` (point sets and generators).
  TranslateSystem translated(const Point& shift) const {
    std::vector<Generator> gens;
    for (const auto& g : generators_) gens.emplace_back(g.f, g.gamma.translated(shift), g.label);
    return TranslateSystem(std::move(gens), exps_);
  }

 private:
  std::vector<Generator> generators_;
  ExponentPair exps_;
};

namespace detail {

inline bool boxes_meet(const Box& a, const Box& b) {
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (!(std::max(a.lower()[i], b.lower()[i]) < std::min(a.upper()[i], b.upper()[i]))) return false;
  return true;
}

// Visits pair(h, T_gamma f_k) for every (k, gamma) whose translated support
// can meet supp h, in (k, lexicographic gamma) order.
template <class Visit>
void for_each_pairing(const TranslateSystem& sys, const PiecewiseFn& h, Visit&& visit) {
  require(h.dim() == sys.dim(), "test function dimension mismatch");
  const auto hb = h.bounding_box();
  if (!hb) return;
  for (std::size_t k = 0; k < sys.generators().size(); ++k) {
    const Generator& g = sys.generators()[k];
    const Box fb = *g.f.bounding_box();
    std::vector<std::size_t> order(g.gamma.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g.gamma[a] < g.gamma[b]; });
    for (std::size_t idx : order) {
      const Point& gamma = g.gamma[idx];
      if (!boxes_meet(*hb, fb.translated(gamma))) continue;
      visit(k, gamma, pair(h, translate(g.f, gamma)));
    }
  }
}

inline double pow_sum(const TranslateSystem& sys, const PiecewiseFn& h, double exponent) {
  double s = 0.0;
  for_each_pairing(sys, h, [&](std::size_t, const Point&, Complex v) { s += std::pow(std::abs(v), exponent); });
  return s;
}

}  // namespace detail

/// sum_k sum_{gamma in Gamma_k} |<h, T_gamma f_k>|^{p'}.
inline double bessel_sum(const TranslateSystem& sys, const PiecewiseFn& h, double p_prime) {
  require(!h.is_zero(), "bessel_sum needs a nonzero test function");
  require(p_prime > 1.0 && std::isfinite(p_prime), "p' must lie in (1, inf)");
  return detail::pow_sum(sys, h, p_prime);
}

struct BesselTestRow {
  std::string id;
  double bessel_sum = 0.0;
  double q_norm = 0.0;
  double ratio = 0.0;  // bessel_sum / q_norm^{p'}
};

/// Per-test ratios. Their max is a certified lower bound on any Bessel
/// constant B of the truncated system, never an upper bound.
struct BesselEstimate {
  double p_prime = 2.0;
  std::vector<BesselTestRow> per_test;
  double bound_estimate = 0.0;
};

inline BesselEstimate bessel_bound_estimate(const TranslateSystem& sys, const std::vector<PiecewiseFn>& tests,
                                            double p_prime, const std::vector<std::string>& ids = {}) {
  require(!tests.empty(), "bessel_bound_estimate needs at least one test");
  BesselEstimate est;
  est.p_prime = p_prime;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    BesselTestRow row;
    row.id = i < ids.size() ? ids[i] : "test" + std::to_string(i);
    row.bessel_sum = bessel_sum(sys, tests[i], p_prime);
    row.q_norm = lp_norm(tests[i], sys.exponents().q);
    row.ratio = row.bessel_sum / std::pow(row.q_norm, p_prime);
    est.bound_estimate = std::max(est.bound_estimate, row.ratio);
    est.per_test.push_back(std::move(row));
  }
  return est;
}

// ---------------------------------------------------------------------------
// Blowup witness

struct BlowupWitness {
  Point beta;
  double h = 0.0;              // side of the cube Q_h on which |<T_x f, f~>| > eps
  double grid_inf = 0.0;       // min of |<T_x f, f~>| over the sampling grid of Q_h
  std::size_t points_in_cube = 0;
  std::size_t count = 0;       // #{gamma : |<T_gamma f, T_beta f~>| > eps}, verified
  double sum_lower_bound = 0.0;  // count * eps^{p'}
};

namespace detail {

// Sample points of the closed cube [-h/2, h/2]^d with spacing <= step.
inline std::vector<std::vector<double>> cube_grid_axes(std::size_t d, double h, double step) {
  std::vector<double> axis;
  const double lo = -h / 2, hi = h / 2;
  for (double x = lo; x < hi; x += step) axis.push_back(x);
  axis.push_back(hi);
  return std::vector<std::vector<double>>(d, axis);
}

inline double grid_inf_abs_pairing(const PiecewiseFn& f, const PiecewiseFn& f_dual, double h, double step) {
  const std::size_t d = f.dim();
  const auto axes = cube_grid_axes(d, h, step);
  std::vector<std::size_t> idx(d, 0);
  double inf = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = axes[i][idx[i]];
    inf = std::min(inf, std::abs(pair(translate(f, Point(std::move(x))), f_dual)));
    std::size_t k = 0;
    for (; k < d; ++k) {
      if (++idx[k] < axes[k].size()) break;
      idx[k] = 0;
    }
    if (k == d) break;
  }
  return inf;
}

}  // namespace detail

/// Finds a cube Q_h on which |<T_x f, f~>| stays above eps (sampled at a quarter
/// of the smallest piece side), anchors Q_h(beta) on the densest window of
/// gamma, and counts the translates whose pairing with T_beta f~ exceeds eps.
inline BlowupWitness blowup_witness(const PiecewiseFn& f, const PiecewiseFn& f_dual, const PointSet& gamma,
                                    double epsilon, double p_prime) {
  require(f.dim() == f_dual.dim(), "dimension mismatch in blowup_witness");
  require(gamma.empty() || gamma.dim() == f.dim(), "dimension mismatch in blowup_witness");
  require(p_prime > 1.0 && std::isfinite(p_prime), "p' must lie in (1, inf)");
  const double base = std::abs(pair(f, f_dual));
  require(epsilon > 0.0 && epsilon < base, "blowup_witness needs 0 < eps < |<f, f~>|");
  require(!gamma.empty(), "blowup_witness needs a nonempty point set");

  const double step = 0.25 * std::min(f.min_piece_side(), f_dual.min_piece_side());
  const Box fb = *f.bounding_box(), db = *f_dual.bounding_box();
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.dim(); ++i) h = std::min(h, fb.side(i) + db.side(i));

  BlowupWitness w{Point::zero(f.dim())};
  const double floor_h = h * 1e-9;
  for (; h > floor_h; h *= 0.99) {
    const double inf = detail::grid_inf_abs_pairing(f, f_dual, h, std::min(step, h / 4));
    if (inf > epsilon) {
      w.grid_inf = inf;
      break;
    }
  }
  require(h > floor_h, "no cube found on which the pairing exceeds eps");
  w.h = h;

  const NuPlus nu = nu_plus(gamma, h);
  std::vector<double> c(f.dim());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (nu.window->lower()[i] + nu.window->upper()[i]);
  w.beta = Point(std::move(c));
  w.points_in_cube = count_in_cube(gamma, Cube(w.beta, h));

  const PiecewiseFn shifted_dual = translate(f_dual, w.beta);
  for (const Point& g : gamma.points())
    if (std::abs(pair(translate(f, g), shifted_dual)) > epsilon) ++w.count;
  w.sum_lower_bound = static_cast<double>(w.count) * std::pow(epsilon, p_prime);
  return w;
}

// ---------------------------------------------------------------------------
// (C_q) constants

/// Smallest K compatible with (1/K)||test||_q <= (sum |<test, T_gamma f_k>|^p)^{1/p};
/// +inf when the test annihilates the truncated system.
inline double cq_required_constant(const TranslateSystem& sys, const PiecewiseFn& test) {
  require(!test.is_zero(), "cq_required_constant needs a nonzero test");
  const auto& e = sys.exponents();
  const double s = detail::pow_sum(sys, test, e.p);
  if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
  return lp_norm(test, e.q) / std::pow(s, 1.0 / e.p);
}

struct LocalizedMassEntry {
  std::string label;
  double mass = 0.0;  // sum_gamma ||chi_Q T_gamma f||_p^p
};

struct LocalizedMassReport {
  Cube cube;
  std::vector<LocalizedMassEntry> per_generator;
  double total = 0.0;
  // Finiteness context n (2N)^d ||f||_p^p summed over generators, with each
  // generator's truncation taken as one delta-separated part; absent when a
  // generator has fewer than two points.
  std::optional<double> finiteness_bound;
  std::vector<std::size_t> bound_N;
  std::vector<double> bound_eps;
};

namespace detail {

inline double generator_mass(const Generator& gen, const Box& region, double p) {
  const Box fb = *gen.f.bounding_box();
  std::vector<std::size_t> order(gen.gamma.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return gen.gamma[a] < gen.gamma[b]; });
  double mass = 0.0;
  for (std::size_t idx : order) {
    const Point& g = gen.gamma[idx];
    if (!boxes_meet(region, fb.translated(g))) continue;
    mass += lp_norm_pow(restrict(translate(gen.f, g), region), p);
  }
  return mass;
}

}  // namespace detail

inline LocalizedMassReport localized_mass(std::span<const Generator> gens, const Cube& q, double p) {
  require(p >= 1.0 && std::isfinite(p), "localized_mass needs 1 <= p < inf");
  LocalizedMassReport rep{q, {}, 0.0, std::nullopt, {}, {}};
  const Box region = q.box();
  double bound = 0.0;
  bool have_bound = true;
  for (const auto& gen : gens) {
    require(gen.f.dim() == q.dim(), "dimension mismatch in localized_mass");
    const double m = detail::generator_mass(gen, region, p);
    rep.per_generator.push_back({gen.label, m});
    rep.total += m;
    if (gen.gamma.size() < 2) {
      have_bound = false;
      continue;
    }
    // Q_h(x) sits inside Q_{2 N eps} = [-N eps, N eps)^d with eps < delta / sqrt(d).
    const double d = static_cast<double>(q.dim());
    const double eps = min_separation(gen.gamma) / (2.0 * std::sqrt(d));
    double reach = 0.0;
    for (std::size_t i = 0; i < q.dim(); ++i)
      reach = std::max({reach, std::abs(region.lower()[i]), std::abs(region.upper()[i])});
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(reach / eps)));
    rep.bound_N.push_back(n);
    rep.bound_eps.push_back(eps);
    bound += std::pow(2.0 * static_cast<double>(n), d) * lp_norm_pow(gen.f, p);
  }
  if (have_bound) rep.finiteness_bound = bound;
  return rep;
}

inline LocalizedMassReport localized_mass(const Generator& gen, const Cube& q, double p) {
  return localized_mass(std::span<const Generator>(&gen, 1), q, p);
}

/// Masses on Q_h(x) for each h.
inline std::vector<std::pair<double, double>> mass_decay_sweep(const Generator& gen, const Point& x,
                                                               std::span<const double> h_values, double p) {
  for (std::size_t i = 0; i < h_values.size(); ++i) {
    require(h_values[i] > 0.0, "h values must be positive");
    require(i == 0 || h_values[i] < h_values[i - 1], "h values must be decreasing");
  }
  std::vector<std::pair<double, double>> out;
  for (double h : h_values) out.emplace_back(h, localized_mass(gen, Cube(x, h), p).total);
  return out;
}

struct CqRow {
  double h = 0.0;
  double q_norm = 0.0;
  double p_power_sum = 0.0;
  double k_required = 0.0;  // +inf marks an unbounded witness
  double localized_mass = 0.0;
  bool unbounded_witness = false;
};

struct CqSweep {
  std::vector<CqRow> rows;
  std::string verdict;  // "divergent" | "bounded"
  double slope = 0.0;   // log K_required against log(1/h), smallest half of h
  double r_squared = 0.0;
};

struct CqSweepOptions {
  double r2_threshold = 0.99;
  bool check_reach = true;
};

namespace detail {

// Points gamma whose translated support T_gamma f can meet `region`.
inline Box reach_region(const Box& region, const Box& fb) {
  std::vector<double> lo(region.dim()), hi(region.dim());
  for (std::size_t i = 0; i < region.dim(); ++i) {
    lo[i] = region.lower()[i] - fb.upper()[i];
    hi[i] = region.upper()[i] - fb.lower()[i];
  }
  return Box(Point(std::move(lo)), Point(std::move(hi)));
}

}  // namespace detail

/// Whether every generator truncation contains all the points of its
/// generator that can reach `region`.
inline bool reach_ok(const TranslateSystem& sys, const Box& region) {
  for (const auto& g : sys.generators())
    if (!covers(g.gamma, detail::reach_region(region, *g.f.bounding_box()))) return false;
  return true;
}

inline Box centered_cube_box(std::size_t d, double h) {
  return Box(Point(std::vector<double>(d, -h)), Point(std::vector<double>(d, h)));
}

inline void fit_cq_verdict(CqSweep& sweep, double r2_threshold) {
  const std::size_t n = sweep.rows.size();
  const std::size_t half = (n + 1) / 2;
  sweep.verdict = "bounded";
  for (const auto& r : sweep.rows)
    if (r.unbounded_witness) {
      sweep.verdict = "divergent";
      sweep.slope = std::numeric_limits<double>::infinity();
      return;
    }
  if (half < 2) return;
  std::vector<double> x, y;
  for (std::size_t i = n - half; i < n; ++i) {
    x.push_back(std::log(1.0 / sweep.rows[i].h));
    y.push_back(std::log(sweep.rows[i].k_required));
  }
  const LineFit fit = fit_line(x, y);
  sweep.slope = fit.slope;
  sweep.r_squared = fit.r_squared;
  if (fit.slope > 0.0 && fit.r_squared > r2_threshold) sweep.verdict = "divergent";
}

/// K_required at the tests chi_{Q_{2h}} = chi_{[-h,h)^d} for decreasing h, with
/// the localized mass on the same cube.
inline CqSweep cq_indicator_sweep(const TranslateSystem& sys, std::span<const double> h_values,
                                  const CqSweepOptions& opt = {}) {
  require(!h_values.empty(), "h_values must be nonempty");
  for (std::size_t i = 0; i < h_values.size(); ++i) {
    require(h_values[i] > 0.0, "h values must be positive");
    require(i == 0 || h_values[i] < h_values[i - 1], "h values must be decreasing");
  }
  const std::size_t d = sys.dim();
  const auto& e = sys.exponents();
  CqSweep sweep;
  for (double h : h_values) {
    const Box region = centered_cube_box(d, h);
    if (opt.check_reach && !reach_ok(sys, region))
      throw PreconditionError("truncation too small: some generator's truncation misses points reaching Q_2h at h = " +
                              std::to_string(h));
    const PiecewiseFn test = PiecewiseFn::indicator(region);
    CqRow row;
    row.h = h;
    row.q_norm = lp_norm(test, e.q);
    row.p_power_sum = detail::pow_sum(sys, test, e.p);
    row.unbounded_witness = !(row.p_power_sum > 0.0);
    row.k_required = row.unbounded_witness ? std::numeric_limits<double>::infinity()
                                           : row.q_norm / std::pow(row.p_power_sum, 1.0 / e.p);
    row.localized_mass = localized_mass(sys.generators(), Cube(Point::zero(d), 2.0 * h), e.p).total;
    sweep.rows.push_back(row);
  }
  fit_cq_verdict(sweep, opt.r2_threshold);
  return sweep;
}

/// Same table with a fixed test function for every row (no h dependence in the
/// test; the localized-mass column still uses Q_{2h}).
inline CqSweep cq_fixed_test_sweep(const TranslateSystem& sys, const PiecewiseFn& test,
                                   std::span<const double> h_values, const CqSweepOptions& opt = {}) {
  const auto& e = sys.exponents();
  CqSweep sweep;
  for (double h : h_values) {
    CqRow row;
    row.h = h;
    row.q_norm = lp_norm(test, e.q);
    row.p_power_sum = detail::pow_sum(sys, test, e.p);
    row.unbounded_witness = !(row.p_power_sum > 0.0);
    row.k_required = row.unbounded_witness ? std::numeric_limits<double>::infinity()
                                           : row.q_norm / std::pow(row.p_power_sum, 1.0 / e.p);
    row.localized_mass = localized_mass(sys.generators(), Cube(Point::zero(sys.dim()), 2.0 * h), e.p).total;
    sweep.rows.push_back(row);
  }
  fit_cq_verdict(sweep, opt.r2_threshold);
  return sweep;
}

// ---------------------------------------------------------------------------
// Dichotomy study

struct DichotomyConfig {
  std::vector<double> h_values;          // decreasing, for the indicator sweep
  double p_prime = 2.0;
  std::vector<double> truncation_radii;  // increasing truncation parameters
  std::vector<double> density_h_values{1.0, 2.0, 4.0};
  double variation_tolerance = 0.10;     // Bessel ratios "bounded" below this relative spread
  std::size_t top_truncations = 3;
  double r2_threshold = 0.99;
  double accumulation_radius = 0.05;
  std::size_t accumulation_threshold = 10;
};

struct BesselGrowthRow {
  double truncation = 0.0;
  std::size_t points = 0;
  double bound_estimate = 0.0;
  std::size_t nu_plus_1 = 0;  // nu^+(1) of the disjoint union (lower bound)
  std::optional<BlowupWitness> witness;
};

struct SubadditivityRow {
  double h = 0.0;
  std::size_t union_upper = 0;
  std::size_t parts_sum_upper = 0;
  double union_density = 0.0;  // nu/h^d for the union
  double parts_density_sum = 0.0;
  bool holds = false;
};

struct DichotomyReport {
  std::vector<BesselGrowthRow> bessel_rows;
  std::string bessel_verdict;  // "bounded" | "divergent"
  double bessel_variation = 0.0;
  std::optional<CqSweep> cq;
  std::string cq_verdict;  // "bounded" | "divergent" | "inconclusive"
  std::string cq_note;
  std::vector<SubadditivityRow> subadditivity;
  bool subadditivity_holds = true;
  std::string horn;
  bool consistent = true;  // not (Bessel bounded and K_required bounded)
};

namespace detail {

inline std::vector<Point> disjoint_union_points(const TranslateSystem& sys) {
  std::vector<Point> pts;
  for (const auto& g : sys.generators()) pts.insert(pts.end(), g.gamma.points().begin(), g.gamma.points().end());
  return pts;
}

inline std::vector<std::vector<Point>> union_part_points(const TranslateSystem& sys) {
  std::vector<std::vector<Point>> out;
  for (const auto& g : sys.generators())
    for (const auto& part : union_parts(g.gamma)) out.emplace_back(part.points().begin(), part.points().end());
  return out;
}

// Tests chi_{Q_s(0)} for a few scales s.
inline std::vector<PiecewiseFn> standard_tests(std::size_t d) {
  std::vector<PiecewiseFn> tests;
  for (double s : {0.5, 1.0, 2.0}) tests.push_back(PiecewiseFn::indicator(Cube(Point::zero(d), s)));
  return tests;
}

}  // namespace detail

/// Growth study of Bessel ratios across truncations plus the indicator sweep;
/// reports which horn of the density dichotomy the system falls on.
inline DichotomyReport dichotomy_report(const TranslateSystem& sys, const DichotomyConfig& cfg) {
  require(!cfg.truncation_radii.empty(), "dichotomy needs truncation radii");
  require(!cfg.h_values.empty(), "dichotomy needs sweep h values");
  for (std::size_t i = 1; i < cfg.truncation_radii.size(); ++i)
    require(cfg.truncation_radii[i] > cfg.truncation_radii[i - 1], "truncation radii must increase");
  DichotomyReport rep;
  const std::size_t d = sys.dim();

  for (double r : cfg.truncation_radii) {
    const TranslateSystem tr = sys.regenerated(r);
    BesselGrowthRow row;
    row.truncation = r;
    row.points = tr.size();
    std::vector<PiecewiseFn> tests = detail::standard_tests(d);
    const auto pts = detail::disjoint_union_points(tr);
    row.nu_plus_1 = nu_plus(pts, 1.0).lower;
    for (const auto& g : tr.generators()) {
      if (g.gamma.size() < 2) continue;
      if (detect_accumulation(g.gamma, cfg.accumulation_radius, cfg.accumulation_threshold).empty()) continue;
      const double base = std::abs(pair(g.f, g.f));
      BlowupWitness w = blowup_witness(g.f, g.f, g.gamma, 0.5 * base, cfg.p_prime);
      tests.push_back(translate(g.f, w.beta));
      if (!row.witness || w.sum_lower_bound > row.witness->sum_lower_bound) row.witness = w;
    }
    row.bound_estimate = bessel_bound_estimate(tr, tests, cfg.p_prime).bound_estimate;
    rep.bessel_rows.push_back(std::move(row));
  }
  const std::size_t top = std::min(cfg.top_truncations, rep.bessel_rows.size());
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = rep.bessel_rows.size() - top; i < rep.bessel_rows.size(); ++i) {
    lo = std::min(lo, rep.bessel_rows[i].bound_estimate);
    hi = std::max(hi, rep.bessel_rows[i].bound_estimate);
  }
  rep.bessel_variation = lo > 0.0 ? (hi - lo) / lo : std::numeric_limits<double>::infinity();
  rep.bessel_verdict = rep.bessel_variation < cfg.variation_tolerance ? "bounded" : "divergent";

  const TranslateSystem largest = sys.regenerated(cfg.truncation_radii.back());
  try {
    rep.cq = cq_indicator_sweep(largest, cfg.h_values, CqSweepOptions{cfg.r2_threshold, true});
    rep.cq_verdict = rep.cq->verdict;
  } catch (const PreconditionError& e) {
    rep.cq_verdict = "inconclusive";
    rep.cq_note = e.what();
  }

  const auto all = detail::disjoint_union_points(largest);
  const auto parts = detail::union_part_points(largest);
  for (double h : cfg.density_h_values) {
    SubadditivityRow s;
    s.h = h;
    s.union_upper = nu_plus(all, h).upper;
    for (const auto& part : parts) s.parts_sum_upper += nu_plus(part, h).upper;
    const double vol = std::pow(h, static_cast<double>(d));
    s.union_density = static_cast<double>(s.union_upper) / vol;
    s.parts_density_sum = static_cast<double>(s.parts_sum_upper) / vol;
    s.holds = s.union_upper <= s.parts_sum_upper;
    rep.subadditivity_holds = rep.subadditivity_holds && s.holds;
    rep.subadditivity.push_back(s);
  }

  const bool bessel_bounded = rep.bessel_verdict == "bounded";
  const bool cq_bounded = rep.cq_verdict == "bounded";
  rep.consistent = !(bessel_bounded && cq_bounded);
  if (!bessel_bounded && rep.cq_verdict == "divergent") rep.horn = "both divergent";
  else if (!bessel_bounded) rep.horn = "Bessel divergent";
  else if (rep.cq_verdict == "divergent") rep.horn = "K_required divergent";
  else if (rep.cq_verdict == "inconclusive") rep.horn = "Bessel bounded; K_required inconclusive";
  else rep.horn = "none (both bounded)";
  return rep;
}

}  // namespace lpt
