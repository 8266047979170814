#pragma once

// L^p-normalized Haar system on [0,1) and unconditional-basis checks.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lptrans/error.hpp"
#include "lptrans/lpfunc.hpp"

namespace lpt {

/// Haar index (level j, offset k in [0, 2^j)), or the constant function chi_[0,1).
struct HaarIndex {
  int level = -1;
  std::int64_t offset = 0;

  static HaarIndex constant() { return {-1, 0}; }
  bool is_constant() const { return level < 0; }

  friend auto operator<=>(const HaarIndex&, const HaarIndex&) = default;
};

inline void validate(const HaarIndex& idx) {
  if (idx.is_constant()) {
    require(idx.level == -1 && idx.offset == 0, "invalid constant Haar index");
    return;
  }
  require(idx.level <= 30, "Haar level too deep");
  require(idx.offset >= 0 && idx.offset < (std::int64_t{1} << idx.level), "Haar offset out of range");
}

using HaarExpansion = std::map<HaarIndex, Complex>;
using SignPattern = std::map<HaarIndex, int>;

/// All indices of levels < cutoff, constant first.
inline std::vector<HaarIndex> haar_indices(int cutoff) {
  std::vector<HaarIndex> out{HaarIndex::constant()};
  for (int j = 0; j < cutoff; ++j)
    for (std::int64_t k = 0; k < (std::int64_t{1} << j); ++k) out.push_back({j, k});
  return out;
}

namespace detail {

inline PiecewiseFn two_step(const HaarIndex& idx, double amplitude) {
  const double width = std::ldexp(1.0, -idx.level);
  const double a = static_cast<double>(idx.offset) * width;
  const double m = a + width / 2;
  const double b = a + width;
  return PiecewiseFn::trusted(1, {Piece{Box(Point{a}, Point{m}), amplitude},
                                  Piece{Box(Point{m}, Point{b}), -amplitude}});
}

}  // namespace detail

/// Haar function with unit L^p norm: +-2^{j/p} on the two dyadic halves.
inline PiecewiseFn haar_fn(const HaarIndex& idx, double p) {
  validate(idx);
  require(p > 1.0 && std::isfinite(p), "p must lie in (1, inf)");
  if (idx.is_constant()) return PiecewiseFn::indicator(Box(Point{0.0}, Point{1.0}));
  return detail::two_step(idx, std::pow(2.0, idx.level / p));
}

/// Biorthogonal functional: +-2^{j/q}, so that <dual_fn(i), haar_fn(j)> = delta_ij.
inline PiecewiseFn dual_fn(const HaarIndex& idx, double p) {
  validate(idx);
  const double q = conjugate_exponent(p);
  if (idx.is_constant()) return PiecewiseFn::indicator(Box(Point{0.0}, Point{1.0}));
  return detail::two_step(idx, std::pow(2.0, idx.level / q));
}

/// sum a_i haar_fn(i, p) as a piecewise-constant function on the dyadic grid
/// one level below the deepest index.
inline PiecewiseFn haar_synthesize(const HaarExpansion& coeffs, double p) {
  require(p > 1.0 && std::isfinite(p), "p must lie in (1, inf)");
  int depth = 0;
  for (const auto& [idx, a] : coeffs) {
    validate(idx);
    depth = std::max(depth, idx.level + 1);
  }
  require(depth <= 22, "Haar expansion too deep to synthesize");
  const std::int64_t cells = std::int64_t{1} << depth;
  std::vector<Complex> v(static_cast<std::size_t>(cells), 0.0);
  for (const auto& [idx, a] : coeffs) {
    if (idx.is_constant()) {
      for (auto& c : v) c += a;
      continue;
    }
    const std::int64_t span = cells >> idx.level;  // cells under the support
    const std::int64_t start = idx.offset * span;
    const Complex amp = a * std::pow(2.0, idx.level / p);
    for (std::int64_t c = 0; c < span / 2; ++c) v[static_cast<std::size_t>(start + c)] += amp;
    for (std::int64_t c = span / 2; c < span; ++c) v[static_cast<std::size_t>(start + c)] -= amp;
  }
  std::vector<Piece> pieces;
  const double w = std::ldexp(1.0, -depth);
  for (std::int64_t c = 0; c < cells; ++c)
    pieces.push_back({Box(Point{static_cast<double>(c) * w}, Point{static_cast<double>(c + 1) * w}),
                      v[static_cast<std::size_t>(c)]});
  return PiecewiseFn::trusted(1, std::move(pieces));
}

/// || sum a_k f_k ||_p, computed from the exact piecewise-constant sum.
inline double expansion_norm(const HaarExpansion& coeffs, double p) {
  return lp_norm(haar_synthesize(coeffs, p), p);
}

/// Coefficients <f, dual_fn(i)> for every index of level < cutoff. Exact
/// reconstruction for step functions on the dyadic grid of side 2^-cutoff.
inline HaarExpansion haar_coefficients(const PiecewiseFn& f, int cutoff, double p) {
  require(f.dim() == 1, "Haar coefficients need a function on R^1");
  HaarExpansion out;
  for (const auto& idx : haar_indices(cutoff)) {
    const Complex c = pair(f, dual_fn(idx, p));
    if (c != Complex(0.0)) out[idx] = c;
  }
  return out;
}

inline HaarExpansion apply_signs(const HaarExpansion& coeffs, const SignPattern& theta) {
  HaarExpansion out;
  for (const auto& [idx, a] : coeffs) {
    const auto it = theta.find(idx);
    require(it != theta.end(), "sign pattern does not cover the expansion support");
    require(it->second == 1 || it->second == -1, "signs must be +-1");
    out[idx] = a * static_cast<double>(it->second);
  }
  return out;
}

inline double lq_sequence_norm(const HaarExpansion& coeffs, double r) {
  double s = 0.0;
  for (const auto& [idx, a] : coeffs) s += std::pow(std::abs(a), r);
  return std::pow(s, 1.0 / r);
}

struct UnconditionalEstimate {
  double max_ratio = 1.0;      // max ||S_theta x||_p / ||x||_p over family and patterns
  std::size_t patterns_evaluated = 0;
  bool exhaustive = true;      // every family member was enumerated exhaustively
};

/// Sign patterns are enumerated exhaustively for supports of at most
/// `exhaustive_limit` terms (theta and -theta are identified), otherwise
/// `trials` patterns are drawn uniformly with the given seed.
inline UnconditionalEstimate unconditional_constant_estimate(const std::vector<HaarExpansion>& family, double p,
                                                             std::size_t trials, std::uint64_t seed = 0,
                                                             std::size_t exhaustive_limit = 12) {
  require(trials >= 1, "trials must be >= 1");
  UnconditionalEstimate est;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (const auto& x : family) {
    if (x.empty()) continue;
    const double base = expansion_norm(x, p);
    std::vector<HaarIndex> keys;
    for (const auto& [idx, a] : x) keys.push_back(idx);
    auto eval = [&](auto&& sign_of) {
      SignPattern theta;
      for (std::size_t i = 0; i < keys.size(); ++i) theta[keys[i]] = sign_of(i);
      est.max_ratio = std::max(est.max_ratio, expansion_norm(apply_signs(x, theta), p) / base);
      ++est.patterns_evaluated;
    };
    if (keys.size() <= exhaustive_limit) {
      const std::uint64_t n = std::uint64_t{1} << (keys.size() - 1);
      for (std::uint64_t mask = 0; mask < n; ++mask)
        eval([&](std::size_t i) { return i == 0 ? 1 : ((mask >> (i - 1)) & 1 ? -1 : 1); });
    } else {
      est.exhaustive = false;
      for (std::size_t t = 0; t < trials; ++t) {
        std::vector<int> s(keys.size());
        for (auto& v : s) v = coin(rng) ? 1 : -1;
        eval([&](std::size_t i) { return s[i]; });
      }
    }
  }
  return est;
}

// ---------------------------------------------------------------------------
// Coefficient sandwich
//
//   1 < p <= 2:  (C A_p)^{-1} l2(a) <= ||sum a_k f_k||_p <= C lp(a)
//   2 <= p < oo: C^{-1} lp(a) <= ||sum a_k f_k||_p <= C B_p l2(a)

struct SandwichRow {
  double lhs = 0.0;
  double mid = 0.0;
  double rhs = 0.0;
};

inline SandwichRow coefficient_sandwich_check(const HaarExpansion& coeffs, double p) {
  require(p > 1.0 && std::isfinite(p), "p must lie in (1, inf)");
  SandwichRow r;
  r.mid = expansion_norm(coeffs, p);
  const double l2 = lq_sequence_norm(coeffs, 2.0);
  const double lp = lq_sequence_norm(coeffs, p);
  if (p <= 2.0) {
    r.lhs = l2;
    r.rhs = lp;
  } else {
    r.lhs = lp;
    r.rhs = l2;
  }
  return r;
}

/// Empirical constants: lhs / lower <= mid <= upper * rhs. `lower` plays the
/// role of C A_p (p <= 2) or C (p >= 2); `upper` that of C or C B_p.
struct SandwichFit {
  double p = 2.0;
  double lower = 1.0;
  double upper = 1.0;
  double raw_lower = 1.0;  // batch maxima before the margin
  double raw_upper = 1.0;
  double margin = 0.0;
};

inline SandwichFit fit_sandwich_constants(const std::vector<SandwichRow>& batch, double p, double margin) {
  require(!batch.empty(), "sandwich fit needs a nonempty batch");
  require(margin >= 0.0, "margin must be nonnegative");
  SandwichFit fit;
  fit.p = p;
  fit.margin = margin;
  fit.raw_lower = 0.0;
  fit.raw_upper = 0.0;
  for (const auto& r : batch) {
    if (r.mid <= 0.0) continue;
    fit.raw_lower = std::max(fit.raw_lower, r.lhs / r.mid);
    fit.raw_upper = std::max(fit.raw_upper, r.mid / r.rhs);
  }
  fit.lower = fit.raw_lower * (1.0 + margin);
  fit.upper = fit.raw_upper * (1.0 + margin);
  return fit;
}

inline std::size_t count_sandwich_violations(const std::vector<SandwichRow>& batch, const SandwichFit& fit) {
  constexpr double kRounding = 1e-12;
  std::size_t bad = 0;
  for (const auto& r : batch) {
    const bool lower_ok = r.lhs / fit.lower <= r.mid * (1.0 + kRounding);
    const bool upper_ok = r.mid <= fit.upper * r.rhs * (1.0 + kRounding);
    if (!lower_ok || !upper_ok) ++bad;
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Bessel / (C) properties of the truncated Haar system

struct Prop43Row {
  double test_q_norm = 0.0;
  double bessel_ratio = 0.0;  // (sum |c_i|^b)^{1/b} / ||test||_q
  double k_required = 0.0;    // ||test||_q / (sum |c_i|^s)^{1/s}
};

struct Prop43Report {
  double p = 2.0;
  double q = 2.0;
  int cutoff = 0;
  double bessel_exponent = 2.0;  // q for p <= 2 (q-Bessel), 2 for p >= 2
  double cq_index = 2.0;         // (C_2) for p <= 2, (C_p) for p >= 2
  double dual_sum_exponent = 2.0;
  std::vector<Prop43Row> rows;
  double max_bessel_ratio = 0.0;
  double max_k_required = 0.0;
  // Norms of the dual family over the truncation.
  double dual_inf_p = 0.0;
  double dual_sup_p = 0.0;
  double dual_inf_q = 0.0;
  double dual_sup_q = 0.0;
};

/// Pairings c_i = <test, haar_fn(i)> over all levels < cutoff. Reports the
/// Bessel ratio and the required (C) constant in the dual form, where a
/// (C_s)-system pairs with sums at exponent s/(s-1).
inline Prop43Report prop43_check(double p, int cutoff, const std::vector<PiecewiseFn>& tests) {
  require(cutoff >= 0 && cutoff <= 20, "cutoff out of range");
  const ExponentPair e = ExponentPair::from_p(p);
  Prop43Report rep;
  rep.p = e.p;
  rep.q = e.q;
  rep.cutoff = cutoff;
  if (p <= 2.0) {
    rep.bessel_exponent = e.q;
    rep.cq_index = 2.0;
  } else {
    rep.bessel_exponent = 2.0;
    rep.cq_index = e.p;
  }
  rep.dual_sum_exponent = rep.cq_index / (rep.cq_index - 1.0);

  const auto indices = haar_indices(cutoff);
  std::vector<PiecewiseFn> basis;
  basis.reserve(indices.size());
  rep.dual_inf_p = rep.dual_inf_q = std::numeric_limits<double>::infinity();
  for (const auto& idx : indices) {
    basis.push_back(haar_fn(idx, p));
    const PiecewiseFn dual = dual_fn(idx, p);
    const double np = lp_norm(dual, e.p), nq = lp_norm(dual, e.q);
    rep.dual_inf_p = std::min(rep.dual_inf_p, np);
    rep.dual_sup_p = std::max(rep.dual_sup_p, np);
    rep.dual_inf_q = std::min(rep.dual_inf_q, nq);
    rep.dual_sup_q = std::max(rep.dual_sup_q, nq);
  }
  for (const auto& t : tests) {
    require(!t.is_zero(), "prop43 tests must be nonzero");
    require(t.dim() == 1, "prop43 tests must live on R^1");
    const Box bb = *t.bounding_box();
    require(bb.lower()[0] >= 0.0 && bb.upper()[0] <= 1.0, "prop43 tests must be supported in [0,1)");
    double sb = 0.0, ss = 0.0;
    for (const auto& h : basis) {
      const double c = std::abs(pair(t, h));
      sb += std::pow(c, rep.bessel_exponent);
      ss += std::pow(c, rep.dual_sum_exponent);
    }
    Prop43Row row;
    row.test_q_norm = lp_norm(t, e.q);
    row.bessel_ratio = std::pow(sb, 1.0 / rep.bessel_exponent) / row.test_q_norm;
    row.k_required = ss > 0.0 ? row.test_q_norm / std::pow(ss, 1.0 / rep.dual_sum_exponent)
                              : std::numeric_limits<double>::infinity();
    rep.max_bessel_ratio = std::max(rep.max_bessel_ratio, row.bessel_ratio);
    rep.max_k_required = std::max(rep.max_k_required, row.k_required);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace lpt
