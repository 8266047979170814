#pragma once

// Test-side generators and brute-force oracles. Deliberately naive and
// independent of the library's algorithms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "lptrans/lptrans.hpp"

namespace support {

using lpt::Box;
using lpt::Complex;
using lpt::Cube;
using lpt::PiecewiseFn;
using lpt::Point;
using lpt::PointSet;

// ---------------------------------------------------------------------------
// Generators

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
  bool coin() { return std::bernoulli_distribution(0.5)(rng); }

  // Multiple of 2^-bits in [lo, hi).
  double dyadic(double lo, double hi, int bits) {
    const double scale = std::ldexp(1.0, bits);
    return static_cast<double>(integer(static_cast<std::int64_t>(std::ceil(lo * scale)),
                                       static_cast<std::int64_t>(std::ceil(hi * scale)) - 1)) /
           scale;
  }

  // n distinct points; coordinates dyadic with `bits` fractional bits when
  // bits >= 0, otherwise continuous uniform.
  std::vector<Point> points(std::size_t n, std::size_t d, double lo, double hi, int bits = -1) {
    std::set<std::vector<double>> seen;
    std::vector<Point> out;
    while (out.size() < n) {
      std::vector<double> c(d);
      for (auto& x : c) x = bits >= 0 ? dyadic(lo, hi, bits) : uniform(lo, hi);
      if (seen.insert(c).second) out.emplace_back(c);
    }
    return out;
  }

  // Clustered 1-D points: a few dense bursts plus background.
  std::vector<Point> clustered(std::size_t n, double spread) {
    std::set<double> seen;
    std::vector<Point> out;
    const int clusters = static_cast<int>(integer(1, 4));
    std::vector<double> centers;
    for (int c = 0; c < clusters; ++c) centers.push_back(uniform(-spread, spread));
    while (out.size() < n) {
      const double x = coin() ? centers[static_cast<std::size_t>(integer(0, clusters - 1))] + 0.3 * normal()
                              : uniform(-spread, spread);
      if (seen.insert(x).second) out.push_back(Point{x});
    }
    return out;
  }

  Box box(std::size_t d, double lo, double hi, int bits) {
    std::vector<double> l(d), u(d);
    for (std::size_t i = 0; i < d; ++i) {
      double a = dyadic(lo, hi, bits), b = dyadic(lo, hi, bits);
      while (a == b) b = dyadic(lo, hi, bits);
      l[i] = std::min(a, b);
      u[i] = std::max(a, b);
    }
    return Box(Point(l), Point(u));
  }

  Complex value(bool complex_values) { return complex_values ? Complex(normal(), normal()) : Complex(normal(), 0.0); }

  // Possibly overlapping pieces with dyadic corners.
  std::vector<lpt::Piece> raw_pieces(std::size_t d, std::size_t n, bool complex_values, double lo = -2.0,
                                     double hi = 2.0, int bits = 3) {
    std::vector<lpt::Piece> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({box(d, lo, hi, bits), value(complex_values)});
    return out;
  }

  PiecewiseFn function(std::size_t d, std::size_t n, bool complex_values, double lo = -2.0, double hi = 2.0,
                       int bits = 3) {
    PiecewiseFn f(d);
    while (f.is_zero()) f = lpt::canonicalize(d, raw_pieces(d, n, complex_values, lo, hi, bits));
    return f;
  }

  // 1-D step function on a dyadic grid of cell 2^-bits over [lo, hi).
  PiecewiseFn grid_step(double lo, double hi, int bits, bool complex_values = false) {
    const double w = std::ldexp(1.0, -bits);
    std::vector<lpt::Piece> pieces;
    for (double a = lo; a < hi; a += w)
      if (coin()) pieces.push_back({Box(Point{a}, Point{a + w}), value(complex_values)});
    if (pieces.empty()) pieces.push_back({Box(Point{lo}, Point{lo + w}), 1.0});
    return PiecewiseFn::from_disjoint(1, std::move(pieces));
  }
};

// ---------------------------------------------------------------------------
// Point-set oracles

inline double brute_min_separation(const std::vector<Point>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, lpt::distance(pts[i], pts[j]));
  return best;
}

inline bool in_halfopen(const Point& x, const std::vector<double>& lower, double h) {
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(x[i] >= lower[i] && x[i] < lower[i] + h)) return false;
  return true;
}

inline std::size_t count_window(std::span<const Point> pts, const std::vector<double>& lower, double h) {
  std::size_t n = 0;
  for (const auto& x : pts) n += in_halfopen(x, lower, h) ? 1 : 0;
  return n;
}

// Max over windows [a, a+h)^d whose lower face coordinates are taken from
// the points' own coordinates (d = 1, 2), counted point by point.
inline std::size_t brute_nu_plus(std::span<const Point> pts, double h) {
  if (pts.empty()) return 0;
  const std::size_t d = pts.front().dim();
  std::size_t best = 0;
  if (d == 1) {
    for (const auto& a : pts) best = std::max(best, count_window(pts, {a[0]}, h));
  } else {
    for (const auto& a : pts)
      for (const auto& b : pts) best = std::max(best, count_window(pts, {a[0], b[1]}, h));
  }
  return best;
}

// Max over a regular grid of anchors with spacing `step` covering the span.
inline std::size_t grid_anchor_nu_plus(std::span<const Point> pts, double h, double step) {
  const std::size_t d = pts.front().dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity()), hi(d, -lo[0]);
  for (const auto& x : pts)
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
  std::size_t best = 0;
  std::vector<double> a(d);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == d) {
      best = std::max(best, count_window(pts, a, h));
      return;
    }
    for (double t = std::floor((lo[i] - h) / step) * step; t <= hi[i]; t += step) {
      a[i] = t;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

// Chromatic number of the conflict graph (edge iff distance < delta) by
// subset dynamic programming. n <= 16.
inline std::size_t min_coloring(const std::vector<Point>& pts, double delta) {
  const std::size_t n = pts.size();
  const std::size_t full = (std::size_t{1} << n) - 1;
  std::vector<std::uint32_t> adj(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && lpt::distance(pts[i], pts[j]) < delta) adj[i] |= 1u << j;
  std::vector<char> independent(full + 1, 0);
  independent[0] = 1;
  for (std::size_t s = 1; s <= full; ++s) {
    const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(s));
    const std::size_t rest = s & (s - 1);
    independent[s] = independent[rest] && !(adj[low] & rest);
  }
  std::vector<std::uint8_t> colors(full + 1, 255);
  colors[0] = 0;
  for (std::size_t s = 1; s <= full; ++s) {
    const std::size_t low = s & (~s + 1);
    // Enumerate independent subsets of s containing the lowest element.
    for (std::size_t t = s; t; t = (t - 1) & s)
      if ((t & low) && independent[t] && colors[s ^ t] != 255)
        colors[s] = std::min<std::uint8_t>(colors[s], static_cast<std::uint8_t>(colors[s ^ t] + 1));
  }
  return colors[full];
}

// ---------------------------------------------------------------------------
// Function oracles

// Point evaluation by scanning every piece.
inline Complex eval(const PiecewiseFn& f, const std::vector<double>& x) {
  Complex v = 0.0;
  for (const auto& pc : f.pieces()) {
    bool in = true;
    for (std::size_t i = 0; i < x.size(); ++i)
      in = in && x[i] >= pc.box.lower()[i] && x[i] < pc.box.upper()[i];
    if (in) v += pc.value;
  }
  return v;
}

// Sum of overlaps over all piece pairs, no pruning.
inline Complex brute_pair(const PiecewiseFn& h, const PiecewiseFn& f) {
  Complex s = 0.0;
  for (const auto& a : h.pieces())
    for (const auto& b : f.pieces()) {
      double vol = 1.0;
      for (std::size_t i = 0; i < h.dim(); ++i)
        vol *= std::max(0.0, std::min(a.box.upper()[i], b.box.upper()[i]) - std::max(a.box.lower()[i], b.box.lower()[i]));
      s += a.value * std::conj(b.value) * vol;
    }
  return s;
}

// Midpoint rule for a functional on a box, `n` cells per axis.
inline Complex riemann(const Box& b, std::size_t n, const std::function<Complex(const std::vector<double>&)>& g) {
  const std::size_t d = b.dim();
  std::vector<double> step(d);
  double cell = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    step[i] = b.side(i) / static_cast<double>(n);
    cell *= step[i];
  }
  Complex s = 0.0;
  std::vector<std::size_t> k(d, 0);
  std::vector<double> x(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) x[i] = b.lower()[i] + (static_cast<double>(k[i]) + 0.5) * step[i];
    s += g(x);
    std::size_t i = 0;
    for (; i < d; ++i) {
      if (++k[i] < n) break;
      k[i] = 0;
    }
    if (i == d) break;
  }
  return s * cell;
}

// Lp norm by evaluating on the common refinement of a 1-D function's
// breakpoints.
inline double refined_lp_norm_1d(const PiecewiseFn& f, double p) {
  std::vector<double> cuts;
  for (const auto& pc : f.pieces()) {
    cuts.push_back(pc.box.lower()[0]);
    cuts.push_back(pc.box.upper()[0]);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    s += std::pow(std::abs(eval(f, {0.5 * (cuts[i] + cuts[i + 1])})), p) * (cuts[i + 1] - cuts[i]);
  return std::pow(s, 1.0 / p);
}

inline PiecewiseFn interval(double a, double b, Complex v = 1.0) {
  return PiecewiseFn::indicator(Box(Point{a}, Point{b}), v);
}

inline PointSet integers(std::int64_t lo, std::int64_t hi) {
  std::vector<Point> pts;
  for (std::int64_t k = lo; k <= hi; ++k) pts.push_back(Point{static_cast<double>(k)});
  return PointSet(std::move(pts));
}

inline lpt::TranslateSystem single(const PiecewiseFn& f, const PointSet& gamma, double p = 2.0,
                                   const std::string& label = "g") {
  std::vector<lpt::Generator> gens;
  gens.emplace_back(f, gamma, label);
  return lpt::TranslateSystem(std::move(gens), lpt::ExponentPair::from_p(p));
}

}  // namespace support
