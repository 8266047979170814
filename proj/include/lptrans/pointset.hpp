#pragma once

// Point sets in R^d: separation, cube counting and upper Beurling density.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lptrans/error.hpp"
#include "lptrans/geometry.hpp"

namespace lpt {

class PointSet;

namespace gen {

struct Explicit {};

/// offset + sum_j n_j * basis[j], n in Z^d, keeping points with every
/// coordinate in the closed window [-window, window].
struct Lattice {
  std::vector<std::vector<double>> basis;
  double window = 0.0;
  std::vector<double> offset;
};

/// {1/n : 1 <= n <= count} in R^1.
struct Reciprocal {
  std::int64_t count = 0;
};

/// Finite union of tagged sub-sets.
struct Union {
  std::vector<std::string> tags;
  std::vector<PointSet> parts;
};

}  // namespace gen

using Provenance = std::variant<gen::Explicit, gen::Lattice, gen::Reciprocal, gen::Union>;

/// Finite list of distinct points of a common dimension, with an optional
/// record of the generator that produced it.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::vector<Point> points, Provenance provenance = gen::Explicit{})
      : points_(std::move(points)), provenance_(std::move(provenance)) {
    validate();
  }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::size_t dim() const { return points_.empty() ? 0 : points_.front().dim(); }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point> points() const { return points_; }
  const Provenance& provenance() const { return provenance_; }

  PointSet translated(const Point& shift) const;

  friend bool operator==(const PointSet& a, const PointSet& b) { return a.points_ == b.points_; }

 private:
  void validate() const {
    if (points_.empty()) return;
    const std::size_t d = points_.front().dim();
    for (const Point& p : points_) require(p.dim() == d, "point set has inconsistent dimensions");
    std::vector<const Point*> sorted;
    sorted.reserve(points_.size());
    for (const Point& p : points_) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](const Point* a, const Point* b) { return *a < *b; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      if (*sorted[i] == *sorted[i - 1]) {
        std::string where = "(";
        for (std::size_t k = 0; k < d; ++k) where += (k ? ", " : "") + std::to_string((*sorted[i])[k]);
        throw PreconditionError("duplicate point in point set: " + where + ")");
      }
    }
  }

  std::vector<Point> points_;
  Provenance provenance_;
};

// ---------------------------------------------------------------------------
// Generators

namespace detail {

// Solves A x = b for small dense A by Gaussian elimination with partial pivoting.
inline std::vector<double> solve_small(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    require(std::abs(a[piv][col]) > 1e-300, "lattice basis is singular");
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace detail

inline PointSet make_lattice(const gen::Lattice& spec) {
  const std::size_t d = spec.basis.size();
  require(d >= 1, "lattice basis must be nonempty");
  for (const auto& v : spec.basis) require(v.size() == d, "lattice basis must be square");
  require(spec.window > 0.0 && std::isfinite(spec.window), "lattice window must be positive");
  std::vector<double> offset = spec.offset.empty() ? std::vector<double>(d, 0.0) : spec.offset;
  require(offset.size() == d, "lattice offset dimension mismatch");

  // Column matrix M with M[i][j] = basis[j][i]; n = M^{-1}(x - offset).
  std::vector<std::vector<double>> m(d, std::vector<double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m[i][j] = spec.basis[j][i];

  std::vector<double> nlo(d, std::numeric_limits<double>::infinity());
  std::vector<double> nhi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    std::vector<double> rhs(d);
    for (std::size_t i = 0; i < d; ++i)
      rhs[i] = ((mask >> i) & 1 ? spec.window : -spec.window) - offset[i];
    const auto n = detail::solve_small(m, rhs);
    for (std::size_t j = 0; j < d; ++j) {
      nlo[j] = std::min(nlo[j], n[j]);
      nhi[j] = std::max(nhi[j], n[j]);
    }
  }
  std::vector<std::int64_t> lo(d), hi(d);
  double total = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    lo[j] = static_cast<std::int64_t>(std::floor(nlo[j])) - 1;
    hi[j] = static_cast<std::int64_t>(std::ceil(nhi[j])) + 1;
    total *= static_cast<double>(hi[j] - lo[j] + 1);
  }
  require(total < 5e7, "lattice window too large to enumerate");

  std::vector<Point> pts;
  std::vector<std::int64_t> n(lo);
  while (true) {
    std::vector<double> x(offset);
    bool inside = true;
    for (std::size_t i = 0; i < d && inside; ++i) {
      for (std::size_t j = 0; j < d; ++j) x[i] += static_cast<double>(n[j]) * spec.basis[j][i];
      inside = x[i] >= -spec.window && x[i] <= spec.window;
    }
    if (inside) pts.emplace_back(std::move(x));
    std::size_t k = 0;
    for (; k < d; ++k) {
      if (++n[k] <= hi[k]) break;
      n[k] = lo[k];
    }
    if (k == d) break;
  }
  std::sort(pts.begin(), pts.end());
  gen::Lattice stored = spec;
  stored.offset = offset;
  return PointSet(std::move(pts), stored);
}

/// a * Z^d intersected with [-window, window]^d.
inline PointSet scaled_integer_lattice(std::size_t d, double a, double window) {
  gen::Lattice spec;
  spec.basis.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) spec.basis[i][i] = a;
  spec.window = window;
  spec.offset.assign(d, 0.0);
  return make_lattice(spec);
}

inline PointSet make_reciprocal(std::int64_t count) {
  require(count >= 1, "reciprocal family needs N >= 1");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (std::int64_t n = 1; n <= count; ++n) pts.push_back(Point{1.0 / static_cast<double>(n)});
  return PointSet(std::move(pts), gen::Reciprocal{count});
}

inline PointSet make_union(std::vector<std::string> tags, std::vector<PointSet> parts) {
  require(!parts.empty(), "union needs at least one part");
  require(tags.size() == parts.size(), "union tags and parts differ in length");
  std::vector<Point> pts;
  for (const auto& part : parts) {
    require(part.dim() == parts.front().dim() || part.empty(), "union parts differ in dimension");
    pts.insert(pts.end(), part.points().begin(), part.points().end());
  }
  return PointSet(std::move(pts), gen::Union{std::move(tags), std::move(parts)});
}

inline PointSet PointSet::translated(const Point& shift) const {
  std::vector<Point> pts;
  pts.reserve(points_.size());
  for (const Point& p : points_) pts.push_back(p + shift);
  return PointSet(std::move(pts));
}

/// Re-generates a provenance-backed set at a new truncation parameter (lattice
/// window half-width, or reciprocal count). Explicit sets are returned as is.
inline PointSet regenerate(const PointSet& s, double truncation) {
  return std::visit(
      [&](const auto& g) -> PointSet {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, gen::Lattice>) {
          gen::Lattice spec = g;
          spec.window = truncation;
          return make_lattice(spec);
        } else if constexpr (std::is_same_v<G, gen::Reciprocal>) {
          return make_reciprocal(static_cast<std::int64_t>(std::llround(truncation)));
        } else if constexpr (std::is_same_v<G, gen::Union>) {
          std::vector<PointSet> parts;
          for (const auto& p : g.parts) parts.push_back(regenerate(p, truncation));
          return make_union(g.tags, std::move(parts));
        } else {
          return s;
        }
      },
      s.provenance());
}

/// True when the set is a finite truncation of an infinite generator.
inline bool is_truncated(const PointSet& s) {
  return std::visit(
      [](const auto& g) -> bool {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, gen::Union>) {
          return std::any_of(g.parts.begin(), g.parts.end(), [](const PointSet& p) { return is_truncated(p); });
        } else {
          return !std::is_same_v<G, gen::Explicit>;
        }
      },
      s.provenance());
}

/// Full side of the smallest lattice window in the provenance, if any.
inline std::optional<double> window_side(const PointSet& s) {
  return std::visit(
      [](const auto& g) -> std::optional<double> {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, gen::Lattice>) {
          return 2.0 * g.window;
        } else if constexpr (std::is_same_v<G, gen::Union>) {
          std::optional<double> best;
          for (const auto& p : g.parts)
            if (auto w = window_side(p)) best = best ? std::min(*best, *w) : *w;
          return best;
        } else {
          return std::nullopt;
        }
      },
      s.provenance());
}

/// Whether every point of the untruncated generator lying in `region` is
/// present in the truncation.
inline bool covers(const PointSet& s, const Box& region) {
  return std::visit(
      [&](const auto& g) -> bool {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, gen::Lattice>) {
          for (std::size_t i = 0; i < region.dim(); ++i)
            if (region.lower()[i] < -g.window || region.upper()[i] > g.window) return false;
          return true;
        } else if constexpr (std::is_same_v<G, gen::Reciprocal>) {
          // Missing points 1/n, n > N, fill (0, 1/(N+1)].
          const double gap_hi = 1.0 / static_cast<double>(g.count + 1);
          return !(region.lower()[0] <= gap_hi && region.upper()[0] > 0.0);
        } else if constexpr (std::is_same_v<G, gen::Union>) {
          return std::all_of(g.parts.begin(), g.parts.end(),
                             [&](const PointSet& p) { return covers(p, region); });
        } else {
          return true;
        }
      },
      s.provenance());
}

/// Sub-sets of a union provenance, or the set itself.
inline std::vector<PointSet> union_parts(const PointSet& s) {
  if (const auto* u = std::get_if<gen::Union>(&s.provenance())) return u->parts;
  return {s};
}

// ---------------------------------------------------------------------------
// Separation

/// inf_{i != j} |x_i - x_j| (Euclidean).
inline double min_separation(std::span<const Point> pts) {
  if (pts.size() < 2) throw PreconditionError("undefined separation: fewer than 2 points");
  std::vector<const Point*> sorted;
  for (const Point& p : pts) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](const Point* a, const Point* b) { return *a < *b; });
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      if ((*sorted[j])[0] - (*sorted[i])[0] >= best) break;
      best = std::min(best, distance(*sorted[i], *sorted[j]));
    }
  }
  return best;
}

inline double min_separation(const PointSet& s) { return min_separation(s.points()); }

struct SeparationReport {
  double min_gap = 0.0;
  double delta = 0.0;
  std::size_t part_count = 0;
  std::vector<std::vector<std::size_t>> parts;  // indices into the input set
};

/// Greedy first-fit partition into delta-separated parts (pairwise distances
/// >= delta), visiting points in lexicographic order.
inline SeparationReport decompose_separated(const PointSet& s, double delta) {
  require(delta > 0.0, "delta must be positive");
  SeparationReport rep;
  rep.delta = delta;
  rep.min_gap = s.size() >= 2 ? min_separation(s) : std::numeric_limits<double>::infinity();

  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a] < s[b]; });

  for (std::size_t idx : order) {
    const Point& p = s[idx];
    bool placed = false;
    for (auto& part : rep.parts) {
      // Members were appended in lexicographic order, so their first
      // coordinates are nondecreasing; only the tail can be closer than delta.
      bool ok = true;
      for (auto it = part.rbegin(); it != part.rend(); ++it) {
        const Point& m = s[*it];
        if (p[0] - m[0] >= delta) break;
        if (distance(p, m) < delta) {
          ok = false;
          break;
        }
      }
      if (ok) {
        part.push_back(idx);
        placed = true;
        break;
      }
    }
    if (!placed) rep.parts.push_back({idx});
  }
  rep.part_count = rep.parts.size();
  return rep;
}

// ---------------------------------------------------------------------------
// Counting

inline std::size_t count_in_cube(std::span<const Point> pts, const Cube& q) {
  std::size_t n = 0;
  for (const Point& p : pts) {
    Point::check_same_dim(p, q.center());
    if (q.contains(p)) ++n;
  }
  return n;
}

inline std::size_t count_in_cube(const PointSet& s, const Cube& q) { return count_in_cube(s.points(), q); }

namespace detail {

// Index n with x in [h n - h/2, h n + h/2), using the same arithmetic as Cube.
inline std::int64_t grid_index(double x, double h) {
  auto n = static_cast<std::int64_t>(std::floor(x / h + 0.5));
  for (int it = 0; it < 4; ++it) {
    const double c = h * static_cast<double>(n);
    if (x < c - h / 2) {
      --n;
    } else if (!(x < c + h / 2)) {
      ++n;
    } else {
      break;
    }
  }
  return n;
}

}  // namespace detail

/// Occupancy of the grid cubes Q_h(h n), n in Z^d (only nonempty cells).
inline std::map<std::vector<std::int64_t>, std::size_t> grid_counts(std::span<const Point> pts, double h) {
  require(h > 0.0, "h must be positive");
  std::map<std::vector<std::int64_t>, std::size_t> cells;
  for (const Point& p : pts) {
    std::vector<std::int64_t> key(p.dim());
    for (std::size_t i = 0; i < p.dim(); ++i) key[i] = detail::grid_index(p[i], h);
    ++cells[key];
  }
  return cells;
}

struct NuPlus {
  std::size_t lower = 0;
  std::size_t upper = 0;
  bool exact = true;
  std::optional<Box> window;  // a side-h window attaining `lower`
};

/// Largest number of points in any half-open side-h cube. Exact for d <= 2 by
/// anchoring lower faces at point coordinates; for d >= 3 the grid bound
/// N_h <= nu <= 2^d N_h.
inline NuPlus nu_plus(std::span<const Point> pts, double h);

/// The grid bound (N_h, 2^d N_h) for any dimension.
inline NuPlus nu_plus_grid(std::span<const Point> pts, double h) {
  require(h > 0.0, "h must be positive");
  NuPlus r;
  r.exact = false;
  if (pts.empty()) return r;
  const std::size_t d = pts.front().dim();
  const auto cells = grid_counts(pts, h);
  const std::vector<std::int64_t>* best = nullptr;
  for (const auto& [key, n] : cells) {
    if (n > r.lower) {
      r.lower = n;
      best = &key;
    }
  }
  r.upper = r.lower << d;
  std::vector<double> c(d);
  for (std::size_t i = 0; i < d; ++i) c[i] = h * static_cast<double>((*best)[i]);
  r.window = Cube(Point(std::move(c)), h).box();
  return r;
}

namespace detail {

inline Box anchored_window(std::vector<double> lower, double h) {
  std::vector<double> upper(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) upper[i] = lower[i] + h;
  return Box(Point(std::move(lower)), Point(std::move(upper)));
}

inline NuPlus nu_plus_1d(std::span<const Point> pts, double h) {
  std::vector<double> xs;
  xs.reserve(pts.size());
  for (const Point& p : pts) xs.push_back(p[0]);
  std::sort(xs.begin(), xs.end());
  NuPlus r;
  std::size_t best_i = 0, j = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double hi = xs[i] + h;
    j = std::max(j, i);
    while (j < xs.size() && xs[j] < hi) ++j;
    if (j - i > r.lower) {
      r.lower = j - i;
      best_i = i;
    }
  }
  r.upper = r.lower;
  r.window = anchored_window({xs[best_i]}, h);
  return r;
}

inline NuPlus nu_plus_2d(std::span<const Point> pts, double h) {
  std::vector<std::pair<double, double>> xy;
  xy.reserve(pts.size());
  for (const Point& p : pts) xy.emplace_back(p[0], p[1]);
  std::sort(xy.begin(), xy.end());
  NuPlus r;
  double bx = xy.front().first, by = xy.front().second;
  std::vector<double> ys;
  std::size_t j = 0;
  for (std::size_t i = 0; i < xy.size(); ++i) {
    if (i > 0 && xy[i].first == xy[i - 1].first) continue;  // same x anchor
    const double ax = xy[i].first;
    const double hi = ax + h;
    j = std::max(j, i);
    while (j < xy.size() && xy[j].first < hi) ++j;
    if (j - i <= r.lower) continue;  // slab cannot beat the current best
    ys.clear();
    for (std::size_t k = i; k < j; ++k) ys.push_back(xy[k].second);
    std::sort(ys.begin(), ys.end());
    std::size_t t = 0;
    for (std::size_t s = 0; s < ys.size(); ++s) {
      const double yhi = ys[s] + h;
      t = std::max(t, s);
      while (t < ys.size() && ys[t] < yhi) ++t;
      if (t - s > r.lower) {
        r.lower = t - s;
        bx = ax;
        by = ys[s];
      }
    }
  }
  r.upper = r.lower;
  r.window = anchored_window({bx, by}, h);
  return r;
}

}  // namespace detail

inline NuPlus nu_plus(std::span<const Point> pts, double h) {
  require(h > 0.0, "h must be positive");
  if (pts.empty()) return NuPlus{};
  const std::size_t d = pts.front().dim();
  for (const Point& p : pts) require(p.dim() == d, "dimension mismatch");
  if (d == 1) return detail::nu_plus_1d(pts, h);
  if (d == 2) return detail::nu_plus_2d(pts, h);
  return nu_plus_grid(pts, h);
}

inline NuPlus nu_plus(const PointSet& s, double h) { return nu_plus(s.points(), h); }

// ---------------------------------------------------------------------------
// Density

struct DensityRow {
  double h = 0.0;
  std::size_t nu_lower = 0;
  std::size_t nu_upper = 0;
  double ratio_lower = 0.0;
  double ratio_upper = 0.0;
};

struct DensityProfile {
  std::vector<DensityRow> rows;
  double density_estimate = 0.0;  // max ratio_lower over the largest third of h
  bool exact = true;
  bool truncation_bias = false;   // provenance is a truncated infinite generator
};

inline DensityProfile density_profile(const PointSet& s, std::span<const double> h_values) {
  require(!h_values.empty(), "h_values must be nonempty");
  for (std::size_t i = 0; i < h_values.size(); ++i) {
    require(h_values[i] > 0.0, "h values must be positive");
    require(i == 0 || h_values[i] > h_values[i - 1], "h values must be increasing");
  }
  if (auto w = window_side(s); w && h_values.back() > *w)
    throw PreconditionError("window too small: h = " + std::to_string(h_values.back()) +
                            " exceeds generator window side " + std::to_string(*w));
  DensityProfile prof;
  prof.truncation_bias = is_truncated(s);
  const double d = static_cast<double>(std::max<std::size_t>(s.dim(), 1));
  for (double h : h_values) {
    const NuPlus nu = nu_plus(s, h);
    const double vol = std::pow(h, d);
    prof.rows.push_back({h, nu.lower, nu.upper, static_cast<double>(nu.lower) / vol,
                         static_cast<double>(nu.upper) / vol});
    prof.exact = prof.exact && nu.exact;
  }
  const std::size_t top = (prof.rows.size() + 2) / 3;
  for (std::size_t i = prof.rows.size() - top; i < prof.rows.size(); ++i)
    prof.density_estimate = std::max(prof.density_estimate, prof.rows[i].ratio_lower);
  return prof;
}

/// Points whose open radius-ball holds at least `threshold` other points. A
/// finite-truncation heuristic for accumulation, not a decision procedure.
inline std::vector<Point> detect_accumulation(const PointSet& s, double radius, std::size_t threshold) {
  require(radius > 0.0, "radius must be positive");
  require(threshold >= 2, "threshold must be at least 2");
  std::vector<std::size_t> order(s.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s[a][0] < s[b][0]; });
  std::vector<std::size_t> hits(s.size(), 0);
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const Point& p = s[order[a]];
      const Point& q = s[order[b]];
      if (q[0] - p[0] >= radius) break;
      if (distance(p, q) < radius) {
        ++hits[order[a]];
        ++hits[order[b]];
      }
    }
  }
  std::vector<Point> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (hits[i] >= threshold) out.push_back(s[i]);
  return out;
}

}  // namespace lpt
