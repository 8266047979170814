#pragma once

// Exact L^p calculus on compactly supported, complex-valued, piecewise-constant
// functions on R^d.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lptrans/error.hpp"
#include "lptrans/geometry.hpp"

namespace lpt {

using Complex = std::complex<double>;

struct Piece {
  Box box;
  Complex value;
};

/// Dual exponents 1/p + 1/q = 1 with 1 < p < infinity.
struct ExponentPair {
  double p;
  double q;

  static ExponentPair from_p(double p) {
    require(p > 1.0 && std::isfinite(p), "exponent p must lie in (1, inf)");
    return {p, p / (p - 1.0)};
  }
};

inline double conjugate_exponent(double p) { return ExponentPair::from_p(p).q; }

class PiecewiseFn;
PiecewiseFn canonicalize(std::size_t dim, std::vector<Piece> pieces);

/// Finite sum of values times indicators of pairwise disjoint half-open
/// boxes. Pieces are kept sorted by lower corner and zero pieces are dropped.
class PiecewiseFn {
 public:
  explicit PiecewiseFn(std::size_t dim) : dim_(dim) { require(dim >= 1, "dimension must be >= 1"); }

  /// Builds from pieces that must already be pairwise disjoint.
  static PiecewiseFn from_disjoint(std::size_t dim, std::vector<Piece> pieces) {
    PiecewiseFn f(dim);
    for (const auto& pc : pieces) require(pc.box.dim() == dim, "piece dimension mismatch");
    f.pieces_ = std::move(pieces);
    f.tidy();
    require(f.pieces_disjoint(), "pieces overlap; canonicalize them first");
    return f;
  }

  static PiecewiseFn indicator(const Box& b, Complex value = 1.0) {
    return trusted(b.dim(), {Piece{b, value}});
  }
  static PiecewiseFn indicator(const Cube& q, Complex value = 1.0) { return indicator(q.box(), value); }

  std::size_t dim() const { return dim_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  bool is_zero() const { return pieces_.empty(); }

  /// Bounding box of the support; nullopt for the zero function.
  std::optional<Box> bounding_box() const {
    if (pieces_.empty()) return std::nullopt;
    std::vector<double> lo(dim_, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim_, -std::numeric_limits<double>::infinity());
    for (const auto& pc : pieces_)
      for (std::size_t i = 0; i < dim_; ++i) {
        lo[i] = std::min(lo[i], pc.box.lower()[i]);
        hi[i] = std::max(hi[i], pc.box.upper()[i]);
      }
    return Box(Point(std::move(lo)), Point(std::move(hi)));
  }

  // Largest side along axis 0 over all pieces.
  double max_width0() const {
    double w = 0.0;
    for (const auto& pc : pieces_) w = std::max(w, pc.box.side(0));
    return w;
  }

  double min_piece_side() const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& pc : pieces_)
      for (std::size_t i = 0; i < dim_; ++i) s = std::min(s, pc.box.side(i));
    return s;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& pc : pieces_) m = std::max(m, std::abs(pc.value));
    return m;
  }

  Complex operator()(const Point& x) const {
    for (const auto& pc : pieces_)
      if (pc.box.contains(x)) return pc.value;
    return 0.0;
  }

  PiecewiseFn scaled(Complex c) const {
    std::vector<Piece> out;
    out.reserve(pieces_.size());
    for (const auto& pc : pieces_) out.push_back({pc.box, pc.value * c});
    return trusted(dim_, std::move(out));
  }

  friend PiecewiseFn operator+(const PiecewiseFn& a, const PiecewiseFn& b) {
    require(a.dim_ == b.dim_, "dimension mismatch");
    std::vector<Piece> all(a.pieces_);
    all.insert(all.end(), b.pieces_.begin(), b.pieces_.end());
    return canonicalize(a.dim_, std::move(all));
  }

  friend bool operator==(const PiecewiseFn& a, const PiecewiseFn& b) {
    if (a.dim_ != b.dim_ || a.pieces_.size() != b.pieces_.size()) return false;
    for (std::size_t i = 0; i < a.pieces_.size(); ++i)
      if (!(a.pieces_[i].box == b.pieces_[i].box) || a.pieces_[i].value != b.pieces_[i].value) return false;
    return true;
  }

  // Skips the disjointness check; callers guarantee it.
  static PiecewiseFn trusted(std::size_t dim, std::vector<Piece> pieces) {
    PiecewiseFn f(dim);
    f.pieces_ = std::move(pieces);
    f.tidy();
    return f;
  }

  bool pieces_disjoint() const {
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const Box& a = pieces_[i].box;
      for (std::size_t j = i + 1; j < pieces_.size() && pieces_[j].box.lower()[0] < a.upper()[0]; ++j)
        if (overlap_volume(a, pieces_[j].box) > 0.0) return false;
    }
    return true;
  }

 private:
  void tidy() {
    std::erase_if(pieces_, [](const Piece& pc) { return pc.value == Complex(0.0); });
    std::sort(pieces_.begin(), pieces_.end(),
              [](const Piece& a, const Piece& b) { return a.box.lower() < b.box.lower(); });
  }

  std::size_t dim_;
  std::vector<Piece> pieces_;
};

/// Disjoint form of an arbitrary (possibly overlapping) piece list: overlaps
/// are split along axis-aligned breakpoints and their values summed.
inline PiecewiseFn canonicalize(std::size_t dim, std::vector<Piece> pieces) {
  for (const auto& pc : pieces) require(pc.box.dim() == dim, "piece dimension mismatch");
  PiecewiseFn quick = PiecewiseFn::trusted(dim, pieces);
  if (quick.pieces_disjoint()) return quick;

  std::vector<std::vector<double>> cuts(dim);
  for (const auto& pc : pieces)
    for (std::size_t i = 0; i < dim; ++i) {
      cuts[i].push_back(pc.box.lower()[i]);
      cuts[i].push_back(pc.box.upper()[i]);
    }
  for (auto& c : cuts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::map<std::vector<std::size_t>, Complex> cells;
  for (const auto& pc : pieces) {
    if (pc.value == Complex(0.0)) continue;
    std::vector<std::size_t> lo(dim), hi(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      lo[i] = static_cast<std::size_t>(std::lower_bound(cuts[i].begin(), cuts[i].end(), pc.box.lower()[i]) -
                                       cuts[i].begin());
      hi[i] = static_cast<std::size_t>(std::lower_bound(cuts[i].begin(), cuts[i].end(), pc.box.upper()[i]) -
                                       cuts[i].begin());
    }
    std::vector<std::size_t> idx(lo);
    while (true) {
      cells[idx] += pc.value;
      std::size_t k = 0;
      for (; k < dim; ++k) {
        if (++idx[k] < hi[k]) break;
        idx[k] = lo[k];
      }
      if (k == dim) break;
    }
  }
  std::vector<Piece> out;
  for (const auto& [idx, v] : cells) {
    std::vector<double> lo(dim), hi(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      lo[i] = cuts[i][idx[i]];
      hi[i] = cuts[i][idx[i] + 1];
    }
    out.push_back({Box(Point(std::move(lo)), Point(std::move(hi))), v});
  }
  return PiecewiseFn::trusted(dim, std::move(out));
}

inline PiecewiseFn canonicalize(const PiecewiseFn& f) { return canonicalize(f.dim(), f.pieces()); }

/// (T_gamma f)(x) = f(x - gamma).
inline PiecewiseFn translate(const PiecewiseFn& f, const Point& gamma) {
  require(gamma.dim() == f.dim(), "dimension mismatch in translate");
  std::vector<Piece> out;
  out.reserve(f.pieces().size());
  for (const auto& pc : f.pieces()) out.push_back({pc.box.translated(gamma), pc.value});
  return PiecewiseFn::trusted(f.dim(), std::move(out));
}

inline double lp_norm(const PiecewiseFn& f, double p) {
  require(p >= 1.0 && std::isfinite(p), "lp_norm needs 1 <= p < inf");
  double s = 0.0;
  for (const auto& pc : f.pieces()) s += std::pow(std::abs(pc.value), p) * pc.box.volume();
  return std::pow(s, 1.0 / p);
}

// ||f||_p^p without the final root.
inline double lp_norm_pow(const PiecewiseFn& f, double p) {
  require(p >= 1.0 && std::isfinite(p), "lp_norm needs 1 <= p < inf");
  double s = 0.0;
  for (const auto& pc : f.pieces()) s += std::pow(std::abs(pc.value), p) * pc.box.volume();
  return s;
}

inline PiecewiseFn restrict(const PiecewiseFn& f, const Box& region) {
  require(region.dim() == f.dim(), "dimension mismatch in restrict");
  std::vector<Piece> out;
  for (const auto& pc : f.pieces())
    if (auto b = intersect(pc.box, region)) out.push_back({*b, pc.value});
  return PiecewiseFn::trusted(f.dim(), std::move(out));
}

/// chi_Q f for the half-open cube Q.
inline PiecewiseFn restrict(const PiecewiseFn& f, const Cube& q) { return restrict(f, q.box()); }

/// Sesquilinear pairing <h, f> = integral of h * conj(f).
inline Complex pair(const PiecewiseFn& h, const PiecewiseFn& f) {
  require(h.dim() == f.dim(), "dimension mismatch in pair");
  const auto& fp = f.pieces();
  if (fp.empty()) return 0.0;
  const double w = f.max_width0();
  Complex sum = 0.0;
  for (const auto& a : h.pieces()) {
    // Pieces of f with lower_0 in (a.lower_0 - w, a.upper_0) may overlap a.
    const double from = a.box.lower()[0] - w;
    auto it = std::upper_bound(fp.begin(), fp.end(), from,
                               [](double v, const Piece& pc) { return v < pc.box.lower()[0]; });
    for (; it != fp.end() && it->box.lower()[0] < a.box.upper()[0]; ++it) {
      const double v = overlap_volume(a.box, it->box);
      if (v > 0.0) sum += a.value * std::conj(it->value) * v;
    }
  }
  return sum;
}

namespace detail {

// integral_l^u exp(-2 pi i b x) dx, stable as b -> 0.
inline Complex character_integral(double b, double l, double u) {
  const double len = u - l;
  const double t = std::numbers::pi * b * len;
  const double sinc = std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  return std::polar(len * sinc, -std::numbers::pi * b * (u + l));
}

}  // namespace detail

/// integral of f(x) * conj(exp(2 pi i <freq, x>)) dx, in closed form per box.
inline Complex pair_modulated(const PiecewiseFn& f, const Point& freq) {
  require(freq.dim() == f.dim(), "dimension mismatch in pair_modulated");
  Complex sum = 0.0;
  for (const auto& pc : f.pieces()) {
    Complex term = pc.value;
    for (std::size_t i = 0; i < f.dim(); ++i)
      term *= detail::character_integral(freq[i], pc.box.lower()[i], pc.box.upper()[i]);
    sum += term;
  }
  return sum;
}

inline PiecewiseFn normalize(const PiecewiseFn& f, double p) {
  const double n = lp_norm(f, p);
  require(n > 0.0, "cannot normalize the zero function");
  return f.scaled(1.0 / n);
}

// ---------------------------------------------------------------------------
// Sampling of closed-form functions onto a grid

struct SampledFn {
  PiecewiseFn fn;
  double error_bound;  // L^p distance to the closed form restricted to the support
};

/// Names accepted by `sample`.
inline std::vector<std::string> sample_catalog() { return {"gaussian", "hat"}; }

/// Midpoint sampling of a catalog function (restricted to `support`) on a grid
/// of cells of side `step`. The bound is Lip * half-diagonal * vol^{1/p}.
inline SampledFn sample(std::string_view expr, double step, const Box& support, double p) {
  require(step > 0.0, "sampling step must be positive");
  require(p >= 1.0, "sampling exponent must be >= 1");
  const std::size_t d = support.dim();
  double lip = 0.0;
  auto eval = [&](const std::vector<double>& x) -> double {
    if (expr == "gaussian") {
      double r2 = 0.0;
      for (double t : x) r2 += t * t;
      return std::exp(-std::numbers::pi * r2);
    }
    double v = 1.0;
    for (double t : x) v *= std::max(0.0, 1.0 - std::abs(t));
    return v;
  };
  if (expr == "gaussian") {
    lip = std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5);
  } else if (expr == "hat") {
    lip = std::sqrt(static_cast<double>(d));
  } else {
    throw InputError("unknown sampled expression '" + std::string(expr) + "'");
  }

  std::vector<std::size_t> cells(d);
  double total = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    cells[i] = static_cast<std::size_t>(std::ceil(support.side(i) / step));
    total *= static_cast<double>(cells[i]);
  }
  require(total <= 4e6, "sampling grid too fine");
  std::vector<Piece> out;
  std::vector<std::size_t> idx(d, 0);
  double max_half_diag = 0.0;
  while (true) {
    std::vector<double> lo(d), hi(d), mid(d);
    double hd = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = support.lower()[i] + static_cast<double>(idx[i]) * step;
      hi[i] = std::min(support.upper()[i], lo[i] + step);
      mid[i] = 0.5 * (lo[i] + hi[i]);
      hd += 0.25 * (hi[i] - lo[i]) * (hi[i] - lo[i]);
    }
    max_half_diag = std::max(max_half_diag, std::sqrt(hd));
    out.push_back({Box(Point(std::move(lo)), Point(std::move(hi))), eval(mid)});
    std::size_t k = 0;
    for (; k < d; ++k) {
      if (++idx[k] < cells[k]) break;
      idx[k] = 0;
    }
    if (k == d) break;
  }
  const double bound = lip * max_half_diag * std::pow(support.volume(), 1.0 / p);
  return {PiecewiseFn::trusted(d, std::move(out)), bound};
}

}  // namespace lpt
