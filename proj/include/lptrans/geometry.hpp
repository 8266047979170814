#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lptrans/error.hpp"

namespace lpt {

/// A point of R^d. The dimension is a runtime property; all coordinates must
/// be finite.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) { validate(); }
  Point(std::initializer_list<double> coords) : coords_(coords) { validate(); }

  static Point zero(std::size_t dim) { return Point(std::vector<double>(dim, 0.0)); }

  std::size_t dim() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  friend Point operator+(const Point& a, const Point& b) {
    check_same_dim(a, b);
    std::vector<double> c(a.dim());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coords_[i] + b.coords_[i];
    return Point(std::move(c));
  }
  friend Point operator-(const Point& a, const Point& b) {
    check_same_dim(a, b);
    std::vector<double> c(a.dim());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coords_[i] - b.coords_[i];
    return Point(std::move(c));
  }
  Point operator-() const {
    std::vector<double> c(coords_);
    for (double& x : c) x = -x;
    return Point(std::move(c));
  }

  friend bool operator==(const Point&, const Point&) = default;
  // Lexicographic order on coordinates.
  friend auto operator<=>(const Point& a, const Point& b) {
    return std::lexicographical_compare_three_way(a.coords_.begin(), a.coords_.end(),
                                                  b.coords_.begin(), b.coords_.end(),
                                                  [](double x, double y) {
                                                    return std::weak_order(x, y);
                                                  });
  }

  static void check_same_dim(const Point& a, const Point& b) {
    require(a.dim() == b.dim(), "dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                                    std::to_string(b.dim()));
  }

 private:
  void validate() const {
    require(!coords_.empty(), "point must have dimension >= 1");
    for (double x : coords_) require(std::isfinite(x), "point coordinates must be finite");
  }

  std::vector<double> coords_;
};

inline double distance(const Point& a, const Point& b) {
  Point::check_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

/// Half-open axis-aligned box prod_i [lower_i, upper_i).
class Box {
 public:
  Box(Point lower, Point upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    Point::check_same_dim(lower_, upper_);
    for (std::size_t i = 0; i < dim(); ++i)
      require(lower_[i] < upper_[i], "box must have lower < upper in every axis");
  }

  std::size_t dim() const { return lower_.dim(); }
  const Point& lower() const { return lower_; }
  const Point& upper() const { return upper_; }
  double side(std::size_t i) const { return upper_[i] - lower_[i]; }

  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= side(i);
    return v;
  }

  bool contains(const Point& x) const {
    Point::check_same_dim(x, lower_);
    for (std::size_t i = 0; i < dim(); ++i)
      if (!(lower_[i] <= x[i] && x[i] < upper_[i])) return false;
    return true;
  }

  bool contains(const Box& other) const {
    Point::check_same_dim(other.lower_, lower_);
    for (std::size_t i = 0; i < dim(); ++i)
      if (other.lower_[i] < lower_[i] || other.upper_[i] > upper_[i]) return false;
    return true;
  }

  Box translated(const Point& shift) const { return Box(lower_ + shift, upper_ + shift); }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  Point lower_;
  Point upper_;
};

/// Intersection of two half-open boxes, or nullopt when it has zero volume.
inline std::optional<Box> intersect(const Box& a, const Box& b) {
  Point::check_same_dim(a.lower(), b.lower());
  std::vector<double> lo(a.dim()), hi(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    lo[i] = std::max(a.lower()[i], b.lower()[i]);
    hi[i] = std::min(a.upper()[i], b.upper()[i]);
    if (!(lo[i] < hi[i])) return std::nullopt;
  }
  return Box(Point(std::move(lo)), Point(std::move(hi)));
}

// Volume of the intersection without materializing it.
inline double overlap_volume(const Box& a, const Box& b) {
  double v = 1.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double lo = std::max(a.lower()[i], b.lower()[i]);
    const double hi = std::min(a.upper()[i], b.upper()[i]);
    if (!(lo < hi)) return 0.0;
    v *= hi - lo;
  }
  return v;
}

/// The cube Q_h(x) = prod_i [x_i - h/2, x_i + h/2).
class Cube {
 public:
  Cube(Point center, double side) : center_(std::move(center)), side_(side) {
    require(side > 0.0 && std::isfinite(side), "cube side must be positive");
  }

  // The cube whose lower corner is `corner`, i.e. prod_i [corner_i, corner_i + side).
  static Cube from_lower(const Point& corner, double side) {
    std::vector<double> c(corner.dim());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = corner[i] + side / 2;
    return Cube(Point(std::move(c)), side);
  }

  const Point& center() const { return center_; }
  double side() const { return side_; }
  std::size_t dim() const { return center_.dim(); }

  Box box() const {
    std::vector<double> lo(dim()), hi(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      lo[i] = center_[i] - side_ / 2;
      hi[i] = center_[i] + side_ / 2;
    }
    return Box(Point(std::move(lo)), Point(std::move(hi)));
  }

  bool contains(const Point& x) const {
    Point::check_same_dim(x, center_);
    for (std::size_t i = 0; i < dim(); ++i) {
      const double lo = center_[i] - side_ / 2;
      const double hi = center_[i] + side_ / 2;
      if (!(lo <= x[i] && x[i] < hi)) return false;
    }
    return true;
  }

  double volume() const { return std::pow(side_, static_cast<double>(dim())); }

 private:
  Point center_;
  double side_;
};

}  // namespace lpt
