#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "latids/rational.hpp"

namespace latids {

/// Hard cap on the lattice dimension. Everything in this library works for
/// arbitrary finite d; the cap just buys inline storage for points.
inline constexpr int kMaxDim = 8;

/// A lattice point in Z^d, 1 <= d <= kMaxDim.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<std::int64_t> coords) {
    if (coords.size() < 1 || coords.size() > static_cast<std::size_t>(kMaxDim))
      throw std::invalid_argument("Point: dimension out of range");
    dim_ = static_cast<int>(coords.size());
    int i = 0;
    for (auto v : coords) c_[i++] = v;
  }
  explicit Point(std::span<const std::int64_t> coords) {
    if (coords.size() < 1 || coords.size() > static_cast<std::size_t>(kMaxDim))
      throw std::invalid_argument("Point: dimension out of range");
    dim_ = static_cast<int>(coords.size());
    for (int i = 0; i < dim_; ++i) c_[i] = coords[i];
  }
  static Point zero(int d) {
    Point p;
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("Point: dimension out of range");
    p.dim_ = d;
    return p;
  }
  static Point constant(int d, std::int64_t v) {
    Point p = zero(d);
    for (int i = 0; i < d; ++i) p.c_[i] = v;
    return p;
  }
  static Point unit(int d, int axis) {
    Point p = zero(d);
    p.c_[axis] = 1;
    return p;
  }

  int dim() const { return dim_; }
  std::int64_t operator[](int i) const { return c_[i]; }
  std::int64_t& operator[](int i) { return c_[i]; }
  std::span<const std::int64_t> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  friend Point operator+(const Point& a, const Point& b) {
    Point r = a;
    for (int i = 0; i < a.dim_; ++i) r.c_[i] += b.c_[i];
    return r;
  }
  friend Point operator-(const Point& a, const Point& b) {
    Point r = a;
    for (int i = 0; i < a.dim_; ++i) r.c_[i] -= b.c_[i];
    return r;
  }
  Point operator-() const {
    Point r = *this;
    for (int i = 0; i < dim_; ++i) r.c_[i] = -r.c_[i];
    return r;
  }

  bool operator==(const Point& o) const {
    if (dim_ != o.dim_) return false;
    for (int i = 0; i < dim_; ++i)
      if (c_[i] != o.c_[i]) return false;
    return true;
  }
  /// Lexicographic order; the canonical site ordering everywhere.
  std::strong_ordering operator<=>(const Point& o) const {
    if (dim_ != o.dim_) return dim_ <=> o.dim_;
    for (int i = 0; i < dim_; ++i)
      if (c_[i] != o.c_[i]) return c_[i] <=> o.c_[i];
    return std::strong_ordering::equal;
  }

 private:
  std::array<std::int64_t, kMaxDim> c_{};
  int dim_ = 0;
};

std::int64_t linf_norm(const Point& p);
std::int64_t linf_dist(const Point& a, const Point& b);
std::int64_t l1_dist(const Point& a, const Point& b);

struct PointHash {
  std::size_t operator()(const Point& p) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (int i = 0; i < p.dim(); ++i) {
      std::uint64_t v = static_cast<std::uint64_t>(p[i]) + h;
      v ^= v >> 30;
      v *= 0xbf58476d1ce4e5b9ull;
      v ^= v >> 27;
      v *= 0x94d049bb133111ebull;
      v ^= v >> 31;
      h = v;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Axis-aligned product of integer intervals, corners inclusive.
class Box {
 public:
  Box(Point lo, Point hi);
  /// C_M: the cube {0 <= x_j <= side-1}.
  static Box cube(int d, std::int64_t side);
  /// C_M(a) = a + C_M.
  static Box cube_at(const Point& a, std::int64_t side);

  int dim() const { return lo_.dim(); }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  std::int64_t side(int axis) const { return hi_[axis] - lo_[axis] + 1; }
  std::int64_t volume() const;
  bool lies_at_origin() const { return lo_ == Point::zero(dim()); }

  bool contains(const Point& p) const;
  bool contains(const Box& o) const;
  bool intersects(const Box& o) const;

  Box translated(const Point& t) const { return Box(lo_ + t, hi_ + t); }
  /// Shrink every face inward by s; empty result -> nullopt.
  std::optional<Box> shrunk(std::int64_t s) const;
  Box grown(std::int64_t s) const;

  /// Row-major (last coordinate fastest) enumeration, matching the
  /// lexicographic point order.
  std::int64_t index_of(const Point& p) const;
  Point point_at(std::int64_t index) const;

  template <class Fn>
  void for_each(Fn&& fn) const {
    Point p = lo_;
    const int d = dim();
    while (true) {
      fn(static_cast<const Point&>(p));
      int axis = d - 1;
      while (axis >= 0) {
        if (p[axis] < hi_[axis]) {
          ++p[axis];
          break;
        }
        p[axis] = lo_[axis];
        --axis;
      }
      if (axis < 0) return;
    }
  }

  bool operator==(const Box& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }

 private:
  Point lo_, hi_;
};

/// A finite subset of Z^d. Boxes are kept implicit (no materialised point
/// list); anything else is an explicit sorted point set with a hash index
/// for O(1) expected membership.
class Region {
 public:
  Region() = default;
  static Region empty(int d);
  static Region box(const Box& b);
  static Region of_points(std::vector<Point> pts);

  int dim() const { return dim_; }
  std::int64_t size() const;
  bool is_empty() const { return size() == 0; }
  bool contains(const Point& p) const;
  const std::optional<Box>& as_box() const { return box_; }
  /// Smallest box containing the region; invalid to call on empty regions.
  Box bounding_box() const;
  /// Explicit sorted point list (materialises boxes on demand).
  std::vector<Point> points() const;

  template <class Fn>
  void for_each(Fn&& fn) const {
    if (box_) {
      box_->for_each(fn);
    } else {
      for (const auto& p : pts_) fn(p);
    }
  }

  Region translated(const Point& t) const;

 private:
  int dim_ = 0;
  std::optional<Box> box_;
  std::vector<Point> pts_;  // sorted, unique; empty when box_ is set
  std::unordered_set<Point, PointHash> index_;
};

/// The S-boundary of Q: points of the complement within distance S of Q plus
/// points of Q within distance S of the complement (sup-metric distance).
Region s_boundary(const Region& q, std::int64_t s);

/// |boundary(Q, s)| without materialising it, via closed form for boxes.
std::int64_t s_boundary_size(const Region& q, std::int64_t s);

/// Closed form |boundary| for a box: prod(side+2S) - prod(max(0, side-2S)).
std::int64_t box_boundary_size(const Box& q, std::int64_t s);

/// Q_S = Q \ boundary(Q, S): points of Q farther than S from the complement.
/// S = 0 returns Q itself.
Region interior_core(const Region& q, std::int64_t s);

/// |boundary(Q,S)| / |Q| as an exact fraction.
Rational van_hove_ratio(const Region& q, std::int64_t s);

/// Disjoint covering of Q by cubes of side M shifted on the grid x + (MZ)^d.
/// `interior` lists shifts whose cube lies inside Q, `partial` those whose
/// cube meets both Q and its complement.
struct CoveringGrid {
  std::int64_t side = 0;
  Point offset;
  std::vector<Point> interior;
  std::vector<Point> partial;
};

CoveringGrid covering_grid(const Region& q, std::int64_t m, const Point& x);

/// |{y : ||y||_inf <= r}| = (2r+1)^d.
std::int64_t linf_ball_volume(int d, std::int64_t r);

}  // namespace latids
