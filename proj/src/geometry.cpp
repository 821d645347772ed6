#include "latids/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace latids {

std::int64_t linf_norm(const Point& p) {
  std::int64_t m = 0;
  for (int i = 0; i < p.dim(); ++i) m = std::max(m, std::abs(p[i]));
  return m;
}

std::int64_t linf_dist(const Point& a, const Point& b) { return linf_norm(a - b); }

std::int64_t l1_dist(const Point& a, const Point& b) {
  std::int64_t s = 0;
  for (int i = 0; i < a.dim(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

Box::Box(Point lo, Point hi) : lo_(lo), hi_(hi) {
  if (lo.dim() != hi.dim()) throw std::invalid_argument("Box: corner dimensions differ");
  for (int i = 0; i < lo.dim(); ++i)
    if (lo[i] > hi[i]) throw std::invalid_argument("Box: lo > hi");
}

Box Box::cube(int d, std::int64_t side) {
  if (side < 1) throw std::invalid_argument("Box::cube: side must be >= 1");
  return Box(Point::zero(d), Point::constant(d, side - 1));
}

Box Box::cube_at(const Point& a, std::int64_t side) {
  return cube(a.dim(), side).translated(a);
}

std::int64_t Box::volume() const {
  std::int64_t v = 1;
  for (int i = 0; i < dim(); ++i) v *= side(i);
  return v;
}

bool Box::contains(const Point& p) const {
  for (int i = 0; i < dim(); ++i)
    if (p[i] < lo_[i] || p[i] > hi_[i]) return false;
  return true;
}

bool Box::contains(const Box& o) const { return contains(o.lo_) && contains(o.hi_); }

bool Box::intersects(const Box& o) const {
  for (int i = 0; i < dim(); ++i)
    if (o.hi_[i] < lo_[i] || o.lo_[i] > hi_[i]) return false;
  return true;
}

std::optional<Box> Box::shrunk(std::int64_t s) const {
  Point lo = lo_, hi = hi_;
  for (int i = 0; i < dim(); ++i) {
    lo[i] += s;
    hi[i] -= s;
    if (lo[i] > hi[i]) return std::nullopt;
  }
  return Box(lo, hi);
}

Box Box::grown(std::int64_t s) const {
  Point lo = lo_, hi = hi_;
  for (int i = 0; i < dim(); ++i) {
    lo[i] -= s;
    hi[i] += s;
  }
  return Box(lo, hi);
}

std::int64_t Box::index_of(const Point& p) const {
  std::int64_t idx = 0;
  for (int i = 0; i < dim(); ++i) idx = idx * side(i) + (p[i] - lo_[i]);
  return idx;
}

Point Box::point_at(std::int64_t index) const {
  Point p = lo_;
  for (int i = dim() - 1; i >= 0; --i) {
    p[i] = lo_[i] + index % side(i);
    index /= side(i);
  }
  return p;
}

Region Region::empty(int d) {
  Region r;
  r.dim_ = d;
  return r;
}

Region Region::box(const Box& b) {
  Region r;
  r.dim_ = b.dim();
  r.box_ = b;
  return r;
}

Region Region::of_points(std::vector<Point> pts) {
  Region r;
  if (pts.empty()) throw std::invalid_argument("Region::of_points: empty; use Region::empty(d)");
  r.dim_ = pts.front().dim();
  for (const auto& p : pts)
    if (p.dim() != r.dim_) throw std::invalid_argument("Region: mixed dimensions");
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  r.index_.reserve(pts.size() * 2);
  for (const auto& p : pts) r.index_.insert(p);
  r.pts_ = std::move(pts);
  return r;
}

std::int64_t Region::size() const {
  return box_ ? box_->volume() : static_cast<std::int64_t>(pts_.size());
}

bool Region::contains(const Point& p) const {
  if (p.dim() != dim_) return false;
  if (box_) return box_->contains(p);
  return index_.find(p) != index_.end();
}

Box Region::bounding_box() const {
  if (box_) return *box_;
  if (pts_.empty()) throw std::logic_error("Region::bounding_box: empty region");
  Point lo = pts_.front(), hi = pts_.front();
  for (const auto& p : pts_)
    for (int i = 0; i < dim_; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  return Box(lo, hi);
}

std::vector<Point> Region::points() const {
  if (!box_) return pts_;
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(box_->volume()));
  box_->for_each([&](const Point& p) { out.push_back(p); });
  return out;
}

Region Region::translated(const Point& t) const {
  if (box_) return Region::box(box_->translated(t));
  if (pts_.empty()) return *this;
  std::vector<Point> moved;
  moved.reserve(pts_.size());
  for (const auto& p : pts_) moved.push_back(p + t);
  return Region::of_points(std::move(moved));
}

namespace {

// Distance from p to the region is at most s iff the cube of radius s
// around p meets the region.
bool within_of_region(const Point& p, const Region& q, std::int64_t s) {
  if (q.as_box()) {
    const Box& b = *q.as_box();
    for (int i = 0; i < b.dim(); ++i) {
      std::int64_t lo = std::max(p[i] - s, b.lo()[i]);
      if (lo > std::min(p[i] + s, b.hi()[i])) return false;
    }
    return true;
  }
  bool hit = false;
  Box::cube_at(p + Point::constant(p.dim(), -s), 2 * s + 1).for_each([&](const Point& y) {
    if (!hit && q.contains(y)) hit = true;
  });
  return hit;
}

bool within_of_complement(const Point& p, const Region& q, std::int64_t s) {
  if (q.as_box()) {
    const Box& b = *q.as_box();
    for (int i = 0; i < b.dim(); ++i)
      if (p[i] - s < b.lo()[i] || p[i] + s > b.hi()[i]) return true;
    return false;
  }
  const Box probe = Box::cube_at(p + Point::constant(p.dim(), -s), 2 * s + 1);
  bool found = false;
  probe.for_each([&](const Point& y) {
    if (!found && !q.contains(y)) found = true;
  });
  return found;
}

}  // namespace

Region s_boundary(const Region& q, std::int64_t s) {
  if (s < 1) throw std::invalid_argument("s_boundary: S must be >= 1");
  if (q.is_empty()) return Region::empty(q.dim());
  std::vector<Point> out;
  const Box hull = q.bounding_box().grown(s);
  hull.for_each([&](const Point& p) {
    if (q.contains(p)) {
      if (within_of_complement(p, q, s)) out.push_back(p);
    } else {
      if (within_of_region(p, q, s)) out.push_back(p);
    }
  });
  if (out.empty()) return Region::empty(q.dim());
  return Region::of_points(std::move(out));
}

std::int64_t box_boundary_size(const Box& q, std::int64_t s) {
  if (s == 0) return 0;
  std::int64_t outer = 1, core = 1;
  for (int i = 0; i < q.dim(); ++i) {
    outer *= q.side(i) + 2 * s;
    core *= std::max<std::int64_t>(0, q.side(i) - 2 * s);
  }
  return outer - core;
}

std::int64_t s_boundary_size(const Region& q, std::int64_t s) {
  if (s == 0 || q.is_empty()) return 0;
  if (q.as_box()) return box_boundary_size(*q.as_box(), s);
  return s_boundary(q, s).size();
}

Region interior_core(const Region& q, std::int64_t s) {
  if (s < 0) throw std::invalid_argument("interior_core: S must be >= 0");
  if (s == 0 || q.is_empty()) return q;
  if (q.as_box()) {
    auto b = q.as_box()->shrunk(s);
    return b ? Region::box(*b) : Region::empty(q.dim());
  }
  std::vector<Point> out;
  q.for_each([&](const Point& p) {
    if (!within_of_complement(p, q, s)) out.push_back(p);
  });
  if (out.empty()) return Region::empty(q.dim());
  return Region::of_points(std::move(out));
}

Rational van_hove_ratio(const Region& q, std::int64_t s) {
  if (q.is_empty()) throw std::invalid_argument("van_hove_ratio: empty region");
  return Rational(s_boundary_size(q, s), q.size());
}

CoveringGrid covering_grid(const Region& q, std::int64_t m, const Point& x) {
  if (m < 1) throw std::invalid_argument("covering_grid: M must be >= 1");
  CoveringGrid grid;
  grid.side = m;
  grid.offset = x;
  if (q.is_empty()) return grid;

  const int d = q.dim();
  const Box hull = q.bounding_box();
  // Smallest grid-aligned window of shifts whose cubes can reach the hull.
  Point lo = Point::zero(d), hi = Point::zero(d);
  for (int i = 0; i < d; ++i) {
    // a <= hull.hi and a+m-1 >= hull.lo, a in x + mZ
    auto floor_div = [](std::int64_t a, std::int64_t b) {
      return a >= 0 ? a / b : -((-a + b - 1) / b);
    };
    lo[i] = x[i] + m * floor_div(hull.lo()[i] - (m - 1) - x[i] + m - 1, m);
    while (lo[i] + m - 1 < hull.lo()[i]) lo[i] += m;
    hi[i] = x[i] + m * floor_div(hull.hi()[i] - x[i], m);
  }

  std::vector<Point> shifts;
  Point a = lo;
  while (true) {
    shifts.push_back(a);
    int axis = d - 1;
    while (axis >= 0) {
      if (a[axis] + m <= hi[axis]) {
        a[axis] += m;
        break;
      }
      a[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }

  for (const auto& shift : shifts) {
    const Box cell = Box::cube_at(shift, m);
    if (q.as_box()) {
      if (!cell.intersects(*q.as_box())) continue;
      if (q.as_box()->contains(cell))
        grid.interior.push_back(shift);
      else
        grid.partial.push_back(shift);
    } else {
      std::int64_t inside = 0;
      cell.for_each([&](const Point& p) { inside += q.contains(p) ? 1 : 0; });
      if (inside == 0) continue;
      if (inside == cell.volume())
        grid.interior.push_back(shift);
      else
        grid.partial.push_back(shift);
    }
  }
  return grid;
}

std::int64_t linf_ball_volume(int d, std::int64_t r) {
  std::int64_t v = 1;
  for (int i = 0; i < d; ++i) v *= 2 * r + 1;
  return v;
}

}  // namespace latids
