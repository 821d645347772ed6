#include "latids/colouring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace latids {

Alphabet::Alphabet(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw std::invalid_argument("Alphabet: must be non-empty");
  if (tokens_.size() > 256) throw std::invalid_argument("Alphabet: at most 256 tokens");
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    for (std::size_t j = i + 1; j < tokens_.size(); ++j)
      if (tokens_[i].name == tokens_[j].name)
        throw std::invalid_argument("Alphabet: duplicate token name: " + tokens_[i].name);
}

int Alphabet::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    if (tokens_[i].name == name) return static_cast<int>(i);
  throw std::invalid_argument("Alphabet: unknown token: " + name);
}

Colouring::Colouring(int d, Alphabet alphabet, std::function<int(const Point&)> rule,
                     std::string descriptor)
    : d_(d), alphabet_(std::move(alphabet)), rule_(std::move(rule)),
      descriptor_(std::move(descriptor)) {
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("Colouring: dimension out of range");
}

Colouring make_trivial(int d) {
  return Colouring(d, Alphabet({{"a", 0.0}}), [](const Point&) { return 0; }, "trivial");
}

Colouring make_periodic(int d, std::int64_t period, std::vector<int> table, Alphabet alphabet) {
  if (period < 1) throw std::invalid_argument("make_periodic: period must be >= 1");
  const Box cell = Box::cube(d, period);
  if (static_cast<std::int64_t>(table.size()) != cell.volume())
    throw std::invalid_argument("make_periodic: table must cover the period cube");
  for (int v : table)
    if (v < 0 || v >= alphabet.size())
      throw std::invalid_argument("make_periodic: table index outside alphabet");
  auto shared = std::make_shared<std::vector<int>>(std::move(table));
  auto rule = [d, period, cell, shared](const Point& x) {
    Point r = Point::zero(d);
    for (int i = 0; i < d; ++i) {
      std::int64_t m = x[i] % period;
      r[i] = m < 0 ? m + period : m;
    }
    return (*shared)[cell.index_of(r)];
  };
  return Colouring(d, std::move(alphabet), std::move(rule),
                   "periodic(N=" + std::to_string(period) + ")");
}

Colouring make_periodic_coordinates(int d, std::int64_t period) {
  const Box cell = Box::cube(d, period);
  std::vector<Token> tokens;
  tokens.reserve(static_cast<std::size_t>(cell.volume()));
  cell.for_each([&](const Point& p) {
    std::string name = "r";
    for (int i = 0; i < d; ++i) name += (i ? "_" : "") + std::to_string(p[i]);
    tokens.push_back({name, 0.0});
  });
  std::vector<int> table(static_cast<std::size_t>(cell.volume()));
  std::iota(table.begin(), table.end(), 0);
  return make_periodic(d, period, std::move(table), Alphabet(std::move(tokens)));
}

namespace {

inline std::uint64_t mix64(std::uint64_t v) {
  v ^= v >> 30;
  v *= 0xbf58476d1ce4e5b9ull;
  v ^= v >> 27;
  v *= 0x94d049bb133111ebull;
  v ^= v >> 31;
  return v;
}

// Counter-based generator: hash the seed and the coordinates, nothing else.
inline std::uint64_t site_hash(std::uint64_t seed, const Point& x) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ull);
  for (int i = 0; i < x.dim(); ++i) h = mix64(h ^ static_cast<std::uint64_t>(x[i]));
  return h;
}

}  // namespace

Colouring make_percolation(int d, Alphabet alphabet, std::vector<double> weights,
                           std::uint64_t seed) {
  if (static_cast<int>(weights.size()) != alphabet.size())
    throw std::invalid_argument("make_percolation: one weight per token required");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("make_percolation: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("make_percolation: weights must sum to 1");

  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  cumulative.back() = 1.0;
  const int n = static_cast<int>(weights.size());
  auto rule = [seed, cumulative, n](const Point& x) {
    const double u = static_cast<double>(site_hash(seed, x) >> 11) * 0x1.0p-53;
    for (int i = 0; i < n; ++i)
      if (u < cumulative[i]) return i;
    return n - 1;
  };
  return Colouring(d, std::move(alphabet), std::move(rule),
                   "percolation(seed=" + std::to_string(seed) + ")");
}

Colouring make_visible(int d) {
  Alphabet alphabet({{"invisible", 0.0}, {"visible", 0.0}});
  auto rule = [d](const Point& x) {
    std::int64_t g = 0;
    bool origin = true;
    for (int i = 0; i < d; ++i) {
      g = std::gcd(g, std::abs(x[i]));
      origin = origin && x[i] == 0;
    }
    return (origin || g == 1) ? 1 : 0;
  };
  return Colouring(d, std::move(alphabet), std::move(rule), "visible");
}

Colouring make_product(const Colouring& a, const Colouring& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("make_product: dimensions differ");
  if (a.alphabet().size() * b.alphabet().size() > 256)
    throw std::invalid_argument("make_product: product alphabet exceeds 256 tokens");
  std::vector<Token> tokens;
  for (int i = 0; i < a.alphabet().size(); ++i)
    for (int j = 0; j < b.alphabet().size(); ++j)
      tokens.push_back({a.alphabet().token(i).name + "|" + b.alphabet().token(j).name,
                        a.alphabet().token(i).payload + b.alphabet().token(j).payload});
  const int nb = b.alphabet().size();
  auto rule = [a, b, nb](const Point& x) { return a.at(x) * nb + b.at(x); };
  return Colouring(a.dim(), Alphabet(std::move(tokens)), std::move(rule),
                   "product(" + a.descriptor() + "," + b.descriptor() + ")");
}

Pattern::Pattern(int d, std::int64_t side, std::vector<std::uint8_t> values)
    : d_(d), side_(side), values_(std::move(values)) {
  std::int64_t expect = 1;
  for (int i = 0; i < d; ++i) expect *= side;
  if (static_cast<std::int64_t>(values_.size()) != expect)
    throw std::invalid_argument("Pattern: value count must equal side^d");
}

std::uint8_t Pattern::at_offset(const Point& offset) const {
  return values_[static_cast<std::size_t>(Box::cube(d_, side_).index_of(offset))];
}

std::string Pattern::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(values_.size() * 2);
  for (std::uint8_t v : values_) {
    out.push_back(digits[v >> 4]);
    out.push_back(digits[v & 0xf]);
  }
  return out;
}

bool Pattern::operator<(const Pattern& o) const {
  if (d_ != o.d_) return d_ < o.d_;
  if (side_ != o.side_) return side_ < o.side_;
  return values_ < o.values_;
}

std::size_t PatternHash::operator()(const Pattern& p) const {
  std::uint64_t h = 0xcbf29ce484222325ull ^ (static_cast<std::uint64_t>(p.side()) << 8) ^
                    static_cast<std::uint64_t>(p.dim());
  for (std::uint8_t v : p.values()) {
    h ^= v;
    h *= 0x100000001b3ull;
  }
  return static_cast<std::size_t>(h);
}

Pattern pattern_at(const Colouring& lambda, const Point& x, std::int64_t side) {
  if (side < 1) throw std::invalid_argument("pattern_at: side must be >= 1");
  std::vector<std::uint8_t> values;
  values.reserve(static_cast<std::size_t>(Box::cube(lambda.dim(), side).volume()));
  Box::cube(lambda.dim(), side).for_each([&](const Point& offset) {
    values.push_back(static_cast<std::uint8_t>(lambda.at(x + offset)));
  });
  return Pattern(lambda.dim(), side, std::move(values));
}

std::int64_t count_occurrences(const Pattern& p, const Colouring& lambda, const Region& q) {
  if (p.side() < 1) throw std::invalid_argument("count_occurrences: side must be >= 1");
  if (p.dim() != lambda.dim())
    throw std::invalid_argument("count_occurrences: dimension mismatch");
  const Box window = Box::cube(p.dim(), p.side());
  std::int64_t count = 0;
  q.for_each([&](const Point& x) {
    if (q.as_box()) {
      if (!q.as_box()->contains(window.translated(x))) return;
    } else {
      bool inside = true;
      window.for_each([&](const Point& o) {
        if (inside && !q.contains(x + o)) inside = false;
      });
      if (!inside) return;
    }
    bool match = true;
    window.for_each([&](const Point& o) {
      if (match && lambda.at(x + o) != p.at_offset(o)) match = false;
    });
    if (match) ++count;
  });
  return count;
}

Rational FrequencyTable::frequency(const Pattern& p) const {
  auto it = entries.find(p);
  return Rational(it == entries.end() ? 0 : it->second.count, region_volume);
}

std::vector<std::pair<Pattern, PatternStats>> FrequencyTable::sorted() const {
  std::vector<std::pair<Pattern, PatternStats>> out(entries.begin(), entries.end());
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

FrequencyTable empirical_frequencies(const Colouring& lambda, std::int64_t side,
                                     const Region& q) {
  if (side < 1) throw std::invalid_argument("empirical_frequencies: side must be >= 1");
  if (q.is_empty()) throw std::invalid_argument("empirical_frequencies: empty region");
  FrequencyTable table;
  table.side = side;
  table.region_volume = q.size();
  const Box window = Box::cube(lambda.dim(), side);
  q.for_each([&](const Point& x) {
    if (q.as_box()) {
      if (!q.as_box()->contains(window.translated(x))) return;
    } else {
      bool inside = true;
      window.for_each([&](const Point& o) {
        if (inside && !q.contains(x + o)) inside = false;
      });
      if (!inside) return;
    }
    ++table.positions;
    Pattern p = pattern_at(lambda, x, side);
    auto [it, fresh] = table.entries.try_emplace(std::move(p));
    it->second.count += 1;
    if (fresh) {
      it->second.first_occurrence = x;
    } else if (!it->second.second_occurrence) {
      it->second.second_occurrence = x;
    }
  });
  return table;
}

}  // namespace latids
