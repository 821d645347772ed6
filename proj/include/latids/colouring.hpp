#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "latids/geometry.hpp"
#include "latids/rational.hpp"

namespace latids {

/// A colour token. `payload` carries the on-site potential value for operator
/// construction; +infinity marks a deleted site.
struct Token {
  std::string name;
  double payload = 0.0;

  bool deleted() const { return payload == std::numeric_limits<double>::infinity(); }
};

/// Finite ordered set of colour tokens. The order is part of the contract: it
/// fixes the byte encoding of patterns.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<Token> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  const Token& token(int index) const { return tokens_.at(index); }
  int index_of(const std::string& name) const;

 private:
  std::vector<Token> tokens_;
};

/// A total map Z^d -> alphabet index. Evaluation is pure: same point, same
/// token, forever. Concrete rules are closures over immutable state.
class Colouring {
 public:
  Colouring() = default;
  Colouring(int d, Alphabet alphabet, std::function<int(const Point&)> rule,
            std::string descriptor);

  int dim() const { return d_; }
  const Alphabet& alphabet() const { return alphabet_; }
  int at(const Point& p) const { return rule_(p); }
  const std::string& descriptor() const { return descriptor_; }

 private:
  int d_ = 0;
  Alphabet alphabet_;
  std::function<int(const Point&)> rule_;
  std::string descriptor_;
};

/// Single-token colouring (the fully translation-invariant case).
Colouring make_trivial(int d);

/// table assigns an alphabet index to every cell of the cube of side
/// `period` (row-major); the colouring repeats it with period N per axis.
Colouring make_periodic(int d, std::int64_t period, std::vector<int> table, Alphabet alphabet);

/// The coordinate colouring x -> x mod N: one token per cell of the period
/// cube, all payloads zero.
Colouring make_periodic_coordinates(int d, std::int64_t period);

/// Seeded i.i.d. random field: the token at x is a pure function of
/// (seed, x) through a counter-based generator mapped by `weights`
/// (a probability vector over the alphabet, validated to sum to 1).
Colouring make_percolation(int d, Alphabet alphabet, std::vector<double> weights,
                           std::uint64_t seed);

/// Characteristic colouring of the visible lattice points: token 1 at the
/// origin and wherever gcd(|x_1|,...,|x_d|) = 1, token 0 elsewhere.
Colouring make_visible(int d);

/// Pairs two colourings over the same Z^d. The product token's payload is the
/// sum of the factors' payloads (+inf absorbs, so deleted sites stay deleted).
Colouring make_product(const Colouring& a, const Colouring& b);

/// Colour assignment on the cube of side M at the origin, stored row-major as
/// alphabet indices (one byte per site; alphabets are capped at 256 tokens).
class Pattern {
 public:
  Pattern() = default;
  Pattern(int d, std::int64_t side, std::vector<std::uint8_t> values);

  int dim() const { return d_; }
  std::int64_t side() const { return side_; }
  const std::vector<std::uint8_t>& values() const { return values_; }
  std::uint8_t at_offset(const Point& offset) const;
  std::string hex() const;

  bool operator==(const Pattern& o) const {
    return d_ == o.d_ && side_ == o.side_ && values_ == o.values_;
  }
  bool operator<(const Pattern& o) const;

 private:
  int d_ = 0;
  std::int64_t side_ = 0;
  std::vector<std::uint8_t> values_;
};

struct PatternHash {
  std::size_t operator()(const Pattern& p) const;
};

/// The pattern of Lambda on the cube of side M anchored at x (shifted back to
/// the origin).
Pattern pattern_at(const Colouring& lambda, const Point& x, std::int64_t side);

/// Number of x in Q with x + C_M inside Q at which the translated pattern
/// matches the colouring. Independent of pattern_at (direct compare loop).
std::int64_t count_occurrences(const Pattern& p, const Colouring& lambda, const Region& q);

struct PatternStats {
  std::int64_t count = 0;
  Point first_occurrence;
  std::optional<Point> second_occurrence;
};

/// Occurrence counts of every side-M pattern present in Q, one scan.
struct FrequencyTable {
  std::int64_t side = 0;
  std::int64_t region_volume = 0;
  /// #{x : x + C_M inside Q}; equals the sum of all counts.
  std::int64_t positions = 0;
  std::unordered_map<Pattern, PatternStats, PatternHash> entries;

  Rational frequency(const Pattern& p) const;
  /// Entries sorted by pattern bytes, for deterministic output.
  std::vector<std::pair<Pattern, PatternStats>> sorted() const;
};

FrequencyTable empirical_frequencies(const Colouring& lambda, std::int64_t side, const Region& q);

}  // namespace latids
