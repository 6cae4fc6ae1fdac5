#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qplane/field.hpp"

namespace qplane {

/// A point of F_p^d, d >= 1.  Immutable; all coordinates share one modulus.
class Point {
 public:
  explicit Point(std::vector<FieldElement> coords);
  static Point of(PrimeModulus m, std::initializer_list<int64_t> coords);

  size_t dim() const { return coords_.size(); }
  uint32_t modulus() const { return coords_[0].modulus(); }
  const FieldElement& operator[](size_t i) const { return coords_[i]; }
  const std::vector<FieldElement>& coords() const { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;
  friend std::strong_ordering operator<=>(const Point&, const Point&) = default;

  Point operator+(const Point& o) const;
  Point operator-(const Point& o) const;
  Point operator-() const;

  std::string str() const;  // "a,b,..."

 private:
  std::vector<FieldElement> coords_;
};

Point operator*(const FieldElement& s, const Point& x);

/// The square-norm distance sum (u_i - v_i)^2; stays in the field, no root.
FieldElement dist(const Point& u, const Point& v);

/// (a1, a2) -> (a2, -a1); plane only.
Point perp(const Point& a);

/// Deduplicated, lexicographically sorted point set with its generator
/// provenance.  Immutable after construction.
class PointSet {
 public:
  PointSet(PrimeModulus m, int d, std::vector<Point> pts, std::string provenance,
           uint64_t seed);

  uint32_t modulus() const { return p_; }
  int dim() const { return d_; }
  size_t size() const { return pts_.size(); }
  const std::vector<Point>& points() const { return pts_; }
  const std::string& provenance() const { return provenance_; }
  uint64_t seed() const { return seed_; }
  bool contains(const Point& x) const;

  std::string serialize() const;  // the point-list file format
  void save(const std::filesystem::path& path) const;

 private:
  uint32_t p_;
  int d_;
  std::vector<Point> pts_;
  std::string provenance_;
  uint64_t seed_;
};

/// All distances dist(x, y) over ordered pairs of E, sorted ascending.
/// Includes 0 from the diagonal pairs unless include_diagonal is false.
std::vector<FieldElement> distance_set(const PointSet& E, bool include_diagonal = true);

/// Generator grammar: all | random:size=N | list:file=PATH | product:A;B |
/// isotropic.  Deterministic for fixed (spec, p, d, seed).
PointSet generate(const std::string& spec, PrimeModulus m, int d, uint64_t seed);

/// Parses the one-point-per-line format ('#' comments, comma-separated
/// canonical representatives).
std::vector<Point> load_point_list(const std::filesystem::path& path, PrimeModulus m, int d);

}  // namespace qplane
