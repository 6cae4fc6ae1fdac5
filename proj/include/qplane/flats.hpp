#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qplane/plane.hpp"

namespace qplane {

/// A translate of a linear k-subspace of F_q^d in canonical form: direction
/// basis in reduced row echelon form with strictly increasing pivots, base
/// point with all pivot coordinates zeroed.  Two flats are equal as point
/// sets iff their canonical forms are componentwise identical.
class Flat {
 public:
  /// Canonicalizes arbitrary generators; k = rank of the span.
  static Flat from_generators(PrimeModulus m, int d,
                              const std::vector<std::vector<FieldElement>>& directions,
                              const std::vector<FieldElement>& base);

  int ambient_dim() const { return d_; }
  int flat_dim() const { return static_cast<int>(basis_.size()); }
  uint32_t modulus() const { return p_; }
  const std::vector<std::vector<uint32_t>>& basis() const { return basis_; }
  const std::vector<uint32_t>& base() const { return base_; }

  bool contains_point(const Point& x) const;
  bool contains_flat(const Flat& other) const;  // other as a subset of this
  std::vector<Point> points() const;            // all q^k points

  std::string str() const;  // "base | row; row; ..."

  friend bool operator==(const Flat&, const Flat&) = default;
  friend std::strong_ordering operator<=>(const Flat&, const Flat&) = default;

 private:
  Flat(uint32_t p, int d, std::vector<std::vector<uint32_t>> basis, std::vector<uint32_t> base)
      : p_(p), d_(d), basis_(std::move(basis)), base_(std::move(base)) {}

  uint32_t p_;
  int d_;
  std::vector<std::vector<uint32_t>> basis_;  // k rows of length d, RREF
  std::vector<uint32_t> base_;                // length d, pivot coords zero

  friend std::vector<Flat> enumerate_flats(PrimeModulus, int, int);
};

/// Number of k-flats (translates of linear k-subspaces) of F_q^h:
/// (q^h / q^k) * prod_{i<k} (q^h - q^i) / (q^k - q^i).  Exact.
uint64_t flat_count(int h, int k, PrimeModulus m);

/// Number of h-flats of F_q^d containing a fixed k-flat; equivalently how
/// often a k-flat is re-counted when enumerating k-flats inside every
/// h-flat.  Computed as flat_count(h,k) * flat_count(d,h) / flat_count(d,k)
/// and cross-checked against the telescoping product
/// prod_{i=k}^{h-1} (q^{d-i} - 1) / (q^{h-i} - 1).
uint64_t flats_through_flat(int d, int h, int k, PrimeModulus m);

struct ThroughCounts {
  uint64_t flats_through_point;     // (k+1)-flats through a fixed point
  uint64_t superflats_through_flat; // (k+1)-flats containing a fixed k-flat
};
ThroughCounts through_counts(int d, int k, PrimeModulus m);

/// Every k-flat of F_q^d exactly once, in canonical enumeration order.
std::vector<Flat> enumerate_flats(PrimeModulus m, int d, int k);

struct IncidenceReport {
  uint32_t q = 0;
  int d = 0;
  int k = 0;
  uint64_t num_flats = 0;
  uint64_t num_points = 0;
  uint64_t incidences = 0;
  uint64_t main_num = 0;  // main term as the exact rational main_num / main_den
  uint64_t main_den = 1;
  double main_term = 0.0;
  double error_term = 0.0;  // q^{k(d-k)/2} * sqrt(|M||N|)
  double slack = 0.0;       // (I - main) / error
};

void to_json(nlohmann::json& j, const IncidenceReport& r);

enum class IncidenceStrategy { Auto, MembershipScan, PointExpansion };

/// Exact incidence count between a family of flats and a point set, with the
/// main/error/slack fields of the point-subspace incidence bound.
IncidenceReport count_incidences(const std::vector<Flat>& flats, const std::vector<Point>& points,
                                 IncidenceStrategy strategy = IncidenceStrategy::Auto);

/// Sum over all (k+1)-flats p of the incidences (l, x) with l in the family,
/// l inside p, and x on l.  Equals I * (q^{d-k} - 1)/(q - 1).
uint64_t enclosing_incidence_sum(const std::vector<Flat>& flats, const std::vector<Point>& points);

}  // namespace qplane
