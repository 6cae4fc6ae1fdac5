#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "qplane/plane.hpp"

namespace qplane {

/// Three prescribed squared side lengths; the symmetric functions are
/// recomputed on demand, never stored.
struct LengthTriple {
  FieldElement l1, l2, l3;

  LengthTriple(FieldElement a, FieldElement b, FieldElement c);

  FieldElement sum() const { return l1 + l2 + l3; }                        // sigma_1
  FieldElement pair_product_sum() const;                                   // sigma_2
  FieldElement discriminant() const;  // 4*sigma_2 - sigma_1^2
};

struct TriangleExistence {
  bool exists = false;
  FieldElement discriminant;
  int disc_legendre = 0;
  // Vertices (v1, v2, v3) with dist(v1,v2) = l1, dist(v2,v3) = l2,
  // dist(v3,v1) = l3; present exactly when exists.
  std::optional<std::array<Point, 3>> witness;
};

/// Decides whether a triangle with the given squared side lengths exists in
/// the plane, and constructs one when it does.  The criterion is that the
/// discriminant is a square (zero included).
TriangleExistence triangle_exists(const LengthTriple& t);

/// All apex points x3 with dist(x2, x3) = l2 and dist(x3, x1) = l3 over the
/// base segment (x1, x2); requires dist(x1, x2) != 0.  The result has size
/// 2, 1 or 0 according to the discriminant being a nonzero square, zero, or
/// a nonsquare.
std::vector<Point> extend_segment(const Point& x1, const Point& x2, const FieldElement& l2,
                                  const FieldElement& l3);

/// Symmetric d x d matrix over F_p.
class LengthMatrix {
 public:
  LengthMatrix(PrimeModulus m, int d);  // zero matrix
  static LengthMatrix from_entries(PrimeModulus m,
                                   const std::vector<std::vector<FieldElement>>& rows);

  int dim() const { return d_; }
  uint32_t modulus() const { return p_; }
  const FieldElement& at(int i, int j) const { return e_[i * d_ + j]; }
  void set(int i, int j, const FieldElement& v);  // keeps the matrix symmetric

  friend bool operator==(const LengthMatrix&, const LengthMatrix&) = default;

 private:
  uint32_t p_;
  int d_;
  std::vector<FieldElement> e_;
};

void to_json(nlohmann::json& j, const LengthMatrix& b);

/// Builds the d x d matrix of forced dot products from a (d+1) x (d+1)
/// squared-length table with zero diagonal (index 0 is the basepoint):
/// B_ii = l_{0i}, B_ij = (l_{0i} + l_{0j} - l_{ij}) / 2.
LengthMatrix length_matrix(int d, const std::vector<std::vector<FieldElement>>& table);

FieldElement determinant(const LengthMatrix& b);

enum class GramFailure { DetNonSquare, SearchExhausted };

struct GramResult {
  bool exists = false;
  // Rows of A with A * A^T = B, exactly when exists.
  std::vector<std::vector<FieldElement>> factor;
  std::optional<GramFailure> reason;
  int rank = 0;
  std::optional<FieldElement> det;
};

void to_json(nlohmann::json& j, const GramResult& r);

/// Constructive factorization B = A A^T over F_p, or a certified refusal.
/// Factors exist iff rank(B) < d, or rank(B) = d with square determinant;
/// every returned factor is verified by multiplication before returning.
GramResult gram_decompose(const LengthMatrix& b);

struct EquilateralSimplexReport {
  int d = 0;
  FieldElement side;
  LengthMatrix b;
  FieldElement det_direct;
  FieldElement det_formula;  // (d+1) * (side/2)^d
  GramResult gram;
};

void to_json(nlohmann::json& j, const EquilateralSimplexReport& r);

/// The d-simplex with all squared side lengths equal: B = (side/2)(J + I).
EquilateralSimplexReport equilateral_simplex(int d, const FieldElement& side);

struct EquilateralTableRow {
  uint32_t p = 0;
  uint32_t p_mod_12 = 0;
  bool exists_mod12_rule = false;  // p mod 12 in {1, 3, 11}
  int legendre3 = 0;
  bool exists_base_field = false;  // legendre3 >= 0
  std::optional<std::array<Point, 3>> witness;  // unit-side triangle when it exists
  QuadExtElement sqrt3_ext;  // square root of 3 in F_{p^2}; always exists
  bool ext_witness_ok = false;
};

void to_json(nlohmann::json& j, const EquilateralTableRow& r);

/// Per-prime equilateral-triangle existence for all odd p < p_max (<= 1000).
std::vector<EquilateralTableRow> equilateral_triangle_table(uint32_t p_max);

}  // namespace qplane
