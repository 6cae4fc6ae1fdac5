#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "qplane/errors.hpp"

namespace qplane {

/// Deterministic Miller-Rabin, exact for all n < 2^32.
bool is_prime(uint32_t n);

/// An odd prime p with 3 <= p < 2^31.  The bound keeps every product of two
/// canonical representatives inside 64 bits before reduction.
class PrimeModulus {
 public:
  explicit PrimeModulus(uint32_t p);
  uint32_t value() const { return p_; }
  friend bool operator==(const PrimeModulus& a, const PrimeModulus& b) = default;

 private:
  uint32_t p_;
};

/// Canonical representative of a residue class mod an odd prime.
/// Immutable; all arithmetic re-canonicalizes into [0, p).
class FieldElement {
 public:
  FieldElement(uint64_t value, PrimeModulus m)
      : v_(static_cast<uint32_t>(value % m.value())), p_(m.value()) {}

  /// Accepts negative inputs, e.g. from_int(-1, p) == p - 1.
  static FieldElement from_int(int64_t value, PrimeModulus m);

  uint32_t value() const { return v_; }
  uint32_t modulus() const { return p_; }
  bool is_zero() const { return v_ == 0; }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
  friend std::strong_ordering operator<=>(const FieldElement&, const FieldElement&) = default;

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator/(const FieldElement& o) const;  // DivisionByZero
  FieldElement operator-() const;

  FieldElement pow(uint64_t e) const;
  FieldElement inverse() const;  // DivisionByZero on 0

  std::string str() const;  // canonical decimal representative

 private:
  FieldElement() : v_(0), p_(0) {}
  static FieldElement raw(uint32_t v, uint32_t p) {
    FieldElement e;
    e.v_ = v;
    e.p_ = p;
    return e;
  }
  void check_same(const FieldElement& o) const;

  uint32_t v_;
  uint32_t p_;
};

/// Legendre symbol by Euler's criterion: 0 iff a = 0, +1 for nonzero
/// squares, -1 otherwise.
int legendre(const FieldElement& a);

struct SqrtPair {
  FieldElement root;        // canonical: the smaller of the two representatives
  FieldElement minus_root;  // p - root (equal to root only for a = 0)
};

/// Both square roots of a, or nullopt when a is a nonresidue.  Exhaustive
/// scan below p = 1000 (the trivially-correct baseline), Tonelli-Shanks above.
std::optional<SqrtPair> sqrt(const FieldElement& a);

/// Smallest positive quadratic nonresidue of p; fixed generator of the
/// quadratic extension below.
uint32_t smallest_nonresidue(PrimeModulus m);

/// Some (x, y) with x^2 + y^2 = c; always solvable over F_p, p odd.
/// Deterministic: smallest x admitting a solution, then the canonical root y.
std::pair<FieldElement, FieldElement> sum_of_two_squares(const FieldElement& c);

/// Element a0 + a1*w of F_{p^2} where w^2 = ns, the smallest nonresidue of p.
class QuadExtElement {
 public:
  QuadExtElement(FieldElement a0, FieldElement a1);

  const FieldElement& base() const { return a0_; }
  const FieldElement& ext() const { return a1_; }
  uint32_t modulus() const { return a0_.modulus(); }
  uint32_t nonresidue() const { return ns_; }
  bool in_base_field() const { return a1_.is_zero(); }
  bool is_zero() const { return a0_.is_zero() && a1_.is_zero(); }

  friend bool operator==(const QuadExtElement&, const QuadExtElement&) = default;

  QuadExtElement operator+(const QuadExtElement& o) const;
  QuadExtElement operator-(const QuadExtElement& o) const;
  QuadExtElement operator*(const QuadExtElement& o) const;
  QuadExtElement operator-() const;

  std::string str() const;  // "a0" or "a0 + a1*w"

 private:
  void check_same(const QuadExtElement& o) const;

  FieldElement a0_, a1_;
  uint32_t ns_;
};

/// A square root of a in the quadratic extension F_{p^2}; lands in the base
/// field exactly when a is a residue.  Every element has one.
QuadExtElement quad_ext_sqrt(const FieldElement& a);

}  // namespace qplane
