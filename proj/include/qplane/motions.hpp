#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "qplane/plane.hpp"

namespace qplane {

/// Element of SO(2,q): the matrix [[a, -b], [b, a]] with a^2 + b^2 = 1.
class Rotation {
 public:
  Rotation(FieldElement a, FieldElement b);
  static Rotation identity(PrimeModulus m);

  const FieldElement& a() const { return a_; }
  const FieldElement& b() const { return b_; }
  uint32_t modulus() const { return a_.modulus(); }
  bool is_identity() const;

  Point apply(const Point& x) const;
  Rotation compose(const Rotation& o) const;  // this after o
  Rotation inverse() const;

  friend bool operator==(const Rotation&, const Rotation&) = default;
  friend std::strong_ordering operator<=>(const Rotation&, const Rotation&) = default;

 private:
  FieldElement a_, b_;
};

/// All of SO(2,q) in canonical (a, b) order; size q+1 when q = 3 mod 4 and
/// q-1 when q = 1 mod 4.
std::vector<Rotation> enumerate_so2(PrimeModulus m);

/// The rational parametrization F_q -> SO(2,q) \ {I} sending r to the
/// rotation with a = (r^2-1)/(r^2+1), b = 2r/(r^2+1).  A bijection when
/// q = 3 mod 4 (r^2 + 1 never vanishes there); rejected otherwise.
Rotation parametrize_rotation(const FieldElement& r);

/// Inverse of the parametrization: r = b / (1 - a); nullopt for the identity.
std::optional<FieldElement> rotation_parameter(const Rotation& rot);

/// x -> rot*x + trans.
class RigidMotion {
 public:
  RigidMotion(Rotation rot, Point trans);
  static RigidMotion identity(PrimeModulus m);

  const Rotation& rot() const { return rot_; }
  const Point& trans() const { return trans_; }
  bool is_translation() const { return rot_.is_identity(); }

  Point apply(const Point& x) const;
  RigidMotion compose(const RigidMotion& o) const;  // this after o
  RigidMotion inverse() const;

  friend bool operator==(const RigidMotion&, const RigidMotion&) = default;
  friend std::strong_ordering operator<=>(const RigidMotion&, const RigidMotion&) = default;

 private:
  Rotation rot_;
  Point trans_;
};

/// All q^2 * |SO(2,q)| motions, for desk-scale group checks.
std::vector<RigidMotion> enumerate_motions(PrimeModulus m);

/// The coordinate (center, r) in F_q^3 of the non-translation motion that
/// rotates by the parametrized angle r about center.  Only defined for
/// q = 3 mod 4, where these q^3 points biject with the non-translations.
class ScrewPoint {
 public:
  ScrewPoint(Point center, FieldElement r);

  const Point& center() const { return center_; }
  const FieldElement& r() const { return r_; }
  uint32_t modulus() const { return r_.modulus(); }
  std::array<FieldElement, 3> coords() const { return {center_[0], center_[1], r_}; }

  Point apply(const Point& x) const;  // theta(x - center) + center
  RigidMotion to_motion() const;

  friend bool operator==(const ScrewPoint&, const ScrewPoint&) = default;
  friend std::strong_ordering operator<=>(const ScrewPoint&, const ScrewPoint&) = default;

 private:
  Point center_;
  FieldElement r_;
};

/// Screw coordinates of a motion; nullopt for translations.
std::optional<ScrewPoint> screw_from_motion(const RigidMotion& f);

/// The unique screw point s with s(x1) = x2 and s(y1) = y2, given equal
/// segment lengths and x1 - y1 != x2 - y2.  Throws LengthMismatch /
/// TranslationOnly / WrongResidueClass.
ScrewPoint motion_between_segments(const Point& x1, const Point& y1, const Point& x2,
                                   const Point& y2);

/// Same, but nullopt for the translation-only case (x1 - y1 == x2 - y2).
std::optional<ScrewPoint> try_motion_between_segments(const Point& x1, const Point& y1,
                                                      const Point& x2, const Point& y2);

/// The line in F_q^3 of screw points mapping x to y:
/// base ((x+y)/2, 0), direction ((x-y)^perp / 2, 1).
class PairLine {
 public:
  PairLine(std::array<FieldElement, 3> base, std::array<FieldElement, 3> dir);

  const std::array<FieldElement, 3>& base() const { return base_; }
  const std::array<FieldElement, 3>& dir() const { return dir_; }

  bool contains(const ScrewPoint& s) const;
  std::vector<ScrewPoint> points() const;  // exactly q of them

  friend bool operator==(const PairLine&, const PairLine&) = default;

 private:
  std::array<FieldElement, 3> base_, dir_;
};

PairLine pair_line(const Point& x, const Point& y);

struct MotionAuditReport {
  uint32_t q = 0;
  uint64_t checks_run = 0;
  std::vector<std::string> violations;
  double elapsed_ms = 0.0;
};

void to_json(nlohmann::json& j, const MotionAuditReport& r);

/// Exhaustively verifies, for every anchor: the lines toward a fixed target
/// partition F_q^3, and the lines from a fixed source do too.
MotionAuditReport line_family_audit(PrimeModulus m);

}  // namespace qplane
