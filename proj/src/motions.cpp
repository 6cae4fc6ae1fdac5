#include "qplane/motions.hpp"

#include <chrono>

namespace qplane {

namespace {

void require_3_mod_4(uint32_t p, const char* what) {
  if (p % 4 != 1) return;
  throw WrongResidueClass(std::string(what) + " requires q = 3 mod 4; got q = " +
                          std::to_string(p) + " and -1 is a square there");
}

}  // namespace

Rotation::Rotation(FieldElement a, FieldElement b) : a_(a), b_(b) {
  if (a.modulus() != b.modulus()) throw ModulusMismatch("rotation entries over different primes");
  if (a * a + b * b != FieldElement(1, PrimeModulus(a.modulus()))) {
    throw Error("rotation entries must satisfy a^2 + b^2 = 1");
  }
}

Rotation Rotation::identity(PrimeModulus m) {
  return Rotation(FieldElement(1, m), FieldElement(0, m));
}

bool Rotation::is_identity() const {
  return a_.value() == 1 && b_.value() == 0;
}

Point Rotation::apply(const Point& x) const {
  if (x.dim() != 2) throw DimensionMismatch("rotations act on the plane");
  return Point({a_ * x[0] - b_ * x[1], b_ * x[0] + a_ * x[1]});
}

Rotation Rotation::compose(const Rotation& o) const {
  // Same multiplication rule as (a + bi)(c + di).
  return Rotation(a_ * o.a_ - b_ * o.b_, a_ * o.b_ + b_ * o.a_);
}

Rotation Rotation::inverse() const { return Rotation(a_, -b_); }

std::vector<Rotation> enumerate_so2(PrimeModulus m) {
  std::vector<Rotation> out;
  const FieldElement one(1, m);
  for (uint32_t a = 0; a < m.value(); ++a) {
    FieldElement fa(a, m);
    FieldElement b2 = one - fa * fa;
    if (auto roots = sqrt(b2)) {
      out.emplace_back(fa, roots->root);
      if (roots->root != roots->minus_root) out.emplace_back(fa, roots->minus_root);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Rotation parametrize_rotation(const FieldElement& r) {
  const PrimeModulus m(r.modulus());
  require_3_mod_4(m.value(), "the rotation parametrization");
  const FieldElement one(1, m);
  FieldElement den = r * r + one;  // never 0 when q = 3 mod 4
  FieldElement a = (r * r - one) / den;
  FieldElement b = (FieldElement(2, m) * r) / den;
  return Rotation(a, b);
}

std::optional<FieldElement> rotation_parameter(const Rotation& rot) {
  if (rot.is_identity()) return std::nullopt;
  const PrimeModulus m(rot.modulus());
  return rot.b() / (FieldElement(1, m) - rot.a());
}

RigidMotion::RigidMotion(Rotation rot, Point trans) : rot_(rot), trans_(std::move(trans)) {
  if (trans_.dim() != 2) throw DimensionMismatch("rigid motions act on the plane");
  if (trans_.modulus() != rot_.modulus()) throw ModulusMismatch("motion parts over different primes");
}

RigidMotion RigidMotion::identity(PrimeModulus m) {
  return RigidMotion(Rotation::identity(m), Point::of(m, {0, 0}));
}

Point RigidMotion::apply(const Point& x) const { return rot_.apply(x) + trans_; }

RigidMotion RigidMotion::compose(const RigidMotion& o) const {
  return RigidMotion(rot_.compose(o.rot_), rot_.apply(o.trans_) + trans_);
}

RigidMotion RigidMotion::inverse() const {
  Rotation ri = rot_.inverse();
  return RigidMotion(ri, -ri.apply(trans_));
}

std::vector<RigidMotion> enumerate_motions(PrimeModulus m) {
  std::vector<RigidMotion> out;
  const uint32_t p = m.value();
  for (const Rotation& rot : enumerate_so2(m)) {
    for (uint32_t tx = 0; tx < p; ++tx) {
      for (uint32_t ty = 0; ty < p; ++ty) {
        out.emplace_back(rot, Point({FieldElement(tx, m), FieldElement(ty, m)}));
      }
    }
  }
  return out;
}

ScrewPoint::ScrewPoint(Point center, FieldElement r) : center_(std::move(center)), r_(r) {
  if (center_.dim() != 2) throw DimensionMismatch("screw center must lie in the plane");
  if (center_.modulus() != r_.modulus()) throw ModulusMismatch("screw parts over different primes");
  require_3_mod_4(r_.modulus(), "the screw correspondence");
}

Point ScrewPoint::apply(const Point& x) const {
  Rotation theta = parametrize_rotation(r_);
  return theta.apply(x - center_) + center_;
}

RigidMotion ScrewPoint::to_motion() const {
  Rotation theta = parametrize_rotation(r_);
  return RigidMotion(theta, center_ - theta.apply(center_));
}

std::optional<ScrewPoint> screw_from_motion(const RigidMotion& f) {
  if (f.is_translation()) return std::nullopt;
  const PrimeModulus m(f.rot().modulus());
  require_3_mod_4(m.value(), "the screw correspondence");
  auto r = rotation_parameter(f.rot());
  // center solves (I - theta) c = trans; det(I - theta) = 2(1 - a) != 0.
  const FieldElement one(1, m);
  FieldElement a = f.rot().a(), b = f.rot().b();
  FieldElement det = (one - a) * (one - a) + b * b;
  FieldElement t0 = f.trans()[0], t1 = f.trans()[1];
  FieldElement c0 = ((one - a) * t0 - b * t1) / det;
  FieldElement c1 = (b * t0 + (one - a) * t1) / det;
  return ScrewPoint(Point({c0, c1}), *r);
}

std::optional<ScrewPoint> try_motion_between_segments(const Point& x1, const Point& y1,
                                                      const Point& x2, const Point& y2) {
  if (x1.dim() != 2 || y1.dim() != 2 || x2.dim() != 2 || y2.dim() != 2) {
    throw DimensionMismatch("segments must lie in the plane");
  }
  const PrimeModulus m(x1.modulus());
  require_3_mod_4(m.value(), "motion reconstruction");
  if (dist(x1, y1) != dist(x2, y2)) {
    throw LengthMismatch("segments have different lengths");
  }
  Point u = x1 - y1;
  Point v = x2 - y2;
  if (u == v) return std::nullopt;  // only a translation can do it

  // The screw point lies on both pair lines at a shared parameter r:
  // u + v = r * (v - u)^perp.  Equal lengths make the two sides parallel,
  // and (v - u)^perp != 0 because only the zero vector is isotropic here.
  Point lhs = u + v;
  Point rhs = perp(v - u);
  FieldElement r = rhs[0].is_zero() ? lhs[1] / rhs[1] : lhs[0] / rhs[0];
  const FieldElement inv2 = FieldElement(2, m).inverse();
  Point center = inv2 * (x1 + x2) + r * (inv2 * perp(x1 - x2));
  return ScrewPoint(center, r);
}

ScrewPoint motion_between_segments(const Point& x1, const Point& y1, const Point& x2,
                                   const Point& y2) {
  auto s = try_motion_between_segments(x1, y1, x2, y2);
  if (!s) throw TranslationOnly("x1 - y1 = x2 - y2: only a translation maps the segments");
  return *s;
}

PairLine::PairLine(std::array<FieldElement, 3> base, std::array<FieldElement, 3> dir)
    : base_(base), dir_(dir) {
  if (dir_[2].value() != 1) throw Error("pair line direction must be normalized to (*,*,1)");
}

bool PairLine::contains(const ScrewPoint& s) const {
  // Parameter along the line equals the last coordinate.
  const FieldElement& r = s.r();
  return s.center()[0] == base_[0] + r * dir_[0] && s.center()[1] == base_[1] + r * dir_[1];
}

std::vector<ScrewPoint> PairLine::points() const {
  const PrimeModulus m(base_[0].modulus());
  std::vector<ScrewPoint> out;
  out.reserve(m.value());
  for (uint32_t t = 0; t < m.value(); ++t) {
    FieldElement r(t, m);
    out.emplace_back(Point({base_[0] + r * dir_[0], base_[1] + r * dir_[1]}), r);
  }
  return out;
}

PairLine pair_line(const Point& x, const Point& y) {
  if (x.dim() != 2 || y.dim() != 2) throw DimensionMismatch("pair lines live over the plane");
  const PrimeModulus m(x.modulus());
  require_3_mod_4(m.value(), "the pair-line correspondence");
  const FieldElement inv2 = FieldElement(2, m).inverse();
  Point base = inv2 * (x + y);
  Point dir = inv2 * perp(x - y);
  const FieldElement zero(0, m), one(1, m);
  return PairLine({base[0], base[1], zero}, {dir[0], dir[1], one});
}

void to_json(nlohmann::json& j, const MotionAuditReport& r) {
  j = nlohmann::json{{"q", r.q},
                     {"checks_run", r.checks_run},
                     {"violations", r.violations},
                     {"elapsed_ms", r.elapsed_ms}};
}

MotionAuditReport line_family_audit(PrimeModulus m) {
  const auto start = std::chrono::steady_clock::now();
  const uint32_t q = m.value();
  require_3_mod_4(q, "the pair-line correspondence");
  if (q > 31) throw TooLarge("line family audit is desk-scale only (q <= 31)");

  MotionAuditReport report;
  report.q = q;

  std::vector<Point> pts;
  pts.reserve(static_cast<size_t>(q) * q);
  for (uint32_t a = 0; a < q; ++a) {
    for (uint32_t b = 0; b < q; ++b) {
      pts.push_back(Point({FieldElement(a, m), FieldElement(b, m)}));
    }
  }

  const uint64_t cube = static_cast<uint64_t>(q) * q * q;
  std::vector<uint8_t> hit(cube);
  auto encode = [q](const ScrewPoint& s) {
    return (static_cast<uint64_t>(s.center()[0].value()) * q + s.center()[1].value()) * q +
           s.r().value();
  };

  // direction = false: lines from a fixed source x over all targets y;
  // direction = true: lines toward a fixed target over all sources.
  for (int direction = 0; direction < 2; ++direction) {
    for (const Point& anchor : pts) {
      std::fill(hit.begin(), hit.end(), 0);
      uint64_t covered = 0;
      for (const Point& other : pts) {
        PairLine line = direction ? pair_line(other, anchor) : pair_line(anchor, other);
        for (const ScrewPoint& s : line.points()) {
          uint64_t idx = encode(s);
          if (hit[idx]) {
            report.violations.push_back("q=" + std::to_string(q) + " anchor=" + anchor.str() +
                                        (direction ? " (fixed target)" : " (fixed source)") +
                                        ": screw point " + other.str() +
                                        " hit twice across the family");
          } else {
            hit[idx] = 1;
            ++covered;
          }
        }
      }
      if (covered != cube) {
        report.violations.push_back("q=" + std::to_string(q) + " anchor=" + anchor.str() +
                                    (direction ? " (fixed target)" : " (fixed source)") +
                                    ": family covers " + std::to_string(covered) + " of " +
                                    std::to_string(cube) + " points");
      }
      ++report.checks_run;
    }
  }

  report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace qplane
