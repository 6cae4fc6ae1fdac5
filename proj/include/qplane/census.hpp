#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qplane/motions.hpp"
#include "qplane/plane.hpp"

namespace qplane {

/// 2x2 orthogonal matrix over F_p, row-major [m0 m1; m2 m3].
struct OrthogonalMap {
  std::array<uint32_t, 4> m;
  bool is_rotation;  // det = +1

  Point apply(const Point& x) const;
};

/// The full orthogonal group O(2,q): rotations [[a,-b],[b,a]] plus
/// reflections [[a,b],[b,-a]] over a^2 + b^2 = 1.  Size 2|SO(2,q)|.
std::vector<OrthogonalMap> enumerate_o2(PrimeModulus m);

/// The ordered distance triple (|x1-x2|, |x2-x3|, |x3-x1|).
std::array<FieldElement, 3> distance_triple(const Point& x1, const Point& x2, const Point& x3);

/// Canonical class representative of a 3-point configuration.
struct ClassKey {
  enum class Kind { Congruence, Translation };
  Kind kind;
  std::vector<uint32_t> canonical;

  friend bool operator==(const ClassKey&, const ClassKey&) = default;
};

/// Canonicalizer for congruence classes of plane triples: the
/// lexicographically minimal image of the anchored difference pair over the
/// full isometry group (rotations, reflections, translations) and all
/// vertex permutations.
class CongruenceKeyer {
 public:
  explicit CongruenceKeyer(PrimeModulus m);

  uint32_t modulus() const { return p_; }

  /// Packed canonical keys of one triple: the unordered-triangle key and the
  /// six ordered keys (vertex order fixed, isometries only).
  struct TriKeys {
    uint64_t unordered;
    std::array<uint64_t, 6> ordered;
  };
  TriKeys keys(uint32_t x1, uint32_t y1, uint32_t x2, uint32_t y2, uint32_t x3,
               uint32_t y3) const;

  std::array<uint32_t, 4> unpack(uint64_t key) const;

 private:
  uint32_t p_;
  std::vector<std::array<uint32_t, 4>> maps_;
  mutable std::vector<std::array<uint32_t, 2>> t21_, t31_, t32_, n21_, n31_, n32_;
};

ClassKey congruence_class_key(const Point& x1, const Point& x2, const Point& x3);

/// Translation class of an ordered n-configuration: the difference tuple
/// (x2 - x1, ..., xn - x1), flattened.
ClassKey translation_class_key(const std::vector<Point>& config);

struct TriangleCensusReport {
  uint32_t q = 0;
  std::string set_descriptor;
  uint64_t set_size = 0;
  bool include_degenerate = false;
  uint64_t class_count = 0;
  uint64_t total_class_count = 0;
  double fraction = 0.0;
  uint64_t side_triple_count = 0;   // distinct sorted distance triples
  uint64_t ordered_class_count = 0; // classes without the vertex-permutation quotient
};

void to_json(nlohmann::json& j, const TriangleCensusReport& r);

/// Directory used for the full-plane class-count cache: $QPLANE_CACHE_DIR or
/// ./.qplane-cache.
std::filesystem::path default_cache_dir();

/// Number of congruence classes of triangles attained by the full plane,
/// computed once per (q, policy) and cached on disk.
uint64_t total_congruence_classes(PrimeModulus m, bool include_degenerate,
                                  const std::optional<std::filesystem::path>& cache_dir = {});

/// Census of congruence classes of triangles determined by E.  Counts
/// distinct class keys over 3-subsets of distinct points by default, or over
/// all multisets when include_degenerate is set.
TriangleCensusReport congruence_census(const PointSet& E, bool include_degenerate = false,
                                       const std::optional<std::filesystem::path>& cache_dir = {});

struct TranslationCoverageReport {
  uint32_t q = 0;
  int d = 0;
  int n = 0;
  uint64_t set_size = 0;
  uint64_t covered = 0;  // distinct difference tuples over E^n
  uint64_t total = 0;    // q^{d(n-1)}
  double fraction = 0.0;
  bool covers_all = false;
  double lower_bound_rhs = 0.0;  // fraction^{1/n} * q^{d(1-1/n)}
  bool lower_bound_holds = false;
  bool group_model_checked = false;
  bool group_model_consistent = false;
};

void to_json(nlohmann::json& j, const TranslationCoverageReport& r);

/// Coverage of translation classes of n-configurations by E, with the
/// size lower bound |E| >= fraction^{1/n} q^{d(1-1/n)}.  When
/// check_group_model is set, also verifies the group-theoretic coverage
/// criterion (the coset test on the multitranslation group) directly.
TranslationCoverageReport translation_coverage(const PointSet& E, int n,
                                               bool check_group_model = false);

struct ElekesSharirReport {
  uint32_t q = 0;
  uint32_t ell = 0;
  uint64_t set_size = 0;
  uint64_t pair_count = 0;      // unordered pairs of E at distance ell
  double predicted = 0.0;       // |E|^2 / (2q)
  double residual = 0.0;        // pair_count - predicted
  double residual_bound = 0.0;  // sqrt(q) * |E|
  bool residual_within = false;

  bool audit_performed = false;
  std::optional<std::array<uint32_t, 4>> anchor;  // (x0, y0) coordinates
  uint64_t motion_set_size = 0;                   // |P|
  uint64_t missed_count = 0;                      // |Y|
  double missed_bound = 0.0;                      // 2 q^9 / |E|^4
  double missed_slack = 0.0;                      // |Y| / bound
  bool vacuous = false;                           // bound >= q^2
  uint64_t image_union_size = 0;                  // |E'| = q^2 - |Y|
};

void to_json(nlohmann::json& j, const ElekesSharirReport& r);

/// Distance-pair statistic: |D| against the prediction |E|^2/(2q) and the
/// residual bound sqrt(q)|E|.
ElekesSharirReport count_distance_pairs(const PointSet& E, const FieldElement& ell);

/// Full audit: collects the screw points carrying distance-ell pairs of E to
/// the anchor pair, then exhaustively tests every y in F_q^2 for whether some
/// pair line from E reaches the motion set.  Reports |Y| against 2q^9/|E|^4.
ElekesSharirReport elekes_sharir_audit(const PointSet& E, const FieldElement& ell,
                                       const std::optional<std::pair<Point, Point>>& anchor = {});

}  // namespace qplane
