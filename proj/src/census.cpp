#include "qplane/census.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <unordered_set>

namespace qplane {

namespace {

constexpr uint64_t kCensusGuard = 100'000'000;
constexpr const char* kCacheVersion = "qplane-cache/1";

uint64_t pow_u64(uint64_t b, int e) {
  uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

struct RawPt {
  uint32_t x, y;
};

std::vector<RawPt> raw_points(const PointSet& E) {
  std::vector<RawPt> out;
  out.reserve(E.size());
  for (const Point& pt : E.points()) out.push_back({pt[0].value(), pt[1].value()});
  return out;
}

}  // namespace

Point OrthogonalMap::apply(const Point& x) const {
  if (x.dim() != 2) throw DimensionMismatch("orthogonal maps act on the plane");
  const PrimeModulus mod(x.modulus());
  const uint64_t p = x.modulus();
  uint64_t a = x[0].value(), b = x[1].value();
  return Point({FieldElement((m[0] * a + m[1] * b) % p, mod),
                FieldElement((m[2] * a + m[3] * b) % p, mod)});
}

std::vector<OrthogonalMap> enumerate_o2(PrimeModulus m) {
  std::vector<OrthogonalMap> out;
  const uint32_t p = m.value();
  for (const Rotation& r : enumerate_so2(m)) {
    uint32_t a = r.a().value(), b = r.b().value();
    out.push_back({{a, (p - b) % p, b, a}, true});          // [[a,-b],[b,a]]
    out.push_back({{a, b, b, (p - a) % p}, false});          // [[a,b],[b,-a]]
  }
  return out;
}

std::array<FieldElement, 3> distance_triple(const Point& x1, const Point& x2, const Point& x3) {
  return {dist(x1, x2), dist(x2, x3), dist(x3, x1)};
}

CongruenceKeyer::CongruenceKeyer(PrimeModulus m) : p_(m.value()) {
  if (p_ > 65535) throw TooLarge("congruence keys pack four coordinates; need q < 2^16");
  for (const OrthogonalMap& om : enumerate_o2(m)) maps_.push_back(om.m);
  const size_t n = maps_.size();
  t21_.resize(n);
  t31_.resize(n);
  t32_.resize(n);
  n21_.resize(n);
  n31_.resize(n);
  n32_.resize(n);
}

CongruenceKeyer::TriKeys CongruenceKeyer::keys(uint32_t x1, uint32_t y1, uint32_t x2, uint32_t y2,
                                               uint32_t x3, uint32_t y3) const {
  const uint64_t p = p_;
  auto sub = [p](uint32_t a, uint32_t b) { return static_cast<uint32_t>((a + p - b) % p); };
  const std::array<uint32_t, 2> d21 = {sub(x2, x1), sub(y2, y1)};
  const std::array<uint32_t, 2> d31 = {sub(x3, x1), sub(y3, y1)};
  const std::array<uint32_t, 2> d32 = {sub(x3, x2), sub(y3, y2)};

  const size_t n = maps_.size();
  for (size_t t = 0; t < n; ++t) {
    const auto& mm = maps_[t];
    auto app = [&](const std::array<uint32_t, 2>& v) -> std::array<uint32_t, 2> {
      return {static_cast<uint32_t>((static_cast<uint64_t>(mm[0]) * v[0] + static_cast<uint64_t>(mm[1]) * v[1]) % p),
              static_cast<uint32_t>((static_cast<uint64_t>(mm[2]) * v[0] + static_cast<uint64_t>(mm[3]) * v[1]) % p)};
    };
    auto neg = [p](const std::array<uint32_t, 2>& v) -> std::array<uint32_t, 2> {
      return {static_cast<uint32_t>(v[0] ? p - v[0] : 0), static_cast<uint32_t>(v[1] ? p - v[1] : 0)};
    };
    t21_[t] = app(d21);
    t31_[t] = app(d31);
    t32_[t] = app(d32);
    n21_[t] = neg(t21_[t]);
    n31_[t] = neg(t31_[t]);
    n32_[t] = neg(t32_[t]);
  }

  auto pack = [p](const std::array<uint32_t, 2>& u, const std::array<uint32_t, 2>& v) {
    return ((static_cast<uint64_t>(u[0]) * p + u[1]) * p + v[0]) * p + v[1];
  };

  TriKeys out{};
  const std::array<std::pair<const std::vector<std::array<uint32_t, 2>>*,
                             const std::vector<std::array<uint32_t, 2>>*>,
                   6>
      perms = {{{&t21_, &t31_},
                {&t31_, &t21_},
                {&n21_, &t32_},
                {&t32_, &n21_},
                {&n31_, &n32_},
                {&n32_, &n31_}}};
  uint64_t global = UINT64_MAX;
  for (size_t s = 0; s < 6; ++s) {
    uint64_t best = UINT64_MAX;
    const auto& us = *perms[s].first;
    const auto& vs = *perms[s].second;
    for (size_t t = 0; t < n; ++t) {
      best = std::min(best, pack(us[t], vs[t]));
    }
    out.ordered[s] = best;
    global = std::min(global, best);
  }
  out.unordered = global;
  return out;
}

std::array<uint32_t, 4> CongruenceKeyer::unpack(uint64_t key) const {
  std::array<uint32_t, 4> out{};
  for (int i = 3; i >= 0; --i) {
    out[i] = static_cast<uint32_t>(key % p_);
    key /= p_;
  }
  return out;
}

ClassKey congruence_class_key(const Point& x1, const Point& x2, const Point& x3) {
  if (x1.dim() != 2 || x2.dim() != 2 || x3.dim() != 2) {
    throw DimensionMismatch("congruence keys are defined for plane triples");
  }
  CongruenceKeyer keyer{PrimeModulus(x1.modulus())};
  auto keys = keyer.keys(x1[0].value(), x1[1].value(), x2[0].value(), x2[1].value(), x3[0].value(),
                         x3[1].value());
  auto vals = keyer.unpack(keys.unordered);
  return ClassKey{ClassKey::Kind::Congruence, {vals.begin(), vals.end()}};
}

ClassKey translation_class_key(const std::vector<Point>& config) {
  if (config.empty()) throw EmptySet("translation key of an empty configuration");
  std::vector<uint32_t> canonical;
  for (size_t i = 1; i < config.size(); ++i) {
    Point diff = config[i] - config[0];
    for (size_t c = 0; c < diff.dim(); ++c) canonical.push_back(diff[c].value());
  }
  return ClassKey{ClassKey::Kind::Translation, std::move(canonical)};
}

void to_json(nlohmann::json& j, const TriangleCensusReport& r) {
  j = nlohmann::json{{"q", r.q},
                     {"set", r.set_descriptor},
                     {"set_size", r.set_size},
                     {"include_degenerate", r.include_degenerate},
                     {"class_count", r.class_count},
                     {"total_class_count", r.total_class_count},
                     {"fraction", r.fraction},
                     {"side_triple_count", r.side_triple_count},
                     {"ordered_class_count", r.ordered_class_count}};
}

std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("QPLANE_CACHE_DIR")) return env;
  return ".qplane-cache";
}

namespace {

struct CensusCore {
  uint64_t classes = 0;
  uint64_t ordered = 0;
  uint64_t side_triples = 0;
};

CensusCore census_core(const std::vector<RawPt>& pts, uint32_t p, bool include_degenerate) {
  const uint64_t n = pts.size();
  if (n * n * n > kCensusGuard) throw TooLarge("census guard: |E|^3 > 1e8");
  const PrimeModulus m(p);
  CongruenceKeyer keyer(m);

  std::unordered_set<uint64_t> classes, ordered, sides;
  auto sq_dist = [p](const RawPt& a, const RawPt& b) {
    uint64_t dx = (a.x + static_cast<uint64_t>(p) - b.x) % p;
    uint64_t dy = (a.y + static_cast<uint64_t>(p) - b.y) % p;
    return static_cast<uint32_t>((dx * dx + dy * dy) % p);
  };

  auto visit = [&](size_t i, size_t j, size_t k) {
    auto keys = keyer.keys(pts[i].x, pts[i].y, pts[j].x, pts[j].y, pts[k].x, pts[k].y);
    classes.insert(keys.unordered);
    for (uint64_t okey : keys.ordered) ordered.insert(okey);
    std::array<uint32_t, 3> dd = {sq_dist(pts[i], pts[j]), sq_dist(pts[j], pts[k]),
                                  sq_dist(pts[k], pts[i])};
    std::sort(dd.begin(), dd.end());
    sides.insert((static_cast<uint64_t>(dd[0]) * p + dd[1]) * p + dd[2]);
  };

  if (include_degenerate) {
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i; j < n; ++j) {
        for (size_t k = j; k < n; ++k) visit(i, j, k);
      }
    }
  } else {
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        for (size_t k = j + 1; k < n; ++k) visit(i, j, k);
      }
    }
  }
  return CensusCore{classes.size(), ordered.size(), sides.size()};
}

std::vector<RawPt> full_plane_raw(uint32_t p) {
  std::vector<RawPt> pts;
  pts.reserve(static_cast<size_t>(p) * p);
  for (uint32_t a = 0; a < p; ++a) {
    for (uint32_t b = 0; b < p; ++b) pts.push_back({a, b});
  }
  return pts;
}

std::optional<uint64_t> read_cached_total(const std::filesystem::path& file, uint32_t q,
                                          const std::string& policy) {
  std::ifstream f(file);
  if (!f) return std::nullopt;
  std::string line;
  if (!std::getline(f, line) || line != kCacheVersion) return std::nullopt;
  bool q_ok = false, policy_ok = false;
  std::optional<uint64_t> count;
  while (std::getline(f, line)) {
    if (line == "q=" + std::to_string(q)) q_ok = true;
    if (line == "policy=" + policy) policy_ok = true;
    if (line.rfind("count=", 0) == 0) {
      try {
        count = std::stoull(line.substr(6));
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
  }
  if (!q_ok || !policy_ok) return std::nullopt;
  return count;
}

}  // namespace

uint64_t total_congruence_classes(PrimeModulus m, bool include_degenerate,
                                  const std::optional<std::filesystem::path>& cache_dir) {
  const uint32_t q = m.value();
  const std::string policy = include_degenerate ? "degenerate" : "nondegenerate";
  const std::filesystem::path dir = cache_dir.value_or(default_cache_dir());
  const std::filesystem::path file =
      dir / ("congruence-total-q" + std::to_string(q) + "-" + policy + ".txt");
  if (auto cached = read_cached_total(file, q, policy)) return *cached;

  uint64_t total = census_core(full_plane_raw(q), q, include_degenerate).classes;

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream f(file);
  if (f) {
    f << kCacheVersion << "\n"
      << "kind=congruence\n"
      << "q=" << q << "\n"
      << "policy=" << policy << "\n"
      << "count=" << total << "\n";
  }
  return total;
}

TriangleCensusReport congruence_census(const PointSet& E, bool include_degenerate,
                                       const std::optional<std::filesystem::path>& cache_dir) {
  if (E.dim() != 2) throw DimensionMismatch("triangle census runs over the plane");
  const PrimeModulus m(E.modulus());
  TriangleCensusReport rep;
  rep.q = E.modulus();
  rep.set_descriptor = E.provenance();
  rep.set_size = E.size();
  rep.include_degenerate = include_degenerate;

  auto core = census_core(raw_points(E), E.modulus(), include_degenerate);
  rep.class_count = core.classes;
  rep.ordered_class_count = core.ordered;
  rep.side_triple_count = core.side_triples;
  rep.total_class_count = total_congruence_classes(m, include_degenerate, cache_dir);
  rep.fraction = rep.total_class_count
                     ? static_cast<double>(rep.class_count) / static_cast<double>(rep.total_class_count)
                     : 0.0;
  return rep;
}

void to_json(nlohmann::json& j, const TranslationCoverageReport& r) {
  j = nlohmann::json{{"q", r.q},
                     {"d", r.d},
                     {"n", r.n},
                     {"set_size", r.set_size},
                     {"covered", r.covered},
                     {"total", r.total},
                     {"fraction", r.fraction},
                     {"covers_all", r.covers_all},
                     {"lower_bound_rhs", r.lower_bound_rhs},
                     {"lower_bound_holds", r.lower_bound_holds},
                     {"group_model_checked", r.group_model_checked},
                     {"group_model_consistent", r.group_model_consistent}};
}

TranslationCoverageReport translation_coverage(const PointSet& E, int n, bool check_group_model) {
  if (n < 2) throw BadDims("configurations need n >= 2 points");
  const uint32_t p = E.modulus();
  const int d = E.dim();
  TranslationCoverageReport rep;
  rep.q = p;
  rep.d = d;
  rep.n = n;
  rep.set_size = E.size();

  double cost = std::pow(static_cast<double>(E.size()), n);
  if (cost > static_cast<double>(kCensusGuard)) throw TooLarge("coverage guard: |E|^n > 1e8");
  if (static_cast<double>(d) * (n - 1) * std::log2(static_cast<double>(p)) > 62) {
    throw TooLarge("difference tuples do not fit the 64-bit encoding");
  }

  // encode points base p for difference arithmetic
  const auto& pts = E.points();
  const uint64_t m = E.size();
  rep.total = pow_u64(p, d * (n - 1));

  std::unordered_set<uint64_t> covered;
  if (m > 0) {
    std::vector<size_t> idx(n, 0);
    while (true) {
      uint64_t code = 0;
      for (int i = 1; i < n; ++i) {
        const Point& a = pts[idx[i]];
        const Point& b = pts[idx[0]];
        for (int c = 0; c < d; ++c) {
          code = code * p + (a[c].value() + p - b[c].value()) % p;
        }
      }
      covered.insert(code);
      int pos = n - 1;
      while (pos >= 0 && ++idx[pos] == m) idx[pos--] = 0;
      if (pos < 0) break;
    }
  }
  rep.covered = covered.size();
  rep.fraction = static_cast<double>(rep.covered) / static_cast<double>(rep.total);
  rep.covers_all = rep.covered == rep.total;
  rep.lower_bound_rhs = std::pow(rep.fraction, 1.0 / n) *
                        std::pow(static_cast<double>(p), d * (1.0 - 1.0 / n));
  rep.lower_bound_holds = static_cast<double>(rep.set_size) + 1e-9 >= rep.lower_bound_rhs;

  if (check_group_model) {
    const uint64_t universe = pow_u64(p, d);
    if (std::pow(static_cast<double>(universe), n + 1) > 1e8) {
      throw TooLarge("group model check guard");
    }
    // membership bitmap of E inside V
    std::vector<uint8_t> in_e(universe, 0);
    for (const Point& pt : pts) {
      uint64_t code = 0;
      for (int c = 0; c < d; ++c) code = code * p + pt[c].value();
      in_e[code] = 1;
    }
    auto decode = [&](uint64_t code, int c) {
      for (int i = d - 1; i > c; --i) code /= p;
      return static_cast<uint32_t>(code % p);
    };
    // count tuples (v_1..v_n) in V^n reachable as (e_1 + a, ..., e_n + a)
    uint64_t group_covered = 0;
    std::vector<uint64_t> v(n, 0);
    while (true) {
      bool reachable = false;
      for (uint64_t a = 0; a < universe && !reachable; ++a) {
        bool all_in = true;
        for (int i = 0; i < n && all_in; ++i) {
          uint64_t shifted = 0;
          for (int c = 0; c < d; ++c) {
            shifted = shifted * p + (decode(v[i], c) + p - decode(a, c)) % p;
          }
          all_in = in_e[shifted];
        }
        reachable = all_in;
      }
      if (reachable) ++group_covered;
      int pos = n - 1;
      while (pos >= 0 && ++v[pos] == universe) v[pos--] = 0;
      if (pos < 0) break;
    }
    rep.group_model_checked = true;
    // every covered difference class corresponds to exactly |V| tuples
    rep.group_model_consistent =
        group_covered == rep.covered * universe &&
        ((group_covered == pow_u64(universe, n)) == rep.covers_all);
  }
  return rep;
}

void to_json(nlohmann::json& j, const ElekesSharirReport& r) {
  j = nlohmann::json{{"q", r.q},
                     {"ell", r.ell},
                     {"set_size", r.set_size},
                     {"pair_count", r.pair_count},
                     {"predicted", r.predicted},
                     {"residual", r.residual},
                     {"residual_bound", r.residual_bound},
                     {"residual_within", r.residual_within},
                     {"audit_performed", r.audit_performed}};
  if (r.audit_performed) {
    j["anchor"] = *r.anchor;
    j["motion_set_size"] = r.motion_set_size;
    j["missed_count"] = r.missed_count;
    j["missed_bound"] = r.missed_bound;
    j["missed_slack"] = r.missed_slack;
    j["vacuous"] = r.vacuous;
    j["image_union_size"] = r.image_union_size;
  }
}

namespace {

void fill_pair_stats(ElekesSharirReport& rep, const std::vector<RawPt>& pts, uint32_t p,
                     uint32_t ell, std::vector<std::pair<size_t, size_t>>* pairs) {
  uint64_t count = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) {
      uint64_t dx = (pts[i].x + static_cast<uint64_t>(p) - pts[j].x) % p;
      uint64_t dy = (pts[i].y + static_cast<uint64_t>(p) - pts[j].y) % p;
      if ((dx * dx + dy * dy) % p == ell) {
        ++count;
        if (pairs) pairs->emplace_back(i, j);
      }
    }
  }
  rep.pair_count = count;
  const double sz = static_cast<double>(pts.size());
  rep.predicted = sz * sz / (2.0 * p);
  rep.residual = static_cast<double>(count) - rep.predicted;
  rep.residual_bound = std::sqrt(static_cast<double>(p)) * sz;
  rep.residual_within = std::abs(rep.residual) <= rep.residual_bound;
}

}  // namespace

ElekesSharirReport count_distance_pairs(const PointSet& E, const FieldElement& ell) {
  if (E.dim() != 2) throw DimensionMismatch("distance pairs are counted over the plane");
  if (E.modulus() != ell.modulus()) throw ModulusMismatch("length over the wrong prime");
  if (ell.is_zero()) throw ZeroLength("the pair statistic needs ell != 0");
  ElekesSharirReport rep;
  rep.q = E.modulus();
  rep.ell = ell.value();
  rep.set_size = E.size();
  fill_pair_stats(rep, raw_points(E), rep.q, rep.ell, nullptr);
  return rep;
}

ElekesSharirReport elekes_sharir_audit(const PointSet& E, const FieldElement& ell,
                                       const std::optional<std::pair<Point, Point>>& anchor) {
  if (E.dim() != 2) throw DimensionMismatch("the audit runs over the plane");
  if (E.modulus() != ell.modulus()) throw ModulusMismatch("length over the wrong prime");
  if (ell.is_zero()) throw ZeroLength("the audit needs ell != 0");
  const uint32_t p = E.modulus();
  if (p % 4 == 1) {
    throw WrongResidueClass("the screw correspondence requires q = 3 mod 4");
  }
  const PrimeModulus m(p);

  ElekesSharirReport rep;
  rep.q = p;
  rep.ell = ell.value();
  rep.set_size = E.size();

  auto pts = raw_points(E);
  std::vector<std::pair<size_t, size_t>> pairs;
  fill_pair_stats(rep, pts, p, rep.ell, &pairs);

  // anchor: the canonically first pair unless one was supplied
  Point x0 = Point::of(m, {0, 0}), y0 = x0;
  if (anchor) {
    x0 = anchor->first;
    y0 = anchor->second;
    if (!E.contains(x0) || !E.contains(y0) || dist(x0, y0) != ell) {
      throw NoAnchor("supplied anchor is not a pair of E at the requested distance");
    }
  } else {
    if (pairs.empty()) throw NoAnchor("E has no pair at the requested distance");
    x0 = E.points()[pairs.front().first];
    y0 = E.points()[pairs.front().second];
  }
  rep.anchor = {x0[0].value(), x0[1].value(), y0[0].value(), y0[1].value()};

  // P: screw points carrying some distance-ell pair of E onto the anchor
  // segment, in either orientation.
  auto encode3 = [p](uint32_t a, uint32_t b, uint32_t c) {
    return (static_cast<uint64_t>(a) * p + b) * p + c;
  };
  std::unordered_set<uint64_t> motion_set;
  const auto& points = E.points();
  for (const auto& [i, j] : pairs) {
    const Point& x = points[i];
    const Point& y = points[j];
    for (const auto& target : {std::pair{x0, y0}, std::pair{y0, x0}}) {
      if (auto s = try_motion_between_segments(x, y, target.first, target.second)) {
        motion_set.insert(
            encode3(s->center()[0].value(), s->center()[1].value(), s->r().value()));
      }
    }
  }
  rep.motion_set_size = motion_set.size();

  // Y: points y whose whole pair-line family from E misses the motion set.
  // Pair line from x to y: base ((x+y)/2, 0), direction ((x-y)^perp/2, 1).
  const uint64_t inv2 = (p + 1) / 2;  // 1/2 mod p
  uint64_t missed = 0;
  for (uint32_t ya = 0; ya < p && !motion_set.empty(); ++ya) {
    for (uint32_t yb = 0; yb < p; ++yb) {
      bool hit = false;
      for (const RawPt& x : pts) {
        uint64_t bx = (x.x + ya) % p * inv2 % p;
        uint64_t by = (x.y + yb) % p * inv2 % p;
        uint64_t dx = (x.y + static_cast<uint64_t>(p) - yb) % p * inv2 % p;  // perp of (x - y)
        uint64_t dy = (ya + static_cast<uint64_t>(p) - x.x) % p * inv2 % p;
        for (uint32_t r = 0; r < p; ++r) {
          uint64_t cx = (bx + r * dx) % p;
          uint64_t cy = (by + r * dy) % p;
          if (motion_set.count(encode3(static_cast<uint32_t>(cx), static_cast<uint32_t>(cy), r))) {
            hit = true;
            break;
          }
        }
        if (hit) break;
      }
      if (!hit) ++missed;
    }
  }
  if (motion_set.empty()) missed = static_cast<uint64_t>(p) * p;
  rep.missed_count = missed;
  rep.image_union_size = static_cast<uint64_t>(p) * p - missed;

  const double size4 = std::pow(static_cast<double>(E.size()), 4);
  rep.missed_bound = 2.0 * std::pow(static_cast<double>(p), 9) / size4;
  rep.missed_slack = rep.missed_bound > 0 ? static_cast<double>(missed) / rep.missed_bound : 0.0;
  rep.vacuous = rep.missed_bound >= static_cast<double>(p) * p;
  rep.audit_performed = true;
  return rep;
}

}  // namespace qplane
