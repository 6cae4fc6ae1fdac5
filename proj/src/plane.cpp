#include "qplane/plane.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

namespace qplane {

namespace {

constexpr uint64_t kUniverseGuard = 100'000'000;  // 10^8 points

uint64_t pow_u64_checked(uint64_t base, int exp) {
  uint64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > kUniverseGuard) return kUniverseGuard + 1;
    r *= base;
  }
  return r;
}

// Platform-independent bounded draw; std::uniform_int_distribution is not
// specified across implementations.
uint64_t draw_below(std::mt19937_64& rng, uint64_t bound) { return rng() % bound; }

Point decode_point(uint64_t index, PrimeModulus m, int d) {
  std::vector<FieldElement> c;
  c.reserve(d);
  const uint64_t p = m.value();
  for (int i = 0; i < d; ++i) {
    c.emplace_back(index % p, m);
    index /= p;
  }
  return Point(std::move(c));
}

}  // namespace

Point::Point(std::vector<FieldElement> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw DimensionMismatch("point needs at least one coordinate");
  for (const auto& c : coords_) {
    if (c.modulus() != coords_[0].modulus()) {
      throw ModulusMismatch("point coordinates over different primes");
    }
  }
}

Point Point::of(PrimeModulus m, std::initializer_list<int64_t> coords) {
  std::vector<FieldElement> c;
  c.reserve(coords.size());
  for (int64_t v : coords) c.push_back(FieldElement::from_int(v, m));
  return Point(std::move(c));
}

Point Point::operator+(const Point& o) const {
  if (dim() != o.dim()) throw DimensionMismatch("point addition across dimensions");
  std::vector<FieldElement> c;
  c.reserve(dim());
  for (size_t i = 0; i < dim(); ++i) c.push_back(coords_[i] + o.coords_[i]);
  return Point(std::move(c));
}

Point Point::operator-(const Point& o) const {
  if (dim() != o.dim()) throw DimensionMismatch("point subtraction across dimensions");
  std::vector<FieldElement> c;
  c.reserve(dim());
  for (size_t i = 0; i < dim(); ++i) c.push_back(coords_[i] - o.coords_[i]);
  return Point(std::move(c));
}

Point Point::operator-() const {
  std::vector<FieldElement> c;
  c.reserve(dim());
  for (const auto& x : coords_) c.push_back(-x);
  return Point(std::move(c));
}

Point operator*(const FieldElement& s, const Point& x) {
  std::vector<FieldElement> c;
  c.reserve(x.dim());
  for (size_t i = 0; i < x.dim(); ++i) c.push_back(s * x[i]);
  return Point(std::move(c));
}

std::string Point::str() const {
  std::string s;
  for (size_t i = 0; i < coords_.size(); ++i) {
    if (i) s += ',';
    s += coords_[i].str();
  }
  return s;
}

FieldElement dist(const Point& u, const Point& v) {
  if (u.dim() != v.dim()) throw DimensionMismatch("distance across dimensions");
  FieldElement acc(0, PrimeModulus(u.modulus()));
  for (size_t i = 0; i < u.dim(); ++i) {
    FieldElement d = u[i] - v[i];
    acc = acc + d * d;
  }
  return acc;
}

Point perp(const Point& a) {
  if (a.dim() != 2) throw DimensionMismatch("perp is defined in the plane only");
  return Point({a[1], -a[0]});
}

PointSet::PointSet(PrimeModulus m, int d, std::vector<Point> pts, std::string provenance,
                   uint64_t seed)
    : p_(m.value()), d_(d), pts_(std::move(pts)), provenance_(std::move(provenance)), seed_(seed) {
  if (d < 1) throw DimensionMismatch("point set dimension must be >= 1");
  for (const auto& pt : pts_) {
    if (static_cast<int>(pt.dim()) != d_) throw DimensionMismatch("point of wrong dimension");
    if (pt.modulus() != p_) throw ModulusMismatch("point over the wrong prime");
  }
  std::sort(pts_.begin(), pts_.end());
  pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

bool PointSet::contains(const Point& x) const {
  return std::binary_search(pts_.begin(), pts_.end(), x);
}

std::string PointSet::serialize() const {
  std::string out = "# qplane point set p=" + std::to_string(p_) + " d=" + std::to_string(d_) +
                    " spec=" + provenance_ + "\n";
  for (const auto& pt : pts_) {
    out += pt.str();
    out += '\n';
  }
  return out;
}

void PointSet::save(const std::filesystem::path& path) const {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << serialize();
}

std::vector<FieldElement> distance_set(const PointSet& E, bool include_diagonal) {
  if (E.size() == 0) throw EmptySet("distance set of an empty point set");
  std::set<FieldElement> vals;
  const auto& pts = E.points();
  for (size_t i = 0; i < pts.size(); ++i) {
    if (include_diagonal) vals.insert(dist(pts[i], pts[i]));
    for (size_t j = i + 1; j < pts.size(); ++j) {
      vals.insert(dist(pts[i], pts[j]));
    }
  }
  return {vals.begin(), vals.end()};
}

std::vector<Point> load_point_list(const std::filesystem::path& path, PrimeModulus m, int d) {
  std::ifstream f(path);
  if (!f) throw BadSpec("cannot open point list file " + path.string());
  std::vector<Point> pts;
  std::string line;
  size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);

    std::vector<FieldElement> coords;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        size_t pos = 0;
        unsigned long long v = std::stoull(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        coords.emplace_back(v, m);
      } catch (const std::exception&) {
        throw BadSpec("bad coordinate '" + tok + "' at " + path.string() + ":" +
                      std::to_string(lineno));
      }
    }
    if (static_cast<int>(coords.size()) != d) {
      throw BadSpec("expected " + std::to_string(d) + " coordinates at " + path.string() + ":" +
                    std::to_string(lineno));
    }
    pts.emplace_back(std::move(coords));
  }
  return pts;
}

namespace {

// Residue lists for product:A;B: comma-separated values or lo-hi ranges,
// all strictly below p.
std::vector<uint32_t> parse_residue_list(const std::string& text, uint32_t p) {
  std::vector<uint32_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) throw BadSpec("empty residue in '" + text + "'");
    auto parse_one = [&](const std::string& s) -> uint32_t {
      size_t pos = 0;
      unsigned long long v;
      try {
        v = std::stoull(s, &pos);
      } catch (const std::exception&) {
        throw BadSpec("bad residue '" + s + "'");
      }
      if (pos != s.size()) throw BadSpec("bad residue '" + s + "'");
      if (v >= p) throw BadSpec("residue " + s + " is not canonical mod " + std::to_string(p));
      return static_cast<uint32_t>(v);
    };
    auto dash = tok.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_one(tok));
    } else {
      uint32_t lo = parse_one(tok.substr(0, dash));
      uint32_t hi = parse_one(tok.substr(dash + 1));
      if (lo > hi) throw BadSpec("empty range '" + tok + "'");
      for (uint32_t v = lo; v <= hi; ++v) out.push_back(v);
    }
  }
  if (out.empty()) throw BadSpec("empty residue list");
  return out;
}

std::vector<Point> random_points(PrimeModulus m, int d, uint64_t n, uint64_t seed) {
  const uint64_t universe = pow_u64_checked(m.value(), d);
  if (n > universe) {
    throw SizeTooLarge("requested " + std::to_string(n) + " points from a universe of " +
                       std::to_string(universe));
  }
  if (n > kUniverseGuard) throw TooLarge("random draw exceeds the enumeration guard");
  std::mt19937_64 rng(seed);
  std::vector<Point> pts;
  pts.reserve(n);
  if (universe <= 4'000'000) {
    // partial Fisher-Yates over the whole index range
    std::vector<uint64_t> idx(universe);
    for (uint64_t i = 0; i < universe; ++i) idx[i] = i;
    for (uint64_t i = 0; i < n; ++i) {
      uint64_t j = i + draw_below(rng, universe - i);
      std::swap(idx[i], idx[j]);
      pts.push_back(decode_point(idx[i], m, d));
    }
  } else if (2 * n <= universe) {
    std::unordered_set<uint64_t> seen;
    while (seen.size() < n) {
      uint64_t i = draw_below(rng, universe);
      if (seen.insert(i).second) pts.push_back(decode_point(i, m, d));
    }
  } else {
    throw TooLarge("draw too dense for the rejection sampler at this universe size");
  }
  return pts;
}

}  // namespace

PointSet generate(const std::string& spec, PrimeModulus m, int d, uint64_t seed) {
  const uint32_t p = m.value();
  if (spec == "all") {
    const uint64_t universe = pow_u64_checked(p, d);
    if (universe > kUniverseGuard) throw TooLarge("p^d exceeds the enumeration guard");
    std::vector<Point> pts;
    pts.reserve(universe);
    for (uint64_t i = 0; i < universe; ++i) pts.push_back(decode_point(i, m, d));
    return PointSet(m, d, std::move(pts), spec, seed);
  }
  if (spec == "isotropic") {
    if (d != 2) throw BadSpec("isotropic generator needs d = 2");
    if (p % 4 != 1) {
      throw IsotropicUnavailable("-1 is a nonsquare mod " + std::to_string(p) +
                                 " (p = 3 mod 4); no isotropic line exists");
    }
    FieldElement i = sqrt(FieldElement::from_int(-1, m))->root;
    std::vector<Point> pts;
    pts.reserve(p);
    for (uint32_t t = 0; t < p; ++t) {
      FieldElement ft(t, m);
      pts.push_back(Point({ft, i * ft}));
    }
    return PointSet(m, d, std::move(pts), spec, seed);
  }
  if (spec.rfind("random:size=", 0) == 0) {
    const std::string num = spec.substr(12);
    uint64_t n;
    try {
      size_t pos = 0;
      n = std::stoull(num, &pos);
      if (pos != num.size()) throw std::invalid_argument(num);
    } catch (const std::exception&) {
      throw BadSpec("bad size in '" + spec + "'");
    }
    return PointSet(m, d, random_points(m, d, n, seed), spec, seed);
  }
  if (spec.rfind("list:file=", 0) == 0) {
    return PointSet(m, d, load_point_list(spec.substr(10), m, d), spec, seed);
  }
  if (spec.rfind("product:", 0) == 0) {
    if (d != 2) throw BadSpec("product generator needs d = 2");
    const std::string body = spec.substr(8);
    auto semi = body.find(';');
    if (semi == std::string::npos) throw BadSpec("product:A;B needs two residue lists");
    auto as = parse_residue_list(body.substr(0, semi), p);
    auto bs = parse_residue_list(body.substr(semi + 1), p);
    std::vector<Point> pts;
    pts.reserve(as.size() * bs.size());
    for (uint32_t a : as) {
      for (uint32_t b : bs) {
        pts.push_back(Point({FieldElement(a, m), FieldElement(b, m)}));
      }
    }
    return PointSet(m, d, std::move(pts), spec, seed);
  }
  throw BadSpec("unknown set spec '" + spec +
                "'; grammar: all | random:size=N | list:file=PATH | product:A;B | isotropic");
}

}  // namespace qplane
