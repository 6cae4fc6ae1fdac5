#include "qplane/flats.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace qplane {

namespace {

using Row = std::vector<uint32_t>;

uint64_t inv_mod(uint64_t a, uint32_t p) {
  // p prime, a != 0
  uint64_t r = 1, e = p - 2, b = a % p;
  while (e) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

// v -= c * row (mod p)
void row_axpy(Row& v, uint64_t c, const Row& row, uint32_t p) {
  if (c == 0) return;
  for (size_t i = 0; i < v.size(); ++i) {
    v[i] = static_cast<uint32_t>((v[i] + (p - c) * row[i]) % p);
  }
}

// In-place reduced row echelon form; returns pivot columns.
std::vector<int> rref(std::vector<Row>& rows, uint32_t p) {
  std::vector<int> pivots;
  if (rows.empty()) return pivots;
  const size_t d = rows[0].size();
  size_t r = 0;
  for (size_t col = 0; col < d && r < rows.size(); ++col) {
    size_t sel = r;
    while (sel < rows.size() && rows[sel][col] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    uint64_t inv = inv_mod(rows[r][col], p);
    for (auto& x : rows[r]) x = static_cast<uint32_t>(x * inv % p);
    for (size_t j = 0; j < rows.size(); ++j) {
      if (j != r) row_axpy(rows[j], rows[j][col], rows[r], p);
    }
    pivots.push_back(static_cast<int>(col));
    ++r;
  }
  rows.resize(r);
  return pivots;
}

// Reduce v modulo the RREF row space: zero out every pivot coordinate.
void reduce_by_rows(Row& v, const std::vector<Row>& rows, const std::vector<int>& pivots,
                    uint32_t p) {
  for (size_t i = 0; i < rows.size(); ++i) {
    row_axpy(v, v[pivots[i]], rows[i], p);
  }
}

std::vector<int> pivots_of(const std::vector<Row>& basis) {
  std::vector<int> pivots;
  for (const Row& row : basis) {
    size_t c = 0;
    while (c < row.size() && row[c] == 0) ++c;
    pivots.push_back(static_cast<int>(c));
  }
  return pivots;
}

bool is_zero_row(const Row& v) {
  return std::all_of(v.begin(), v.end(), [](uint32_t x) { return x == 0; });
}

constexpr uint64_t kEnumGuard = 100'000'000;

// Gaussian binomial [h choose k]_q via the q-Pascal recurrence; exact, no division.
uint64_t gaussian_binomial(int h, int k, uint64_t q) {
  if (k < 0 || k > h) return 0;
  std::vector<std::vector<uint64_t>> c(h + 1, std::vector<uint64_t>(k + 1, 0));
  for (int i = 0; i <= h; ++i) {
    c[i][0] = 1;
    for (int j = 1; j <= std::min(i, k); ++j) {
      uint64_t qj = 1;
      for (int t = 0; t < j; ++t) {
        qj *= q;
        if (qj > (1ull << 62)) throw TooLarge("gaussian binomial overflows 64 bits");
      }
      unsigned __int128 val = (unsigned __int128)c[i - 1][j - 1] + (unsigned __int128)qj * c[i - 1][j];
      if (val > (unsigned __int128)UINT64_MAX / 4) throw TooLarge("gaussian binomial overflows 64 bits");
      c[i][j] = static_cast<uint64_t>(val);
    }
  }
  return c[h][k];
}

uint64_t pow_u64(uint64_t b, int e) {
  uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > (1ull << 62) / std::max<uint64_t>(b, 1)) throw TooLarge("power overflows 64 bits");
    r *= b;
  }
  return r;
}

}  // namespace

Flat Flat::from_generators(PrimeModulus m, int d,
                           const std::vector<std::vector<FieldElement>>& directions,
                           const std::vector<FieldElement>& base) {
  const uint32_t p = m.value();
  if (d < 1) throw BadDims("ambient dimension must be >= 1");
  if (static_cast<int>(base.size()) != d) throw BadDims("base point of wrong dimension");
  std::vector<Row> rows;
  for (const auto& dir : directions) {
    if (static_cast<int>(dir.size()) != d) throw BadDims("direction of wrong dimension");
    Row r(d);
    for (int i = 0; i < d; ++i) {
      if (dir[i].modulus() != p) throw ModulusMismatch("direction over the wrong prime");
      r[i] = dir[i].value();
    }
    if (!is_zero_row(r)) rows.push_back(std::move(r));
  }
  auto pivots = rref(rows, p);
  Row b(d);
  for (int i = 0; i < d; ++i) {
    if (base[i].modulus() != p) throw ModulusMismatch("base over the wrong prime");
    b[i] = base[i].value();
  }
  reduce_by_rows(b, rows, pivots, p);
  return Flat(p, d, std::move(rows), std::move(b));
}

bool Flat::contains_point(const Point& x) const {
  if (static_cast<int>(x.dim()) != d_) throw MixedDims("point of wrong dimension for flat");
  if (x.modulus() != p_) throw ModulusMismatch("point over the wrong prime");
  Row v(d_);
  for (int i = 0; i < d_; ++i) {
    v[i] = (x[i].value() + p_ - base_[i]) % p_;
  }
  auto pivots = pivots_of(basis_);
  reduce_by_rows(v, basis_, pivots, p_);
  return is_zero_row(v);
}

bool Flat::contains_flat(const Flat& other) const {
  if (other.d_ != d_ || other.p_ != p_) throw MixedDims("flats over different spaces");
  if (other.flat_dim() > flat_dim()) return false;
  auto pivots = pivots_of(basis_);
  for (const Row& row : other.basis_) {
    Row v = row;
    reduce_by_rows(v, basis_, pivots, p_);
    if (!is_zero_row(v)) return false;
  }
  Row diff(d_);
  for (int i = 0; i < d_; ++i) diff[i] = (other.base_[i] + p_ - base_[i]) % p_;
  reduce_by_rows(diff, basis_, pivots, p_);
  return is_zero_row(diff);
}

std::vector<Point> Flat::points() const {
  const PrimeModulus m(p_);
  const int k = flat_dim();
  uint64_t total = pow_u64(p_, k);
  std::vector<Point> out;
  out.reserve(total);
  std::vector<uint32_t> coeff(k, 0);
  for (uint64_t it = 0;; ++it) {
    Row v = base_;
    for (int i = 0; i < k; ++i) {
      row_axpy(v, p_ - coeff[i], basis_[i], p_);  // v += coeff[i] * row
    }
    std::vector<FieldElement> c;
    c.reserve(d_);
    for (int i = 0; i < d_; ++i) c.emplace_back(v[i], m);
    out.push_back(Point(std::move(c)));
    int pos = 0;
    while (pos < k && ++coeff[pos] == p_) coeff[pos++] = 0;
    if (pos == k) break;
  }
  return out;
}

std::string Flat::str() const {
  std::string s;
  for (int i = 0; i < d_; ++i) {
    if (i) s += ',';
    s += std::to_string(base_[i]);
  }
  s += " |";
  for (size_t r = 0; r < basis_.size(); ++r) {
    s += r ? "; " : " ";
    for (int i = 0; i < d_; ++i) {
      if (i) s += ',';
      s += std::to_string(basis_[r][i]);
    }
  }
  return s;
}

uint64_t flat_count(int h, int k, PrimeModulus m) {
  if (k < 0 || h < 0 || k > h) throw BadDims("flat count needs 0 <= k <= h");
  return pow_u64(m.value(), h - k) * gaussian_binomial(h, k, m.value());
}

uint64_t flats_through_flat(int d, int h, int k, PrimeModulus m) {
  if (!(0 <= k && k <= h && h <= d)) throw BadDims("need 0 <= k <= h <= d");
  const uint64_t q = m.value();
  unsigned __int128 num = (unsigned __int128)flat_count(h, k, m) * flat_count(d, h, m);
  uint64_t den = flat_count(d, k, m);
  if (num % den != 0) throw Error("flat multiplicity ratio is not integral");
  uint64_t ratio = static_cast<uint64_t>(num / den);

  // telescoping product form, as an independent route
  unsigned __int128 pn = 1, pd = 1;
  for (int i = k; i < h; ++i) {
    pn *= pow_u64(q, d - i) - 1;
    pd *= pow_u64(q, h - i) - 1;
  }
  if (pn % pd != 0 || static_cast<uint64_t>(pn / pd) != ratio) {
    throw Error("flat multiplicity expressions disagree");
  }
  return ratio;
}

ThroughCounts through_counts(int d, int k, PrimeModulus m) {
  if (!(0 <= k && k < d)) throw BadDims("need 0 <= k < d");
  return ThroughCounts{flats_through_flat(d, k + 1, 0, m), flats_through_flat(d, k + 1, k, m)};
}

std::vector<Flat> enumerate_flats(PrimeModulus m, int d, int k) {
  if (!(0 <= k && k <= d)) throw BadDims("need 0 <= k <= d");
  const uint32_t p = m.value();
  const uint64_t count = flat_count(d, k, m);
  if (count > kEnumGuard / pow_u64(p, d)) {
    throw TooLarge("flat enumeration guard: count * q^d > 1e8");
  }

  std::vector<Flat> out;
  out.reserve(count);

  // pivot column subsets in lexicographic order
  std::vector<int> cols(k);
  for (int i = 0; i < k; ++i) cols[i] = i;
  bool more_cols = true;
  if (k == 0) {
    // flats of dimension 0 are the points themselves
    for (uint64_t idx = 0; idx < pow_u64(p, d); ++idx) {
      Row b(d);
      uint64_t t = idx;
      for (int i = d - 1; i >= 0; --i) {
        b[i] = static_cast<uint32_t>(t % p);
        t /= p;
      }
      out.push_back(Flat(p, d, {}, std::move(b)));
    }
    return out;
  }
  while (more_cols) {
    std::vector<bool> is_pivot(d, false);
    for (int c : cols) is_pivot[c] = true;
    // free positions: to the right of the row's pivot, not a pivot column
    std::vector<std::pair<int, int>> free_pos;
    for (int r = 0; r < k; ++r) {
      for (int c = cols[r] + 1; c < d; ++c) {
        if (!is_pivot[c]) free_pos.emplace_back(r, c);
      }
    }
    std::vector<uint32_t> fv(free_pos.size(), 0);
    while (true) {
      std::vector<Row> basis(k, Row(d, 0));
      for (int r = 0; r < k; ++r) basis[r][cols[r]] = 1;
      for (size_t i = 0; i < free_pos.size(); ++i) {
        basis[free_pos[i].first][free_pos[i].second] = fv[i];
      }
      // all coset representatives: zero on pivot columns, free elsewhere
      std::vector<int> base_cols;
      for (int c = 0; c < d; ++c) {
        if (!is_pivot[c]) base_cols.push_back(c);
      }
      std::vector<uint32_t> bv(base_cols.size(), 0);
      while (true) {
        Row b(d, 0);
        for (size_t i = 0; i < base_cols.size(); ++i) b[base_cols[i]] = bv[i];
        out.push_back(Flat(p, d, basis, std::move(b)));
        size_t pos = 0;
        while (pos < bv.size() && ++bv[pos] == p) bv[pos++] = 0;
        if (pos == bv.size()) break;
      }
      size_t pos = 0;
      while (pos < fv.size() && ++fv[pos] == p) fv[pos++] = 0;
      if (pos == fv.size()) break;
    }
    // next pivot combination
    int i = k - 1;
    while (i >= 0 && cols[i] == d - k + i) --i;
    if (i < 0) {
      more_cols = false;
    } else {
      ++cols[i];
      for (int j = i + 1; j < k; ++j) cols[j] = cols[j - 1] + 1;
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const IncidenceReport& r) {
  j = nlohmann::json{{"q", r.q},
                     {"d", r.d},
                     {"k", r.k},
                     {"num_flats", r.num_flats},
                     {"num_points", r.num_points},
                     {"incidences", r.incidences},
                     {"main_num", r.main_num},
                     {"main_den", r.main_den},
                     {"main_term", r.main_term},
                     {"error_term", r.error_term},
                     {"slack", r.slack}};
}

IncidenceReport count_incidences(const std::vector<Flat>& flats, const std::vector<Point>& points,
                                 IncidenceStrategy strategy) {
  IncidenceReport rep;
  if (flats.empty() && points.empty()) return rep;
  if (!flats.empty()) {
    rep.q = flats[0].modulus();
    rep.d = flats[0].ambient_dim();
    rep.k = flats[0].flat_dim();
  } else {
    rep.q = points[0].modulus();
    rep.d = static_cast<int>(points[0].dim());
  }
  for (const Flat& f : flats) {
    if (f.modulus() != rep.q || f.ambient_dim() != rep.d || f.flat_dim() != rep.k) {
      throw MixedDims("incidence family must share (q, d, k)");
    }
  }
  for (const Point& x : points) {
    if (x.modulus() != rep.q || static_cast<int>(x.dim()) != rep.d) {
      throw MixedDims("incidence points must share (q, d)");
    }
  }
  rep.num_flats = flats.size();
  rep.num_points = points.size();

  const uint64_t q = rep.q;
  uint64_t qk = flats.empty() ? 1 : pow_u64(q, rep.k);
  if (strategy == IncidenceStrategy::Auto) {
    strategy = qk < points.size() ? IncidenceStrategy::PointExpansion
                                  : IncidenceStrategy::MembershipScan;
  }

  uint64_t inc = 0;
  if (strategy == IncidenceStrategy::PointExpansion) {
    // encode point coordinates in base q for hashed membership
    std::unordered_set<uint64_t> pts;
    pts.reserve(points.size() * 2);
    auto encode = [&](const Point& x) {
      uint64_t e = 0;
      for (size_t i = 0; i < x.dim(); ++i) e = e * q + x[i].value();
      return e;
    };
    for (const Point& x : points) pts.insert(encode(x));
    for (const Flat& f : flats) {
      for (const Point& x : f.points()) {
        if (pts.count(encode(x))) ++inc;
      }
    }
  } else {
    for (const Flat& f : flats) {
      for (const Point& x : points) {
        if (f.contains_point(x)) ++inc;
      }
    }
  }
  rep.incidences = inc;
  rep.main_num = rep.num_flats * rep.num_points;
  rep.main_den = pow_u64(q, rep.d - rep.k);
  rep.main_term = static_cast<double>(rep.main_num) / static_cast<double>(rep.main_den);
  rep.error_term = std::sqrt(static_cast<double>(pow_u64(q, static_cast<int>(rep.k) *
                                                                (rep.d - rep.k))) *
                             static_cast<double>(rep.main_num));
  rep.slack = rep.error_term > 0
                  ? (static_cast<double>(rep.incidences) - rep.main_term) / rep.error_term
                  : 0.0;
  return rep;
}

uint64_t enclosing_incidence_sum(const std::vector<Flat>& flats,
                                 const std::vector<Point>& points) {
  if (flats.empty()) return 0;
  const int d = flats[0].ambient_dim();
  const int k = flats[0].flat_dim();
  const PrimeModulus m(flats[0].modulus());
  if (k + 1 > d) throw BadDims("no enclosing flats above dimension d");

  std::vector<uint64_t> per_flat(flats.size(), 0);
  for (size_t i = 0; i < flats.size(); ++i) {
    for (const Point& x : points) {
      if (flats[i].contains_point(x)) ++per_flat[i];
    }
  }
  uint64_t sum = 0;
  for (const Flat& sup : enumerate_flats(m, d, k + 1)) {
    for (size_t i = 0; i < flats.size(); ++i) {
      if (sup.contains_flat(flats[i])) sum += per_flat[i];
    }
  }
  return sum;
}

}  // namespace qplane
