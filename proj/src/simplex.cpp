#include "qplane/simplex.hpp"

#include <algorithm>

namespace qplane {

namespace {

void check_same_modulus(const FieldElement& a, const FieldElement& b) {
  if (a.modulus() != b.modulus()) throw ModulusMismatch("length values over different primes");
}

// Roots of A x^2 + B x + C = 0 with A != 0, sorted ascending; 2, 1 or 0 of
// them by the residue class of the discriminant.
std::vector<FieldElement> solve_quadratic(const FieldElement& A, const FieldElement& B,
                                          const FieldElement& C) {
  const PrimeModulus m(A.modulus());
  FieldElement disc = B * B - FieldElement(4, m) * A * C;
  auto roots = sqrt(disc);
  if (!roots) return {};
  FieldElement two_a = FieldElement(2, m) * A;
  if (disc.is_zero()) {
    return {(-B) / two_a};
  }
  FieldElement r1 = (-B + roots->root) / two_a;
  FieldElement r2 = (-B + roots->minus_root) / two_a;
  if (r2 < r1) std::swap(r1, r2);
  return {r1, r2};
}

}  // namespace

LengthTriple::LengthTriple(FieldElement a, FieldElement b, FieldElement c) : l1(a), l2(b), l3(c) {
  check_same_modulus(l1, l2);
  check_same_modulus(l1, l3);
}

FieldElement LengthTriple::pair_product_sum() const { return l1 * l2 + l2 * l3 + l3 * l1; }

FieldElement LengthTriple::discriminant() const {
  const PrimeModulus m(l1.modulus());
  FieldElement s1 = sum();
  return FieldElement(4, m) * pair_product_sum() - s1 * s1;
}

std::vector<Point> extend_segment(const Point& x1, const Point& x2, const FieldElement& l2,
                                  const FieldElement& l3) {
  if (x1.dim() != 2 || x2.dim() != 2) throw DimensionMismatch("segments live in the plane");
  const PrimeModulus m(x1.modulus());
  check_same_modulus(x1[0], l2);
  check_same_modulus(x1[0], l3);
  FieldElement l1 = dist(x1, x2);
  if (l1.is_zero()) throw ZeroBaseLength("base segment has length 0");

  // Work with the base translated to the origin: x2 - x1 = (a, b).
  FieldElement a = x2[0] - x1[0];
  FieldElement b = x2[1] - x1[1];
  // The two distance equations force a*c + b*d = (l1 + l3 - l2) / 2.
  FieldElement e = (l1 + l3 - l2) / FieldElement(2, m);
  const FieldElement two(2, m);

  std::vector<Point> out;
  if (!b.is_zero()) {
    // substitute d = (e - a c)/b into c^2 + d^2 = l3
    for (const FieldElement& c : solve_quadratic(l1, -(two * a * e), e * e - l3 * b * b)) {
      FieldElement d = (e - a * c) / b;
      out.push_back(Point({x1[0] + c, x1[1] + d}));
    }
  } else {
    // a != 0 since l1 != 0; symmetric chart in d
    for (const FieldElement& d : solve_quadratic(l1, -(two * b * e), e * e - l3 * a * a)) {
      FieldElement c = (e - b * d) / a;
      out.push_back(Point({x1[0] + c, x1[1] + d}));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TriangleExistence triangle_exists(const LengthTriple& t) {
  const PrimeModulus m(t.l1.modulus());
  TriangleExistence res{false, t.discriminant(), 0, std::nullopt};
  res.disc_legendre = legendre(res.discriminant);
  res.exists = res.disc_legendre >= 0;
  if (!res.exists) return res;

  if (t.l1.is_zero() && t.l2.is_zero() && t.l3.is_zero()) {
    Point o = Point::of(m, {0, 0});
    res.witness = std::array<Point, 3>{o, o, o};
    return res;
  }
  // Cycle the sides so the realized base is nonzero; a cyclic vertex
  // relabeling restores the requested order afterwards.
  std::array<FieldElement, 3> l = {t.l1, t.l2, t.l3};
  int shift = 0;
  while (l[0].is_zero()) {
    std::rotate(l.begin(), l.begin() + 1, l.end());
    ++shift;
  }
  auto [u, v] = sum_of_two_squares(l[0]);
  Point p1 = Point::of(m, {0, 0});
  Point p2 = Point({u, v});
  auto apex = extend_segment(p1, p2, l[1], l[2]);
  // nonempty: the discriminant is symmetric in the sides and is a square here
  Point p3 = apex.front();
  std::array<Point, 3> verts{p1, p2, p3};
  std::rotate(verts.begin(), verts.begin() + (3 - shift) % 3, verts.end());
  res.witness = verts;
  return res;
}

LengthMatrix::LengthMatrix(PrimeModulus m, int d) : p_(m.value()), d_(d) {
  if (d < 1) throw BadDims("matrix dimension must be >= 1");
  e_.assign(static_cast<size_t>(d) * d, FieldElement(0, m));
}

LengthMatrix LengthMatrix::from_entries(PrimeModulus m,
                                        const std::vector<std::vector<FieldElement>>& rows) {
  const int d = static_cast<int>(rows.size());
  LengthMatrix b(m, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d) throw BadDims("ragged matrix");
    for (int j = 0; j < d; ++j) {
      if (rows[i][j].modulus() != m.value()) throw ModulusMismatch("entry over the wrong prime");
      b.e_[i * d + j] = rows[i][j];
    }
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      if (b.at(i, j) != b.at(j, i)) throw AsymmetricInput("matrix is not symmetric");
    }
  }
  return b;
}

void LengthMatrix::set(int i, int j, const FieldElement& v) {
  if (v.modulus() != p_) throw ModulusMismatch("entry over the wrong prime");
  e_[i * d_ + j] = v;
  e_[j * d_ + i] = v;
}

void to_json(nlohmann::json& j, const LengthMatrix& b) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < b.dim(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < b.dim(); ++k) row.push_back(b.at(i, k).value());
    rows.push_back(row);
  }
  j = rows;
}

LengthMatrix length_matrix(int d, const std::vector<std::vector<FieldElement>>& table) {
  if (d < 1) throw BadDims("need d >= 1");
  if (static_cast<int>(table.size()) != d + 1) throw BadDims("length table must be (d+1) x (d+1)");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != d + 1) throw BadDims("length table must be (d+1) x (d+1)");
  }
  const PrimeModulus m(table[0][0].modulus());
  for (int i = 0; i <= d; ++i) {
    if (!table[i][i].is_zero()) throw NonzeroDiagonal("self-distances must be zero");
    for (int j = 0; j <= d; ++j) {
      if (table[i][j] != table[j][i]) throw AsymmetricInput("length table is not symmetric");
    }
  }
  LengthMatrix b(m, d);
  const FieldElement two(2, m);
  for (int i = 1; i <= d; ++i) {
    b.set(i - 1, i - 1, table[0][i]);
    for (int j = i + 1; j <= d; ++j) {
      b.set(i - 1, j - 1, (table[0][i] + table[0][j] - table[i][j]) / two);
    }
  }
  return b;
}

namespace {

using FRow = std::vector<FieldElement>;
using FMat = std::vector<FRow>;

FMat identity_matrix(PrimeModulus m, int d) {
  FMat out(d, FRow(d, FieldElement(0, m)));
  for (int i = 0; i < d; ++i) out[i][i] = FieldElement(1, m);
  return out;
}

FMat matmul(const FMat& a, const FMat& b, PrimeModulus m) {
  const int n = static_cast<int>(a.size());
  const int k = static_cast<int>(b.size());
  const int c = static_cast<int>(b[0].size());
  FMat out(n, FRow(c, FieldElement(0, m)));
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < k; ++t) {
      if (a[i][t].is_zero()) continue;
      for (int j = 0; j < c; ++j) out[i][j] = out[i][j] + a[i][t] * b[t][j];
    }
  }
  return out;
}

FMat transpose(const FMat& a, PrimeModulus m) {
  const int n = static_cast<int>(a.size());
  const int c = static_cast<int>(a[0].size());
  FMat out(c, FRow(n, FieldElement(0, m)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < c; ++j) out[j][i] = a[i][j];
  }
  return out;
}

// Inverse by Gauss-Jordan; the callers only invert matrices built from
// elementary congruence moves, which are always invertible.
FMat invert(FMat a, PrimeModulus m) {
  const int n = static_cast<int>(a.size());
  FMat inv = identity_matrix(m, n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && a[piv][col].is_zero()) ++piv;
    if (piv == n) throw Error("singular matrix in congruence inversion");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    FieldElement s = a[col][col].inverse();
    for (int j = 0; j < n; ++j) {
      a[col][j] = s * a[col][j];
      inv[col][j] = s * inv[col][j];
    }
    for (int i = 0; i < n; ++i) {
      if (i == col || a[i][col].is_zero()) continue;
      FieldElement f = a[i][col];
      for (int j = 0; j < n; ++j) {
        a[i][j] = a[i][j] - f * a[col][j];
        inv[i][j] = inv[i][j] - f * inv[col][j];
      }
    }
  }
  return inv;
}

FMat to_fmat(const LengthMatrix& b, PrimeModulus m) {
  FMat w(b.dim(), FRow(b.dim(), FieldElement(0, m)));
  for (int i = 0; i < b.dim(); ++i) {
    for (int j = 0; j < b.dim(); ++j) w[i][j] = b.at(i, j);
  }
  return w;
}

}  // namespace

FieldElement determinant(const LengthMatrix& b) {
  const PrimeModulus m(b.modulus());
  FMat a = to_fmat(b, m);
  const int n = b.dim();
  FieldElement det(1, m);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && a[piv][col].is_zero()) ++piv;
    if (piv == n) return FieldElement(0, m);
    if (piv != col) {
      std::swap(a[piv], a[col]);
      det = -det;
    }
    det = det * a[col][col];
    FieldElement s = a[col][col].inverse();
    for (int i = col + 1; i < n; ++i) {
      if (a[i][col].is_zero()) continue;
      FieldElement f = s * a[i][col];
      for (int j = col; j < n; ++j) a[i][j] = a[i][j] - f * a[col][j];
    }
  }
  return det;
}

void to_json(nlohmann::json& j, const GramResult& r) {
  j = nlohmann::json{{"exists", r.exists}, {"rank", r.rank}};
  if (r.det) j["det"] = r.det->value();
  if (r.exists) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.factor) {
      nlohmann::json jr = nlohmann::json::array();
      for (const auto& v : row) jr.push_back(v.value());
      rows.push_back(jr);
    }
    j["factor"] = rows;
  } else {
    j["reason"] = *r.reason == GramFailure::DetNonSquare ? "det_nonsquare" : "search_exhausted";
  }
}

GramResult gram_decompose(const LengthMatrix& b) {
  const PrimeModulus m(b.modulus());
  const int d = b.dim();
  const FieldElement zero(0, m), one(1, m);

  // Congruent diagonalization: maintain S with S B S^T = W throughout.
  FMat w = to_fmat(b, m);
  FMat s = identity_matrix(m, d);

  auto add_row_col = [&](int dst, int src, const FieldElement& f) {
    // row_dst += f * row_src, then the same on columns; S rows follow.
    for (int j = 0; j < d; ++j) w[dst][j] = w[dst][j] + f * w[src][j];
    for (int i = 0; i < d; ++i) w[i][dst] = w[i][dst] + f * w[i][src];
    for (int j = 0; j < d; ++j) s[dst][j] = s[dst][j] + f * s[src][j];
  };
  auto swap_row_col = [&](int i, int j) {
    std::swap(w[i], w[j]);
    for (int t = 0; t < d; ++t) std::swap(w[t][i], w[t][j]);
    std::swap(s[i], s[j]);
  };

  for (int i = 0; i < d; ++i) {
    if (w[i][i].is_zero()) {
      int pivot = -1;
      for (int j = i + 1; j < d; ++j) {
        if (!w[j][j].is_zero()) {
          pivot = j;
          break;
        }
      }
      if (pivot >= 0) {
        swap_row_col(i, pivot);
      } else {
        // all remaining diagonal entries vanish; split a nonzero off-diagonal
        int j = -1;
        for (int t = i + 1; t < d; ++t) {
          if (!w[i][t].is_zero()) {
            j = t;
            break;
          }
        }
        if (j < 0) continue;  // the whole row is zero: a radical direction
        add_row_col(i, j, one);  // now w[i][i] = 2 * old w[i][j] != 0
      }
    }
    FieldElement inv = w[i][i].inverse();
    for (int j = i + 1; j < d; ++j) {
      if (!w[j][i].is_zero()) add_row_col(j, i, -(inv * w[j][i]));
    }
  }

  // Normalize each nonzero diagonal entry into {1, ns}.
  const FieldElement ns(smallest_nonresidue(m), m);
  std::vector<int> ones, nss;
  int rank = 0;
  for (int i = 0; i < d; ++i) {
    if (w[i][i].is_zero()) continue;
    ++rank;
    FieldElement di = w[i][i];
    FieldElement scale(0, m);
    if (legendre(di) == 1) {
      scale = sqrt(di)->root.inverse();
      ones.push_back(i);
    } else {
      scale = sqrt(di / ns)->root.inverse();
      nss.push_back(i);
    }
    for (int j = 0; j < d; ++j) s[i][j] = scale * s[i][j];
    w[i][i] = legendre(di) == 1 ? one : ns;
  }

  // Fold nonsquare entries two at a time: with x^2 + y^2 = 1/ns the rows
  // (x u + y v, y u - x v) replace two ns-norm rows by two orthonormal ones.
  {
    auto [x, y] = sum_of_two_squares(ns.inverse());
    while (nss.size() >= 2) {
      int i = nss.back();
      nss.pop_back();
      int j = nss.back();
      nss.pop_back();
      FRow si = s[i], sj = s[j];
      for (int t = 0; t < d; ++t) {
        s[i][t] = x * si[t] + y * sj[t];
        s[j][t] = y * si[t] - x * sj[t];
      }
      w[i][i] = one;
      w[j][j] = one;
      ones.push_back(i);
      ones.push_back(j);
    }
  }

  GramResult res;
  res.rank = rank;
  res.det = determinant(b);

  if (!nss.empty() && rank == d) {
    res.exists = false;
    res.reason = GramFailure::DetNonSquare;
    return res;
  }

  // Realize the canonical diagonal in standard coordinates: orthonormal rows
  // get distinct unit vectors; a leftover ns-norm row takes two fresh
  // coordinates via a two-square split; radical rows stay zero.
  FMat e(d, FRow(d, zero));
  int next_coord = 0;
  for (int i : ones) e[i][next_coord++] = one;
  if (!nss.empty()) {
    auto [x, y] = sum_of_two_squares(ns);
    e[nss[0]][next_coord] = x;
    e[nss[0]][next_coord + 1] = y;
  }

  FMat a = matmul(invert(s, m), e, m);
  // certify before returning
  FMat prod = matmul(a, transpose(a, m), m);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (prod[i][j] != b.at(i, j)) {
        throw Error("internal: gram factor failed verification");
      }
    }
  }
  res.exists = true;
  res.factor = std::move(a);
  return res;
}

void to_json(nlohmann::json& j, const EquilateralSimplexReport& r) {
  j = nlohmann::json{{"d", r.d},
                     {"side", r.side.value()},
                     {"length_matrix", r.b},
                     {"det_direct", r.det_direct.value()},
                     {"det_formula", r.det_formula.value()},
                     {"gram", r.gram}};
}

EquilateralSimplexReport equilateral_simplex(int d, const FieldElement& side) {
  if (d < 1) throw BadDims("need d >= 1");
  const PrimeModulus m(side.modulus());
  const FieldElement half = side / FieldElement(2, m);
  LengthMatrix b(m, d);
  for (int i = 0; i < d; ++i) {
    b.set(i, i, side);
    for (int j = i + 1; j < d; ++j) b.set(i, j, half);
  }
  EquilateralSimplexReport rep{d, side, b, determinant(b),
                               FieldElement(d + 1, m) * half.pow(d), gram_decompose(b)};
  return rep;
}

void to_json(nlohmann::json& j, const EquilateralTableRow& r) {
  j = nlohmann::json{{"p", r.p},
                     {"p_mod_12", r.p_mod_12},
                     {"exists_mod12_rule", r.exists_mod12_rule},
                     {"legendre3", r.legendre3},
                     {"exists_base_field", r.exists_base_field},
                     {"sqrt3_ext", r.sqrt3_ext.str()},
                     {"ext_witness_ok", r.ext_witness_ok}};
  if (r.witness) {
    j["witness"] = nlohmann::json::array();
    for (const auto& v : *r.witness) j["witness"].push_back(v.str());
  }
}

std::vector<EquilateralTableRow> equilateral_triangle_table(uint32_t p_max) {
  if (p_max > 1000) throw TooLarge("equilateral table is desk-scale only (p_max <= 1000)");
  std::vector<EquilateralTableRow> rows;
  for (uint32_t p = 3; p < p_max; p += 2) {
    if (!is_prime(p)) continue;
    PrimeModulus m(p);
    const FieldElement three(3, m), one(1, m);
    EquilateralTableRow row{p,
                            p % 12,
                            p % 12 == 1 || p % 12 == 3 || p % 12 == 11,
                            legendre(three),
                            legendre(three) >= 0,
                            std::nullopt,
                            quad_ext_sqrt(three),
                            false};
    row.ext_witness_ok = (row.sqrt3_ext * row.sqrt3_ext) == QuadExtElement(three, FieldElement(0, m));
    if (row.exists_base_field) {
      auto t = triangle_exists(LengthTriple(one, one, one));
      row.witness = t.witness;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qplane
