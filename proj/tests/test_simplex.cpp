#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "qplane/simplex.hpp"

using namespace qplane;

namespace {

LengthTriple triple(PrimeModulus m, int64_t a, int64_t b, int64_t c) {
  return LengthTriple(FieldElement::from_int(a, m), FieldElement::from_int(b, m),
                      FieldElement::from_int(c, m));
}

// check that the witness realizes the ordered type (l1, l2, l3)
void check_witness(const TriangleExistence& t, const LengthTriple& l) {
  REQUIRE(t.witness.has_value());
  const auto& v = *t.witness;
  CHECK(dist(v[0], v[1]) == l.l1);
  CHECK(dist(v[1], v[2]) == l.l2);
  CHECK(dist(v[2], v[0]) == l.l3);
}

// brute-force oracle: which ordered distance triples occur among all triangles
// with first vertex pinned at the origin (translation invariance)
std::set<uint64_t> realizable_triples(uint32_t q) {
  PrimeModulus m(q);
  std::set<uint64_t> out;
  std::vector<Point> pts;
  for (uint32_t a = 0; a < q; ++a) {
    for (uint32_t b = 0; b < q; ++b) pts.push_back(Point({FieldElement(a, m), FieldElement(b, m)}));
  }
  Point origin = Point::of(m, {0, 0});
  for (const Point& x2 : pts) {
    for (const Point& x3 : pts) {
      uint64_t key = (static_cast<uint64_t>(dist(origin, x2).value()) * q +
                      dist(x2, x3).value()) * q + dist(x3, origin).value();
      out.insert(key);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("length triple symmetric functions") {
  PrimeModulus p7(7);
  LengthTriple t = triple(p7, 1, 1, 2);
  CHECK(t.sum().value() == 4);
  CHECK(t.pair_product_sum().value() == 5);
  CHECK(t.discriminant().value() == 4);  // 20 - 16
}

TEST_CASE("triangle existence pinned cases") {
  // (1,1,2) exists in every field: discriminant 4 is always a square
  for (uint32_t q : {3u, 5u, 7u, 11u, 13u}) {
    PrimeModulus m(q);
    auto t = triangle_exists(triple(m, 1, 1, 2));
    CHECK(t.exists);
    check_witness(t, triple(m, 1, 1, 2));
  }
  // equilateral reduces to 3 being a square
  CHECK(!triangle_exists(triple(PrimeModulus(7), 1, 1, 1)).exists);   // 7 = 7 mod 12
  CHECK(triangle_exists(triple(PrimeModulus(11), 1, 1, 1)).exists);   // 11 = 11 mod 12
  CHECK(triangle_exists(triple(PrimeModulus(13), 1, 1, 1)).exists);   // 13 = 1 mod 12
  // all-zero type: the one-point triangle
  auto z = triangle_exists(triple(PrimeModulus(7), 0, 0, 0));
  CHECK(z.exists);
  check_witness(z, triple(PrimeModulus(7), 0, 0, 0));
}

TEST_CASE("triangle existence with a zero side") {
  PrimeModulus p7(7);
  // (0, l, l) has discriminant 0: exists with x3 = x1
  auto t = triangle_exists(triple(p7, 0, 3, 3));
  CHECK(t.exists);
  check_witness(t, triple(p7, 0, 3, 3));
  // cycled variants exercise the base rotation
  auto u = triangle_exists(triple(p7, 3, 0, 3));
  CHECK(u.exists);
  check_witness(u, triple(p7, 3, 0, 3));
}

TEST_CASE("triangle existence decision matches brute force at q = 5, 7") {
  for (uint32_t q : {5u, 7u}) {
    PrimeModulus m(q);
    auto oracle = realizable_triples(q);
    for (uint32_t a = 0; a < q; ++a) {
      for (uint32_t b = 0; b < q; ++b) {
        for (uint32_t c = 0; c < q; ++c) {
          auto t = triangle_exists(triple(m, a, b, c));
          uint64_t key = (static_cast<uint64_t>(a) * q + b) * q + c;
          CHECK(t.exists == (oracle.count(key) == 1));
          if (t.exists) check_witness(t, triple(m, a, b, c));
        }
      }
    }
  }
}

TEST_CASE("extend segment pinned cases") {
  {
    PrimeModulus p11(11);
    auto xs = extend_segment(Point::of(p11, {0, 0}), Point::of(p11, {1, 0}),
                             FieldElement(1, p11), FieldElement(1, p11));
    REQUIRE(xs.size() == 2);
    CHECK(xs[0] == Point::of(p11, {6, 3}));
    CHECK(xs[1] == Point::of(p11, {6, 8}));
  }
  {
    PrimeModulus p7(7);
    auto xs = extend_segment(Point::of(p7, {0, 0}), Point::of(p7, {1, 0}), FieldElement(2, p7),
                             FieldElement(2, p7));
    REQUIRE(xs.size() == 1);
    CHECK(xs[0] == Point::of(p7, {4, 0}));  // the midpoint: 4 = 1/2 mod 7
    CHECK(dist(Point::of(p7, {0, 0}), xs[0]).value() == 2);
  }
  {
    PrimeModulus p7(7);
    auto xs = extend_segment(Point::of(p7, {0, 0}), Point::of(p7, {1, 0}), FieldElement(1, p7),
                             FieldElement(1, p7));
    CHECK(xs.empty());  // 3 is a nonsquare mod 7
  }
  CHECK_THROWS_AS(extend_segment(Point::of(PrimeModulus(7), {1, 1}), Point::of(PrimeModulus(7), {1, 1}),
                                 FieldElement(1, PrimeModulus(7)), FieldElement(1, PrimeModulus(7))),
                  ZeroBaseLength);
}

TEST_CASE("extend segment matches the discriminant classification exhaustively at q = 7") {
  PrimeModulus m(7);
  const uint32_t q = 7;
  Point x1 = Point::of(m, {0, 0});
  for (uint32_t a = 0; a < q; ++a) {
    for (uint32_t b = 0; b < q; ++b) {
      Point x2({FieldElement(a, m), FieldElement(b, m)});
      FieldElement l1 = dist(x1, x2);
      if (l1.is_zero()) continue;
      for (uint32_t l2 = 0; l2 < q; ++l2) {
        for (uint32_t l3 = 0; l3 < q; ++l3) {
          LengthTriple t(l1, FieldElement(l2, m), FieldElement(l3, m));
          auto xs = extend_segment(x1, x2, t.l2, t.l3);
          int lg = legendre(t.discriminant());
          size_t mu = lg == 1 ? 2 : (lg == 0 ? 1 : 0);
          CHECK(xs.size() == mu);
          for (const Point& x3 : xs) {
            CHECK(dist(x2, x3) == t.l2);
            CHECK(dist(x3, x1) == t.l3);
          }
          // independent route: scan all candidate apexes
          size_t scan = 0;
          for (uint32_t c = 0; c < q; ++c) {
            for (uint32_t dd = 0; dd < q; ++dd) {
              Point x3({FieldElement(c, m), FieldElement(dd, m)});
              if (dist(x2, x3) == t.l2 && dist(x3, x1) == t.l3) ++scan;
            }
          }
          CHECK(scan == mu);
        }
      }
    }
  }
}

TEST_CASE("existence agrees with the segment-extension route at q = 7") {
  PrimeModulus m(7);
  for (uint32_t a = 1; a < 7; ++a) {
    for (uint32_t b = 0; b < 7; ++b) {
      for (uint32_t c = 0; c < 7; ++c) {
        LengthTriple t = triple(m, a, b, c);
        auto [u, v] = sum_of_two_squares(t.l1);
        auto xs = extend_segment(Point::of(m, {0, 0}), Point({u, v}), t.l2, t.l3);
        CHECK(triangle_exists(t).exists == !xs.empty());
      }
    }
  }
}

TEST_CASE("length matrix pinned cases") {
  PrimeModulus p7(7);
  const FieldElement z(0, p7);
  // all lengths zero
  std::vector<std::vector<FieldElement>> tab(3, std::vector<FieldElement>(3, z));
  LengthMatrix b0 = length_matrix(2, tab);
  CHECK(b0.at(0, 0).value() == 0);
  CHECK(b0.at(1, 1).value() == 0);

  // triangle (1,1,2) anchored at the basepoint: identity matrix
  auto e = [&](int64_t v) { return FieldElement::from_int(v, p7); };
  std::vector<std::vector<FieldElement>> t2 = {
      {z, e(1), e(1)}, {e(1), z, e(2)}, {e(1), e(2), z}};
  LengthMatrix b = length_matrix(2, t2);
  CHECK(b.at(0, 0).value() == 1);
  CHECK(b.at(1, 1).value() == 1);
  CHECK(b.at(0, 1).value() == 0);

  // equilateral: (l/2)(J + I)
  std::vector<std::vector<FieldElement>> eq = {
      {z, e(1), e(1), e(1)}, {e(1), z, e(1), e(1)}, {e(1), e(1), z, e(1)}, {e(1), e(1), e(1), z}};
  LengthMatrix beq = length_matrix(3, eq);
  const FieldElement half = e(1) / e(2);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(beq.at(i, j) == (i == j ? e(1) : half));
    }
  }

  // malformed tables
  std::vector<std::vector<FieldElement>> bad_diag = {{z, e(1)}, {e(1), e(2)}};
  CHECK_THROWS_AS(length_matrix(1, bad_diag), NonzeroDiagonal);
  std::vector<std::vector<FieldElement>> asym = {{z, e(1), e(2)}, {e(3), z, e(1)}, {e(2), e(1), z}};
  CHECK_THROWS_AS(length_matrix(2, asym), AsymmetricInput);
}

TEST_CASE("length matrix of a realized configuration is the dot-product matrix") {
  PrimeModulus m(11);
  // vertices 0, x1, x2 with x1 = (3,4), x2 = (7,1)
  Point o = Point::of(m, {0, 0}), v1 = Point::of(m, {3, 4}), v2 = Point::of(m, {7, 1});
  const FieldElement z(0, m);
  std::vector<std::vector<FieldElement>> tab = {
      {z, dist(o, v1), dist(o, v2)},
      {dist(v1, o), z, dist(v1, v2)},
      {dist(v2, o), dist(v2, v1), z}};
  LengthMatrix b = length_matrix(2, tab);
  auto dot = [](const Point& x, const Point& y) { return x[0] * y[0] + x[1] * y[1]; };
  CHECK(b.at(0, 0) == dot(v1, v1));
  CHECK(b.at(1, 1) == dot(v2, v2));
  CHECK(b.at(0, 1) == dot(v1, v2));
}

TEST_CASE("determinant pinned values") {
  PrimeModulus p7(7);
  auto e = [&](int64_t v) { return FieldElement::from_int(v, p7); };
  LengthMatrix b(p7, 2);
  b.set(0, 0, e(1));
  b.set(1, 1, e(1));
  CHECK(determinant(b).value() == 1);
  b.set(0, 1, e(2));
  CHECK(determinant(b) == e(1 - 4));
  LengthMatrix s(p7, 3);  // singular: zero matrix
  CHECK(determinant(s).value() == 0);
}

TEST_CASE("gram decomposition pinned cases") {
  PrimeModulus p7(7);
  auto e = [&](int64_t v) { return FieldElement::from_int(v, p7); };
  // identity factors as itself
  LengthMatrix id(p7, 2);
  id.set(0, 0, e(1));
  id.set(1, 1, e(1));
  auto r = gram_decompose(id);
  REQUIRE(r.exists);
  CHECK(r.rank == 2);

  // diag(1, nonsquare): full rank with nonsquare determinant
  LengthMatrix bad(p7, 2);
  bad.set(0, 0, e(1));
  bad.set(1, 1, e(3));  // 3 is a nonsquare mod 7
  auto rb = gram_decompose(bad);
  CHECK(!rb.exists);
  REQUIRE(rb.reason.has_value());
  CHECK(*rb.reason == GramFailure::DetNonSquare);

  // rank-deficient version of the same diagonal is realizable
  LengthMatrix low(p7, 3);
  low.set(0, 0, e(1));
  low.set(1, 1, e(3));
  auto rl = gram_decompose(low);
  CHECK(rl.exists);
  CHECK(rl.rank == 2);
}

TEST_CASE("gram decision matches brute force over all factor matrices at q = 3") {
  PrimeModulus m(3);
  auto e = [&](uint32_t v) { return FieldElement(v, m); };
  for (int d = 1; d <= 3; ++d) {
    const int nmat = d * d;
    uint64_t total = 1;
    for (int i = 0; i < nmat; ++i) total *= 3;
    // mark every B = A A^T reachable by brute force
    std::set<std::vector<uint32_t>> reachable;
    for (uint64_t code = 0; code < total; ++code) {
      uint64_t t = code;
      std::vector<std::vector<FieldElement>> a(d, std::vector<FieldElement>(d, e(0)));
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          a[i][j] = e(t % 3);
          t /= 3;
        }
      }
      std::vector<uint32_t> key;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          FieldElement s = e(0);
          for (int k = 0; k < d; ++k) s = s + a[i][k] * a[j][k];
          key.push_back(s.value());
        }
      }
      reachable.insert(key);
    }
    // sweep all symmetric matrices
    int free_entries = d * (d + 1) / 2;
    uint64_t symtotal = 1;
    for (int i = 0; i < free_entries; ++i) symtotal *= 3;
    for (uint64_t code = 0; code < symtotal; ++code) {
      uint64_t t = code;
      LengthMatrix b(m, d);
      for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
          b.set(i, j, e(t % 3));
          t /= 3;
        }
      }
      std::vector<uint32_t> key;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) key.push_back(b.at(i, j).value());
      }
      auto r = gram_decompose(b);
      CHECK(r.exists == (reachable.count(key) == 1));
      if (r.exists) {
        // round trip: factor rows multiply back to B
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) {
            FieldElement s = e(0);
            for (int k = 0; k < d; ++k) s = s + r.factor[i][k] * r.factor[j][k];
            CHECK(s == b.at(i, j));
          }
        }
        if (r.rank == d) CHECK(legendre(determinant(b)) >= 0);
      }
    }
  }
}

TEST_CASE("equilateral simplex determinant and existence") {
  // d = 2 reduces to the triangle criterion: 3 square
  for (uint32_t q : {7u, 11u, 13u}) {
    PrimeModulus m(q);
    for (uint32_t l = 1; l < q; ++l) {
      auto rep = equilateral_simplex(2, FieldElement(l, m));
      CHECK(rep.det_direct == rep.det_formula);
      bool tri = triangle_exists(LengthTriple(FieldElement(l, m), FieldElement(l, m),
                                              FieldElement(l, m))).exists;
      CHECK(rep.gram.exists == tri);
    }
  }
  // d = 4, q = 7: d+1 = 5 is a nonsquare mod 7
  for (uint32_t l = 1; l < 7; ++l) {
    auto rep = equilateral_simplex(4, FieldElement(l, PrimeModulus(7)));
    CHECK(!rep.gram.exists);
    CHECK(*rep.gram.reason == GramFailure::DetNonSquare);
  }
  // side 0: the zero matrix factors trivially
  auto z = equilateral_simplex(3, FieldElement(0, PrimeModulus(7)));
  CHECK(z.gram.exists);
  CHECK(z.det_direct.value() == 0);
}

TEST_CASE("equilateral table pinned rows") {
  auto rows = equilateral_triangle_table(20);
  std::map<uint32_t, EquilateralTableRow> by_p;
  for (const auto& r : rows) by_p.emplace(r.p, r);

  REQUIRE(by_p.count(13) == 1);
  CHECK(by_p.at(13).exists_base_field);
  REQUIRE(by_p.at(13).witness.has_value());

  REQUIRE(by_p.count(5) == 1);
  CHECK(!by_p.at(5).exists_base_field);
  CHECK(by_p.at(5).sqrt3_ext.str() == "0 + 2*w");
  CHECK(by_p.at(5).ext_witness_ok);

  REQUIRE(by_p.count(3) == 1);
  CHECK(by_p.at(3).exists_base_field);  // sqrt(3) = 0 in F_3

  REQUIRE(by_p.count(7) == 1);
  CHECK(!by_p.at(7).exists_base_field);
  CHECK(by_p.at(7).ext_witness_ok);

  for (const auto& [p, r] : by_p) {
    CHECK(r.exists_base_field == r.exists_mod12_rule);
    CHECK(r.ext_witness_ok);
    if (r.witness) {
      PrimeModulus m(p);
      const FieldElement one(1, m);
      CHECK(dist((*r.witness)[0], (*r.witness)[1]) == one);
      CHECK(dist((*r.witness)[1], (*r.witness)[2]) == one);
      CHECK(dist((*r.witness)[2], (*r.witness)[0]) == one);
    }
  }
  CHECK_THROWS_AS(equilateral_triangle_table(2000), TooLarge);
}

TEST_CASE("unit equilateral triangle exists over F_25 via the extension root") {
  // vertices (0,0), (1,0), (1/2, s/2) with s = sqrt(3) in F_25
  PrimeModulus p5(5);
  auto s = quad_ext_sqrt(FieldElement(3, p5));
  const FieldElement zero(0, p5);
  QuadExtElement inv2(FieldElement(2, p5).inverse(), zero);
  QuadExtElement cx = QuadExtElement(FieldElement(1, p5), zero) * inv2;
  QuadExtElement cy = s * inv2;
  auto ext_dist = [&](QuadExtElement ax, QuadExtElement ay, QuadExtElement bx, QuadExtElement by) {
    QuadExtElement dx = ax - bx, dy = ay - by;
    return dx * dx + dy * dy;
  };
  QuadExtElement zero_e(zero, zero);
  QuadExtElement one_e(FieldElement(1, p5), zero);
  CHECK(ext_dist(zero_e, zero_e, one_e, zero_e) == one_e);
  CHECK(ext_dist(zero_e, zero_e, cx, cy) == one_e);
  CHECK(ext_dist(one_e, zero_e, cx, cy) == one_e);
}
