#include "qplane/field.hpp"

#include <array>

namespace qplane {

namespace {

uint64_t pow_mod(uint64_t base, uint64_t exp, uint64_t mod) {
  uint64_t acc = 1 % mod;
  base %= mod;
  while (exp != 0) {
    if (exp & 1) acc = acc * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return acc;
}

bool miller_rabin(uint64_t n, uint64_t a) {
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  uint64_t x = pow_mod(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == n - 1) return true;
  }
  return false;
}

}  // namespace

bool is_prime(uint32_t n) {
  if (n < 2) return false;
  for (uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  // Bases {2, 7, 61} decide primality for all n < 4'759'123'141.
  for (uint64_t a : {2ull, 7ull, 61ull}) {
    if (!miller_rabin(n, a)) return false;
  }
  return true;
}

PrimeModulus::PrimeModulus(uint32_t p) : p_(p) {
  if (p < 3 || p >= (1u << 31) || p % 2 == 0 || !is_prime(p)) {
    throw BadModulus("modulus must be an odd prime in [3, 2^31): got " + std::to_string(p));
  }
}

FieldElement FieldElement::from_int(int64_t value, PrimeModulus m) {
  const int64_t p = m.value();
  int64_t r = value % p;
  if (r < 0) r += p;
  return FieldElement(static_cast<uint64_t>(r), m);
}

void FieldElement::check_same(const FieldElement& o) const {
  if (p_ != o.p_) {
    throw ModulusMismatch("mixed moduli " + std::to_string(p_) + " and " + std::to_string(o.p_));
  }
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  check_same(o);
  uint64_t s = static_cast<uint64_t>(v_) + o.v_;
  if (s >= p_) s -= p_;
  return raw(static_cast<uint32_t>(s), p_);
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  check_same(o);
  uint32_t s = v_ >= o.v_ ? v_ - o.v_ : v_ + p_ - o.v_;
  return raw(s, p_);
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  check_same(o);
  return raw(static_cast<uint32_t>(static_cast<uint64_t>(v_) * o.v_ % p_), p_);
}

FieldElement FieldElement::operator/(const FieldElement& o) const {
  check_same(o);
  return *this * o.inverse();
}

FieldElement FieldElement::operator-() const {
  return raw(v_ == 0 ? 0 : p_ - v_, p_);
}

FieldElement FieldElement::pow(uint64_t e) const {
  return raw(static_cast<uint32_t>(pow_mod(v_, e, p_)), p_);
}

FieldElement FieldElement::inverse() const {
  if (v_ == 0) throw DivisionByZero("inverse of 0 mod " + std::to_string(p_));
  return pow(p_ - 2);
}

std::string FieldElement::str() const { return std::to_string(v_); }

int legendre(const FieldElement& a) {
  if (a.is_zero()) return 0;
  const uint32_t p = a.modulus();
  uint64_t e = pow_mod(a.value(), (p - 1) / 2, p);
  return e == 1 ? 1 : -1;
}

namespace {

// Tonelli-Shanks; precondition: a is a nonzero residue mod p.
uint32_t tonelli_shanks(uint32_t a, uint32_t p) {
  if (p % 4 == 3) {
    return static_cast<uint32_t>(pow_mod(a, (static_cast<uint64_t>(p) + 1) / 4, p));
  }
  uint64_t q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  uint64_t z = 2;
  while (pow_mod(z, (p - 1) / 2, p) != static_cast<uint64_t>(p) - 1) ++z;
  uint64_t m = s;
  uint64_t c = pow_mod(z, q, p);
  uint64_t t = pow_mod(a, q, p);
  uint64_t r = pow_mod(a, (q + 1) / 2, p);
  while (t != 1) {
    uint64_t t2 = t;
    uint64_t i = 0;
    while (t2 != 1) {
      t2 = t2 * t2 % p;
      ++i;
    }
    uint64_t b = c;
    for (uint64_t j = 0; j + i + 1 < m; ++j) b = b * b % p;
    m = i;
    c = b * b % p;
    t = t * c % p;
    r = r * b % p;
  }
  return static_cast<uint32_t>(r);
}

}  // namespace

std::optional<SqrtPair> sqrt(const FieldElement& a) {
  const uint32_t p = a.modulus();
  const PrimeModulus m(p);
  if (a.is_zero()) return SqrtPair{FieldElement(0, m), FieldElement(0, m)};
  if (legendre(a) == -1) return std::nullopt;
  uint32_t r = 0;
  if (p < 1000) {
    for (uint32_t i = 1; i <= (p - 1) / 2; ++i) {
      if (static_cast<uint64_t>(i) * i % p == a.value()) {
        r = i;
        break;
      }
    }
  } else {
    r = tonelli_shanks(a.value(), p);
  }
  uint32_t lo = std::min(r, p - r);
  return SqrtPair{FieldElement(lo, m), FieldElement(p - lo, m)};
}

uint32_t smallest_nonresidue(PrimeModulus m) {
  for (uint32_t a = 2;; ++a) {
    if (legendre(FieldElement(a, m)) == -1) return a;
  }
}

std::pair<FieldElement, FieldElement> sum_of_two_squares(const FieldElement& c) {
  const PrimeModulus m(c.modulus());
  for (uint32_t x = 0; x < c.modulus(); ++x) {
    FieldElement rest = c - FieldElement(x, m) * FieldElement(x, m);
    if (auto roots = sqrt(rest)) {
      return {FieldElement(x, m), roots->root};
    }
  }
  throw Error("no two-square representation mod " + std::to_string(c.modulus()));  // unreachable
}

QuadExtElement::QuadExtElement(FieldElement a0, FieldElement a1) : a0_(a0), a1_(a1) {
  if (a0.modulus() != a1.modulus()) {
    throw ModulusMismatch("quadratic extension components over different primes");
  }
  ns_ = smallest_nonresidue(PrimeModulus(a0.modulus()));
}

void QuadExtElement::check_same(const QuadExtElement& o) const {
  if (modulus() != o.modulus()) {
    throw ModulusMismatch("mixed quadratic extensions");
  }
}

QuadExtElement QuadExtElement::operator+(const QuadExtElement& o) const {
  check_same(o);
  return QuadExtElement(a0_ + o.a0_, a1_ + o.a1_);
}

QuadExtElement QuadExtElement::operator-(const QuadExtElement& o) const {
  check_same(o);
  return QuadExtElement(a0_ - o.a0_, a1_ - o.a1_);
}

QuadExtElement QuadExtElement::operator*(const QuadExtElement& o) const {
  check_same(o);
  const PrimeModulus m(modulus());
  const FieldElement ns(ns_, m);
  return QuadExtElement(a0_ * o.a0_ + a1_ * o.a1_ * ns, a0_ * o.a1_ + a1_ * o.a0_);
}

QuadExtElement QuadExtElement::operator-() const { return QuadExtElement(-a0_, -a1_); }

std::string QuadExtElement::str() const {
  if (in_base_field()) return a0_.str();
  return a0_.str() + " + " + a1_.str() + "*w";
}

QuadExtElement quad_ext_sqrt(const FieldElement& a) {
  const PrimeModulus m(a.modulus());
  const FieldElement zero(0, m);
  if (a.is_zero()) return QuadExtElement(zero, zero);
  if (auto roots = sqrt(a)) {
    return QuadExtElement(roots->root, zero);
  }
  // a and ns are both nonresidues, so a/ns is a residue and (y*w)^2 = y^2*ns = a.
  const FieldElement ns(smallest_nonresidue(m), m);
  FieldElement y = sqrt(a / ns)->root;
  return QuadExtElement(zero, y);
}

}  // namespace qplane
