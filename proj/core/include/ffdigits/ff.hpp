#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ffdigits/errors.hpp"

namespace ffdigits {

// Primes are capped at 31 bits so a product of two canonical residues always
// fits in an unsigned 64-bit integer.
inline constexpr std::uint64_t kPrimeCap = std::uint64_t{1} << 31;

bool is_prime(std::uint64_t n);

// ---------------------------------------------------------------------------
// Univariate polynomials over F_p.
//
// Coefficients are stored lowest degree first.  Canonical form never has
// trailing zero coefficients; the zero polynomial is the empty vector and has
// no degree (poly_degree returns nullopt rather than a -1 sentinel).
// ---------------------------------------------------------------------------

struct PolyFp {
  std::vector<std::uint64_t> c;
  bool operator==(const PolyFp&) const = default;
};

PolyFp poly_trim(PolyFp a);
std::optional<std::size_t> poly_degree(const PolyFp& a);
PolyFp poly_add(const PolyFp& a, const PolyFp& b, std::uint64_t p);
PolyFp poly_sub(const PolyFp& a, const PolyFp& b, std::uint64_t p);
PolyFp poly_mul(const PolyFp& a, const PolyFp& b, std::uint64_t p);
// Long division; the divisor may be any nonzero polynomial.
std::pair<PolyFp, PolyFp> poly_divrem(const PolyFp& a, const PolyFp& b,
                                      std::uint64_t p);
PolyFp poly_rem(const PolyFp& a, const PolyFp& b, std::uint64_t p);
PolyFp poly_gcd(PolyFp a, PolyFp b, std::uint64_t p);  // monic gcd
PolyFp poly_powmod(const PolyFp& base, std::uint64_t e, const PolyFp& mod,
                   std::uint64_t p);
std::uint64_t poly_eval(const PolyFp& a, std::uint64_t x, std::uint64_t p);

// Irreducibility over F_p: g is irreducible of degree n iff X^(p^n) == X
// mod g and gcd(X^(p^(n/l)) - X, g) = 1 for every prime l dividing n.
// Degree-0 polynomials are not irreducible; g = 0 is rejected.
bool is_irreducible(const PolyFp& g, std::uint64_t p);

// The monic irreducible of degree r whose coefficient tuple (c_0,...,c_{r-1})
// is smallest when read as a base-p integer with c_0 least significant.
// Deterministic, so every caller agrees on the context for given (p, r).
PolyFp find_irreducible(std::uint64_t p, std::size_t r);

// ---------------------------------------------------------------------------
// The extension field F_{p^r} = F_p[X]/(modulus).
// ---------------------------------------------------------------------------

// Element of F_{p^r}: exactly r coordinates in the polynomial basis
// (1, alpha, ..., alpha^{r-1}), each a canonical residue mod p.
struct FieldElem {
  std::vector<std::uint64_t> c;
  bool operator==(const FieldElem&) const = default;
  bool is_zero() const {
    for (auto v : c)
      if (v) return false;
    return true;
  }
};

// Immutable description of F_{p^r} plus precomputed Frobenius tables.  All
// member functions are const and safe to use from several threads at once.
class FieldCtx {
 public:
  // Canonical context: modulus = find_irreducible(p, r).
  FieldCtx(std::uint64_t p, std::size_t r);
  // Explicit modulus; must be monic, irreducible and of degree r.
  FieldCtx(std::uint64_t p, std::size_t r, PolyFp modulus);

  std::uint64_t p() const { return p_; }
  std::size_t r() const { return r_; }
  const PolyFp& modulus() const { return modulus_; }

  // Scalar arithmetic in the prime subfield.
  std::uint64_t fp_add(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t fp_sub(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t fp_mul(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t fp_neg(std::uint64_t a) const;
  std::uint64_t fp_inv(std::uint64_t a) const;
  std::uint64_t fp_pow(std::uint64_t a, std::uint64_t e) const;

  FieldElem zero() const;
  FieldElem one() const;
  FieldElem from_fp(std::uint64_t v) const;  // embed a residue as a constant
  FieldElem alpha() const;                   // the class of X
  // Validating constructor; coordinates are reduced mod p, length must be r.
  FieldElem element(std::vector<std::uint64_t> coords) const;

  bool in_prime_field(const FieldElem& a) const;

  FieldElem add(const FieldElem& a, const FieldElem& b) const;
  FieldElem sub(const FieldElem& a, const FieldElem& b) const;
  FieldElem neg(const FieldElem& a) const;
  FieldElem mul(const FieldElem& a, const FieldElem& b) const;
  FieldElem scale(const FieldElem& a, std::uint64_t s) const;
  // Multiplicative inverse via the extended Euclidean algorithm on
  // polynomials; rejects zero.
  FieldElem inv(const FieldElem& a) const;
  FieldElem pow(const FieldElem& a, std::uint64_t e) const;

  // k-fold Frobenius a |-> a^(p^k), applied through the cached linear map;
  // k is reduced mod r.  Agrees with k-fold p-th powering by construction
  // (the test suites check this on both paths).
  FieldElem frobenius(const FieldElem& a, std::size_t k) const;

  // Absolute trace down to F_p.  Computes the full Frobenius orbit sum and
  // asserts that its upper r-1 coordinates vanish before projecting; a
  // violation means the context tables are corrupt.
  std::uint64_t trace(const FieldElem& a) const;

  // Row-major r x r matrix of the k-fold Frobenius in the polynomial basis.
  const std::vector<std::uint64_t>& frobenius_matrix(std::size_t k) const;

  // Low-level product kernel for hot loops: out = a*b, with a caller-provided
  // work area of 2r-1 limbs.  out and work must not alias a or b.
  void mul_into(std::span<const std::uint64_t> a,
                std::span<const std::uint64_t> b, std::span<std::uint64_t> out,
                std::span<std::uint64_t> work) const;

 private:
  void init_tables();
  void check_elem(const FieldElem& a) const;

  std::uint64_t p_ = 0;
  std::size_t r_ = 0;
  PolyFp modulus_;
  std::vector<std::uint64_t> neg_mod_;             // p - modulus coefficient
  std::vector<std::vector<std::uint64_t>> frob_;   // frob_[k], row-major r x r
  std::vector<std::uint64_t> trace_mat_;           // sum of all frob_[k]
};

}  // namespace ffdigits
