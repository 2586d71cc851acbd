#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "ffdigits/basis.hpp"

namespace ffdigits {

inline constexpr std::uint64_t kDefaultTermBudget = 1'000'000;
inline constexpr std::uint64_t kDefaultPointBudget = 100'000'000;

// ---------------------------------------------------------------------------
// Univariate polynomials over F_{p^r}, lowest degree first, canonical (no
// trailing zero coefficient; zero polynomial is empty).
// ---------------------------------------------------------------------------

struct UniPolyFq {
  std::vector<FieldElem> c;
  bool operator==(const UniPolyFq&) const = default;
};

UniPolyFq uni_trim(UniPolyFq f);
std::optional<std::size_t> uni_degree(const UniPolyFq& f);
UniPolyFq uni_monomial(const FieldCtx& ctx, std::size_t d);  // X^d
// Dense random polynomial of exact degree d (leading coefficient nonzero).
UniPolyFq random_uni_poly(const FieldCtx& ctx, std::size_t d,
                          std::mt19937_64& rng);
FieldElem eval_horner(const UniPolyFq& f, const FieldElem& x,
                      const FieldCtx& ctx);
// Apply the j-fold Frobenius to every coefficient.
UniPolyFq twist(const UniPolyFq& f, std::size_t j, const FieldCtx& ctx);
UniPolyFq uni_derivative(const UniPolyFq& f, const FieldCtx& ctx);

// ---------------------------------------------------------------------------
// Coupling coefficients a[j][k] = sum_{i=1}^{r-1} phi^j(d_i) phi^k(d_{i+1})
// over the dual elements d_i of a pair.  They tie the j-th and k-th twisted
// copies of f together in the lifts below.
// ---------------------------------------------------------------------------

struct CouplingMatrix {
  std::vector<std::vector<FieldElem>> a;  // r x r
};

// Computes the matrix and asserts two structural identities before
// returning: sum_j a[j][0] * basis[0]^(p^j) must equal dual[1], and the
// whole matrix must be equivariant under the index shift
// phi(a[j][k]) == a[j+1][k+1] (indices mod r).
CouplingMatrix coupling_matrix(const BasisPair& pair);

// ---------------------------------------------------------------------------
// Sparse multivariate polynomials over F_{p^r}.
// ---------------------------------------------------------------------------

// Terms are keyed by dense exponent vectors and kept in graded
// lexicographic order (total degree first, then lexicographic); a zero
// coefficient is never stored.
class SparseMvPoly {
 public:
  using Exps = std::vector<std::uint32_t>;
  struct GradedLex {
    bool operator()(const Exps& a, const Exps& b) const;
  };
  using TermMap = std::map<Exps, FieldElem, GradedLex>;

  explicit SparseMvPoly(std::size_t nvars) : nvars_(nvars) {}

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  std::optional<std::uint32_t> degree() const;  // max total degree

  // Accumulating insert; cancellations drop the term entirely.
  void add_term(const Exps& e, const FieldElem& coeff, const FieldCtx& ctx);
  const FieldElem* coeff(const Exps& e) const;

 private:
  friend SparseMvPoly homogeneous_part(const SparseMvPoly&, std::uint32_t);
  std::size_t nvars_;
  TermMap terms_;
};

SparseMvPoly mv_add(const SparseMvPoly& a, const SparseMvPoly& b,
                    const FieldCtx& ctx);
SparseMvPoly mv_mul(const SparseMvPoly& a, const SparseMvPoly& b,
                    const FieldCtx& ctx,
                    std::uint64_t term_budget = kDefaultTermBudget);
SparseMvPoly mv_scale(const SparseMvPoly& a, const FieldElem& s,
                      const FieldCtx& ctx);
SparseMvPoly partial_derivative(const SparseMvPoly& a, std::size_t var,
                                const FieldCtx& ctx);
SparseMvPoly homogeneous_part(const SparseMvPoly& a, std::uint32_t deg);
FieldElem mv_eval(const SparseMvPoly& a, const std::vector<FieldElem>& point,
                  const FieldCtx& ctx);

// ---------------------------------------------------------------------------
// Lift constructions.
//
// Both lifts express a digit function of f(xi) as a polynomial identity.
// twisted_lift works in the coordinates y_i = phi^i(xi); digit_lift works
// directly in the digits x_1..x_r of xi, and the two are related by the
// linear change of coordinates y_i = sum_j basis[j]^(p^i) x_j.
// ---------------------------------------------------------------------------

// Q(Y_0..Y_{r-1}) = sum_{j,k} a[j][k] f_j(Y_j) f_k(Y_k), where f_j twists
// the coefficients of f by phi^j.
SparseMvPoly twisted_lift(const UniPolyFq& f, const CouplingMatrix& a,
                          const FieldCtx& ctx);

// F(X_1..X_r) with F(x_1..x_r) = rudin_shapiro(f(xi)) for every element xi
// with digits x_i.  Asserts that every coefficient is Frobenius-fixed (so F
// is defined over F_p) and that F agrees with twisted_lift composed with the
// coordinate change on 100 pseudo-random points.
SparseMvPoly digit_lift(const UniPolyFq& f, const BasisPair& pair,
                        std::uint64_t term_budget = kDefaultTermBudget);

// sum_l phi^l(delta) f_l(Y_l) - c with delta = sum_i dual[i]; the same
// construction for the thue_morse digit function.  Asserts delta != 0.
SparseMvPoly thue_morse_lift(const UniPolyFq& f, const BasisPair& pair,
                             std::uint64_t c);

// The coordinate change tying the two lifts together:
// y_i = sum_j basis[j]^(p^i) x_j.
std::vector<FieldElem> twisted_coordinates(const DigitVector& x,
                                           const BasisPair& pair);

struct IdentityCheck {
  std::uint64_t points = 0;
  std::uint64_t mismatches = 0;
};

// Checks digit_lift output against rudin_shapiro(f(xi)) point by point:
// exhaustively when p^r <= exhaustive_limit, otherwise on `samples` seeded
// pseudo-random digit vectors.
IdentityCheck verify_value_identity(const SparseMvPoly& F, const UniPolyFq& f,
                                    const BasisPair& pair,
                                    std::uint64_t exhaustive_limit = 10'000,
                                    std::uint64_t samples = 10'000,
                                    std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Singular-point census.
//
// Counts points v with coordinates in F_{p^m} where P(v) = c and every
// partial derivative of P vanishes.  Coefficients of P live in ctx; the
// census realizes a field containing both the coefficients and F_{p^m}
// (ctx itself when m == 1, F_{p^(r*m)} in general, or plain F_{p^m} when
// every coefficient already lies in the prime field).
// ---------------------------------------------------------------------------

// Estimated number of point evaluations (including any root-scan needed to
// embed the coefficients); saturates at uint64 max.
std::uint64_t singular_census_cost(const SparseMvPoly& P, const FieldCtx& ctx,
                                   unsigned m);

std::uint64_t singular_census(const SparseMvPoly& P, std::uint64_t c,
                              const FieldCtx& ctx, unsigned m,
                              std::uint64_t budget = kDefaultPointBudget,
                              unsigned jobs = 1);

}  // namespace ffdigits
