#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ffdigits/ff.hpp"

namespace ffdigits {

// Ordered basis (b_1, ..., b_r) of F_{p^r} over F_p.  Non-owning: the field
// context must outlive every basis built on it.
struct OrderedBasis {
  const FieldCtx* ctx = nullptr;
  std::vector<FieldElem> elems;
};

// A basis together with its trace-dual basis, i.e. the unique tuple with
// trace(dual[i] * basis[j]) == (i == j).  Digit extraction always runs
// through the dual side.
struct BasisPair {
  OrderedBasis basis;
  OrderedBasis dual;
  const FieldCtx& ctx() const { return *basis.ctx; }
};

// Digit vector (x_1, ..., x_r) of an element with respect to a basis pair.
using DigitVector = std::vector<std::uint64_t>;

OrderedBasis polynomial_basis(const FieldCtx& ctx);  // (1, alpha, ...)

bool is_basis(const OrderedBasis& b);

// Dual basis through the Gram matrix of the trace form: with
// G[i][j] = trace(b_i b_j), the dual is d_i = sum_j inv(G)[i][j] b_j.
// Verifies the duality identity exhaustively before returning; rejects
// element tuples that are not a basis.
BasisPair dual_basis(const OrderedBasis& b);

// x_i = trace(dual_i * x); x == sum_i digits[i] * basis_i.
DigitVector digits(const FieldElem& x, const BasisPair& pair);
FieldElem from_digits(const DigitVector& x, const BasisPair& pair);

// sum_{i=1}^{r-1} x_i x_{i+1} mod p over the digits of x; needs r >= 2.
std::uint64_t rudin_shapiro(const FieldElem& x, const BasisPair& pair);

// sum_{i=1}^{r} x_i mod p over the digits of x.
std::uint64_t thue_morse(const FieldElem& x, const BasisPair& pair);

// Digit system (d_1, ..., d_r) built from powers of alpha so that
// sum_i d_i d_{i+1} == 0, returned as the dual side of the pair (so digit
// extraction uses exactly these elements).  Requires r >= 4.  For small p
// the closing element can become linearly dependent on the others; that
// raises "construction degenerate for this p".
BasisPair special_delta(const FieldCtx& ctx);

// Deterministic, platform-independent draw from [0, n).
std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n);

// One splitmix64 round; used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

FieldElem random_element(const FieldCtx& ctx, std::mt19937_64& rng);
FieldElem random_nonzero(const FieldCtx& ctx, std::mt19937_64& rng);
// Rejection-samples element tuples until they are linearly independent.
OrderedBasis random_basis(const FieldCtx& ctx, std::mt19937_64& rng);

}  // namespace ffdigits
