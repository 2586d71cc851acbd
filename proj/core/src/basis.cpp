#include "ffdigits/basis.hpp"

#include <stdexcept>
#include <string>

#include "ffdigits/fp_linalg.hpp"

namespace ffdigits {

namespace {

void check_pair_sizes(const BasisPair& pair) {
  const auto r = pair.ctx().r();
  if (pair.basis.elems.size() != r || pair.dual.elems.size() != r)
    throw std::invalid_argument("basis pair has the wrong number of elements");
}

FpMatrix coordinate_matrix(const OrderedBasis& b) {
  // column j carries the coordinates of b_j
  const auto r = b.ctx->r();
  FpMatrix m(r, std::vector<std::uint64_t>(b.elems.size(), 0));
  for (std::size_t j = 0; j < b.elems.size(); ++j)
    for (std::size_t i = 0; i < r; ++i) m[i][j] = b.elems[j].c[i];
  return m;
}

}  // namespace

OrderedBasis polynomial_basis(const FieldCtx& ctx) {
  OrderedBasis b{&ctx, {}};
  FieldElem cur = ctx.one();
  for (std::size_t i = 0; i < ctx.r(); ++i) {
    b.elems.push_back(cur);
    if (i + 1 < ctx.r()) cur = ctx.mul(cur, ctx.alpha());
  }
  return b;
}

bool is_basis(const OrderedBasis& b) {
  if (!b.ctx || b.elems.size() != b.ctx->r()) return false;
  return fp_rank(coordinate_matrix(b), b.ctx->p()) == b.ctx->r();
}

BasisPair dual_basis(const OrderedBasis& b) {
  if (!b.ctx) throw std::invalid_argument("dual_basis: missing field context");
  const FieldCtx& ctx = *b.ctx;
  const std::size_t r = ctx.r();
  if (b.elems.size() != r)
    throw std::invalid_argument("dual_basis: expected exactly r elements");

  FpMatrix gram(r, std::vector<std::uint64_t>(r, 0));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      gram[i][j] = ctx.trace(ctx.mul(b.elems[i], b.elems[j]));
  const auto gram_inv = fp_invert(gram, ctx.p());
  if (!gram_inv)
    throw std::invalid_argument(
        "dual_basis: elements are not a basis (singular Gram matrix)");

  BasisPair pair{b, OrderedBasis{&ctx, {}}};
  for (std::size_t i = 0; i < r; ++i) {
    FieldElem d = ctx.zero();
    for (std::size_t j = 0; j < r; ++j)
      d = ctx.add(d, ctx.scale(b.elems[j], (*gram_inv)[i][j]));
    pair.dual.elems.push_back(std::move(d));
  }

  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      const std::uint64_t t =
          ctx.trace(ctx.mul(pair.dual.elems[i], pair.basis.elems[j]));
      if (t != (i == j ? 1u : 0u))
        throw invariant_error("dual_basis: duality identity failed at (" +
                              std::to_string(i) + "," + std::to_string(j) +
                              ")");
    }
  return pair;
}

DigitVector digits(const FieldElem& x, const BasisPair& pair) {
  check_pair_sizes(pair);
  const FieldCtx& ctx = pair.ctx();
  DigitVector out(ctx.r());
  for (std::size_t i = 0; i < ctx.r(); ++i)
    out[i] = ctx.trace(ctx.mul(pair.dual.elems[i], x));
  return out;
}

FieldElem from_digits(const DigitVector& x, const BasisPair& pair) {
  check_pair_sizes(pair);
  const FieldCtx& ctx = pair.ctx();
  if (x.size() != ctx.r())
    throw std::invalid_argument("from_digits: expected exactly r digits");
  FieldElem out = ctx.zero();
  for (std::size_t i = 0; i < ctx.r(); ++i)
    out = ctx.add(out, ctx.scale(pair.basis.elems[i], x[i]));
  return out;
}

std::uint64_t rudin_shapiro(const FieldElem& x, const BasisPair& pair) {
  const FieldCtx& ctx = pair.ctx();
  if (ctx.r() < 2)
    throw std::invalid_argument(
        "rudin_shapiro: needs extension degree r >= 2");
  const DigitVector d = digits(x, pair);
  unsigned __int128 acc = 0;
  for (std::size_t i = 0; i + 1 < d.size(); ++i)
    acc += static_cast<unsigned __int128>(d[i]) * d[i + 1];
  return static_cast<std::uint64_t>(acc % ctx.p());
}

std::uint64_t thue_morse(const FieldElem& x, const BasisPair& pair) {
  const FieldCtx& ctx = pair.ctx();
  const DigitVector d = digits(x, pair);
  std::uint64_t acc = 0;
  for (auto v : d) acc = (acc + v) % ctx.p();
  return acc;
}

BasisPair special_delta(const FieldCtx& ctx) {
  const std::size_t r = ctx.r();
  const std::uint64_t p = ctx.p();
  if (r < 4) throw std::invalid_argument("special_delta: needs r >= 4");

  std::vector<FieldElem> delta(r, ctx.zero());
  // odd positions walk the powers downward, even positions upward
  for (std::size_t i = 0; 2 * i + 1 <= r - 1; ++i)
    delta[2 * i] = ctx.pow(ctx.alpha(), r - 1 - i);
  for (std::size_t i = 0; 2 * i + 2 <= r - 1; ++i)
    delta[2 * i + 1] = ctx.pow(ctx.alpha(), i);
  if (r % 2 == 0) {
    // -(r/2 - 1) * (alpha^{r/2-1} + alpha^{r/2-2})
    const std::uint64_t k = (r / 2 - 1) % p;
    delta[r - 1] = ctx.neg(ctx.scale(
        ctx.add(ctx.pow(ctx.alpha(), r / 2 - 1), ctx.pow(ctx.alpha(), r / 2 - 2)),
        k));
  } else {
    // -(((r-1)/2) alpha^{(r+1)/2} + ((r-3)/2) alpha^{(r-1)/2})
    const std::uint64_t k1 = ((r - 1) / 2) % p;
    const std::uint64_t k2 = ((r - 3) / 2) % p;
    delta[r - 1] = ctx.neg(
        ctx.add(ctx.scale(ctx.pow(ctx.alpha(), (r + 1) / 2), k1),
                ctx.scale(ctx.pow(ctx.alpha(), (r - 1) / 2), k2)));
  }

  FieldElem chain = ctx.zero();
  for (std::size_t i = 0; i + 1 < r; ++i)
    chain = ctx.add(chain, ctx.mul(delta[i], delta[i + 1]));
  if (!chain.is_zero())
    throw invariant_error("special_delta: adjacent-product sum is nonzero");

  OrderedBasis d{&ctx, std::move(delta)};
  if (!is_basis(d))
    throw std::invalid_argument(
        "special_delta: construction degenerate for this p (elements are "
        "linearly dependent)");

  // dual_basis(d) returns (d, dual-of-d); we want the digit-extracting side
  // to be d itself, so flip the roles.
  BasisPair dd = dual_basis(d);
  return BasisPair{std::move(dd.dual), std::move(dd.basis)};
}

std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
  // plain modulo: the tiny bias is irrelevant here and the result is
  // identical on every platform, unlike uniform_int_distribution
  return rng() % n;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

FieldElem random_element(const FieldCtx& ctx, std::mt19937_64& rng) {
  FieldElem out = ctx.zero();
  for (auto& v : out.c) v = rand_below(rng, ctx.p());
  return out;
}

FieldElem random_nonzero(const FieldCtx& ctx, std::mt19937_64& rng) {
  while (true) {
    FieldElem e = random_element(ctx, rng);
    if (!e.is_zero()) return e;
  }
}

OrderedBasis random_basis(const FieldCtx& ctx, std::mt19937_64& rng) {
  while (true) {
    OrderedBasis b{&ctx, {}};
    for (std::size_t i = 0; i < ctx.r(); ++i)
      b.elems.push_back(random_element(ctx, rng));
    if (is_basis(b)) return b;
  }
}

}  // namespace ffdigits
