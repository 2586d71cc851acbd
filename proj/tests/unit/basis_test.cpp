#include <random>

#include "doctest.h"
#include "ffdigits/basis.hpp"

using namespace ffdigits;

namespace {

void check_duality(const BasisPair& pair) {
  const FieldCtx& ctx = pair.ctx();
  for (std::size_t i = 0; i < ctx.r(); ++i)
    for (std::size_t j = 0; j < ctx.r(); ++j) {
      const std::uint64_t t =
          ctx.trace(ctx.mul(pair.dual.elems[i], pair.basis.elems[j]));
      CHECK(t == (i == j ? 1u : 0u));
    }
}

}  // namespace

TEST_CASE("dual of the polynomial basis of F_9") {
  FieldCtx ctx(3, 2);
  const BasisPair pair = dual_basis(polynomial_basis(ctx));
  REQUIRE(pair.basis.elems.size() == 2);
  CHECK(pair.basis.elems[0] == ctx.one());
  CHECK(pair.basis.elems[1] == ctx.alpha());
  CHECK(pair.dual.elems[0] == ctx.from_fp(2));
  CHECK(pair.dual.elems[1] == ctx.alpha());
  check_duality(pair);
}

TEST_CASE("duality identity for seeded random bases") {
  std::mt19937_64 rng(101);
  for (auto [p, r] : {std::pair<std::uint64_t, std::size_t>{3, 4},
                      {5, 2},
                      {7, 2},
                      {11, 2},
                      {13, 3}}) {
    FieldCtx ctx(p, r);
    for (int iter = 0; iter < 4; ++iter) {
      const BasisPair pair = dual_basis(random_basis(ctx, rng));
      check_duality(pair);
    }
  }
}

TEST_CASE("dual of dual is the original basis") {
  std::mt19937_64 rng(55);
  FieldCtx ctx(5, 3);
  for (int iter = 0; iter < 10; ++iter) {
    const OrderedBasis b = random_basis(ctx, rng);
    const BasisPair pair = dual_basis(b);
    const BasisPair back = dual_basis(pair.dual);
    REQUIRE(back.dual.elems.size() == b.elems.size());
    for (std::size_t i = 0; i < b.elems.size(); ++i)
      CHECK(back.dual.elems[i] == b.elems[i]);
  }
}

TEST_CASE("dependent sets are rejected") {
  FieldCtx ctx(3, 2);
  OrderedBasis bad{&ctx, {ctx.one(), ctx.from_fp(2)}};  // 2 = -1, dependent
  CHECK_FALSE(is_basis(bad));
  CHECK_THROWS_AS(dual_basis(bad), std::invalid_argument);
  OrderedBasis repeated{&ctx, {ctx.alpha(), ctx.alpha()}};
  CHECK_THROWS_AS(dual_basis(repeated), std::invalid_argument);
}

TEST_CASE("digit extraction goldens") {
  FieldCtx ctx(3, 2);
  const BasisPair pair = dual_basis(polynomial_basis(ctx));
  CHECK(digits(ctx.zero(), pair) == DigitVector{0, 0});
  CHECK(digits(pair.basis.elems[0], pair) == DigitVector{1, 0});
  CHECK(digits(pair.basis.elems[1], pair) == DigitVector{0, 1});
  CHECK(digits(ctx.element({1, 2}), pair) == DigitVector{1, 2});
}

TEST_CASE("digit round-trips") {
  // exhaustive when the field is small
  FieldCtx small(3, 4);
  std::mt19937_64 rng(77);
  const BasisPair pair = dual_basis(random_basis(small, rng));
  std::vector<std::uint64_t> coords(4, 0);
  for (int n = 0; n < 81; ++n) {
    const FieldElem x = small.element(coords);
    CHECK(from_digits(digits(x, pair), pair) == x);
    std::size_t pos = 0;
    while (pos < 4 && ++coords[pos] == 3) coords[pos++] = 0;
  }
  // sampled in a bigger one, both directions
  FieldCtx big(7, 3);
  const BasisPair bp = dual_basis(random_basis(big, rng));
  for (int iter = 0; iter < 1000; ++iter) {
    DigitVector x{rand_below(rng, 7), rand_below(rng, 7), rand_below(rng, 7)};
    CHECK(digits(from_digits(x, bp), bp) == x);
  }
  DigitVector wrong{1, 2};
  CHECK_THROWS_AS(from_digits(wrong, bp), std::invalid_argument);
}

TEST_CASE("rudin_shapiro goldens") {
  FieldCtx ctx(3, 3);
  std::mt19937_64 rng(13);
  const BasisPair pair = dual_basis(random_basis(ctx, rng));
  CHECK(rudin_shapiro(ctx.zero(), pair) == 0);
  // digits (1,2,1): 1*2 + 2*1 = 4 = 1 mod 3
  CHECK(rudin_shapiro(from_digits({1, 2, 1}, pair), pair) == 1);

  FieldCtx line(5, 1);
  const BasisPair lp = dual_basis(polynomial_basis(line));
  CHECK_THROWS_AS(rudin_shapiro(line.one(), lp), std::invalid_argument);

  // a zero middle digit kills every product
  FieldCtx four(5, 4);
  const BasisPair fp = dual_basis(random_basis(four, rng));
  for (std::uint64_t a = 0; a < 5; ++a)
    for (std::uint64_t b = 0; b < 5; ++b)
      CHECK(rudin_shapiro(from_digits({a, 0, 0, b}, fp), fp) == 0);
}

TEST_CASE("thue_morse goldens and trace cross-check") {
  FieldCtx ctx(5, 3);
  std::mt19937_64 rng(17);
  const BasisPair pair = dual_basis(random_basis(ctx, rng));
  CHECK(thue_morse(ctx.zero(), pair) == 0);
  CHECK(thue_morse(ctx.add(pair.basis.elems[0], pair.basis.elems[1]), pair) ==
        2);

  FieldElem delta = ctx.zero();
  for (const auto& d : pair.dual.elems) delta = ctx.add(delta, d);
  for (int iter = 0; iter < 1000; ++iter) {
    const FieldElem x = random_element(ctx, rng);
    CHECK(thue_morse(x, pair) == ctx.trace(ctx.mul(delta, x)));
  }
}

TEST_CASE("special_delta golden construction for r = 4") {
  FieldCtx ctx(7, 4);
  const BasisPair pair = special_delta(ctx);
  const FieldElem a = ctx.alpha();
  REQUIRE(pair.dual.elems.size() == 4);
  CHECK(pair.dual.elems[0] == ctx.pow(a, 3));
  CHECK(pair.dual.elems[1] == ctx.one());
  CHECK(pair.dual.elems[2] == ctx.pow(a, 2));
  CHECK(pair.dual.elems[3] == ctx.neg(ctx.add(a, ctx.one())));
  check_duality(pair);
}

TEST_CASE("special_delta golden construction for r = 5") {
  FieldCtx ctx(11, 5);
  const BasisPair pair = special_delta(ctx);
  const FieldElem a = ctx.alpha();
  CHECK(pair.dual.elems[0] == ctx.pow(a, 4));
  CHECK(pair.dual.elems[1] == ctx.one());
  CHECK(pair.dual.elems[2] == ctx.pow(a, 3));
  CHECK(pair.dual.elems[3] == a);
  CHECK(pair.dual.elems[4] ==
        ctx.neg(ctx.add(ctx.scale(ctx.pow(a, 3), 2), ctx.pow(a, 2))));
  check_duality(pair);
}

TEST_CASE("special_delta adjacent products cancel across the grid") {
  for (std::size_t r : {4, 5, 6}) {
    for (std::uint64_t p : {7, 11, 13}) {
      FieldCtx ctx(p, r);
      const BasisPair pair = special_delta(ctx);
      FieldElem chain = ctx.zero();
      for (std::size_t i = 0; i + 1 < r; ++i)
        chain = ctx.add(chain,
                        ctx.mul(pair.dual.elems[i], pair.dual.elems[i + 1]));
      CHECK(chain.is_zero());
      check_duality(pair);
    }
  }
}

TEST_CASE("special_delta rejects degenerate instances") {
  FieldCtx tiny(3, 3);
  CHECK_THROWS_AS(special_delta(tiny), std::invalid_argument);  // r < 4
  // at p = 2, r = 7 the closing element collides with an earlier power
  FieldCtx collide(2, 7);
  CHECK_THROWS_AS(special_delta(collide), std::invalid_argument);
}

TEST_CASE("seeded randomness is reproducible") {
  std::mt19937_64 a(99), b(99);
  for (int iter = 0; iter < 100; ++iter)
    CHECK(rand_below(a, 97) == rand_below(b, 97));
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) != mix_seed(2, 2));

  FieldCtx ctx(5, 3);
  std::mt19937_64 r1(7), r2(7);
  const OrderedBasis b1 = random_basis(ctx, r1);
  const OrderedBasis b2 = random_basis(ctx, r2);
  for (std::size_t i = 0; i < 3; ++i) CHECK(b1.elems[i] == b2.elems[i]);
}
