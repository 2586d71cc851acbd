// Acceptance suite: ten checks, one pass/fail line each, nonzero exit if any
// fails.  Every tolerance is pinned here in code; "exact" means integer or
// bit-for-bit equality, never an epsilon.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ffdigits/census.hpp"
#include "ffdigits/poly_io.hpp"
#include "support/oracle.hpp"

using namespace ffdigits;

namespace {

int failures = 0;
std::string detail;  // set by a check to explain its failure

void note(const std::string& s) { detail = s; }

void run(int index, const char* label, const std::function<bool()>& body) {
  detail.clear();
  const auto start = std::chrono::steady_clock::now();
  bool ok = false;
  std::string err;
  try {
    ok = body();
  } catch (const std::exception& e) {
    err = e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (!ok) ++failures;
  std::printf("criterion %2d: %-58s %s (%.2f s)\n", index, label,
              ok ? "PASS" : "FAIL", secs);
  if (!ok && !detail.empty()) std::printf("              %s\n", detail.c_str());
  if (!err.empty()) std::printf("              exception: %s\n", err.c_str());
  std::fflush(stdout);
}

std::uint64_t upow(std::uint64_t b, std::size_t e) {
  std::uint64_t out = 1;
  while (e--) out *= b;
  return out;
}

// ---------------------------------------------------------------------------
// 1. degree-one counts equal the closed form, exactly
// ---------------------------------------------------------------------------
bool degree_one_exactness() {
  for (std::uint64_t p : {2, 3, 5, 7}) {
    for (std::size_t r = 2; r <= 6; ++r) {
      if (upow(p, r) > 1'000'000) continue;
      FieldCtx ctx(p, r);
      const BasisPair pair = dual_basis(polynomial_basis(ctx));
      const DistReport rep = distribution(uni_monomial(ctx, 1), pair,
                                          DigitFunction::rudin_shapiro,
                                          kDefaultPointBudget, 4);
      for (std::uint64_t c = 0; c < p; ++c)
        if (rep.counts[c] != permutation_formula(p, r, c)) {
          note("count mismatch at p=" + std::to_string(p) +
               " r=" + std::to_string(r) + " c=" + std::to_string(c));
          return false;
        }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 2. the two-step recursion, formula and enumeration
// ---------------------------------------------------------------------------
bool recursion_exactness() {
  for (std::uint64_t p : {2, 3, 5}) {
    std::string why;
    if (!recursion_check(p, 6, 1'000'000, &why)) {
      note(why);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 3 + 4. lift identity, Frobenius-fixed coefficients, degree, top slice
// ---------------------------------------------------------------------------
bool lift_value_identity() {
  std::mt19937_64 rng(2024);
  for (auto [p, r] : {std::pair<std::uint64_t, std::size_t>{3, 2},
                      {3, 3},
                      {3, 4},
                      {5, 2},
                      {5, 3},
                      {7, 2}}) {
    FieldCtx ctx(p, r);
    const BasisPair pair = dual_basis(random_basis(ctx, rng));
    const std::vector<UniPolyFq> fs{uni_monomial(ctx, 2),
                                    uni_monomial(ctx, 3),
                                    random_uni_poly(ctx, 2, rng),
                                    random_uni_poly(ctx, 3, rng)};
    for (const UniPolyFq& f : fs) {
      const SparseMvPoly F = digit_lift(f, pair);
      const IdentityCheck chk =
          verify_value_identity(F, f, pair, /*exhaustive_limit=*/10'000);
      if (chk.points != upow(p, r) || chk.mismatches != 0) {
        note("mismatches=" + std::to_string(chk.mismatches) + " at p=" +
             std::to_string(p) + " r=" + std::to_string(r) + " f=" +
             format_uni_poly(f, ctx));
        return false;
      }
    }
  }
  return true;
}

bool lift_structure() {
  std::mt19937_64 rng(2024);  // same stream as criterion 3
  for (auto [p, r] : {std::pair<std::uint64_t, std::size_t>{3, 2},
                      {3, 3},
                      {3, 4},
                      {5, 2},
                      {5, 3},
                      {7, 2}}) {
    FieldCtx ctx(p, r);
    const BasisPair pair = dual_basis(random_basis(ctx, rng));
    const CouplingMatrix cm = coupling_matrix(pair);
    const std::vector<UniPolyFq> fs{uni_monomial(ctx, 2),
                                    uni_monomial(ctx, 3),
                                    random_uni_poly(ctx, 2, rng),
                                    random_uni_poly(ctx, 3, rng)};
    for (const UniPolyFq& f : fs) {
      const std::size_t d = uni_degree(f).value();
      const SparseMvPoly F = digit_lift(f, pair);

      for (const auto& [e, coeff] : F.terms())
        if (!ctx.in_prime_field(coeff) ||
            ctx.frobenius(coeff, 1) != coeff) {
          note("coefficient not Frobenius-fixed at p=" + std::to_string(p) +
               " r=" + std::to_string(r));
          return false;
        }

      if (d >= 2 && d < p && F.degree() != 2 * d) {
        note("deg F = " + std::to_string(F.degree().value_or(0)) +
             ", expected " + std::to_string(2 * d));
        return false;
      }

      // Q_{2d} must be exactly sum a[j][k] Y_j^d Y_k^d once f is monic
      UniPolyFq fm = f;
      fm.c.back() = ctx.one();
      const SparseMvPoly Q = twisted_lift(fm, cm, ctx);
      SparseMvPoly expect(r);
      for (std::size_t j = 0; j < r; ++j)
        for (std::size_t k = 0; k < r; ++k) {
          SparseMvPoly::Exps e(r, 0);
          e[j] += static_cast<std::uint32_t>(d);
          e[k] += static_cast<std::uint32_t>(d);
          expect.add_term(e, cm.a[j][k], ctx);
        }
      if (homogeneous_part(Q, static_cast<std::uint32_t>(2 * d)).terms() !=
          expect.terms()) {
        note("top slice of Q differs at p=" + std::to_string(p) +
             " r=" + std::to_string(r) + " d=" + std::to_string(d));
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 5. coupling identities, recomputed outside the library
// ---------------------------------------------------------------------------
bool coupling_identities() {
  std::mt19937_64 rng(501);
  int built = 0;
  while (built < 50) {
    for (auto [p, r] : {std::pair<std::uint64_t, std::size_t>{3, 4},
                        {5, 3},
                        {7, 2},
                        {11, 2}}) {
      FieldCtx ctx(p, r);
      const BasisPair pair = dual_basis(random_basis(ctx, rng));
      const CouplingMatrix cm = coupling_matrix(pair);

      FieldElem lhs = ctx.zero();
      for (std::size_t j = 0; j < r; ++j)
        lhs = ctx.add(lhs, ctx.mul(cm.a[j][0],
                                   ctx.frobenius(pair.basis.elems[0], j)));
      if (lhs != pair.dual.elems[1]) {
        note("column identity failed at p=" + std::to_string(p));
        return false;
      }
      for (std::size_t j = 0; j < r; ++j)
        for (std::size_t k = 0; k < r; ++k)
          if (ctx.frobenius(cm.a[j][k], 1) !=
              cm.a[(j + 1) % r][(k + 1) % r]) {
            note("shift symmetry failed at p=" + std::to_string(p));
            return false;
          }
      ++built;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 6. the adjacent-products-vanish digit system and its axis singular points
// ---------------------------------------------------------------------------
bool special_construction() {
  for (std::size_t r : {4, 5, 6}) {
    for (std::uint64_t p : {7, 11, 13}) {
      FieldCtx ctx(p, r);
      const BasisPair pair = special_delta(ctx);

      FieldElem chain = ctx.zero();
      for (std::size_t i = 0; i + 1 < r; ++i)
        chain = ctx.add(chain,
                        ctx.mul(pair.dual.elems[i], pair.dual.elems[i + 1]));
      if (!chain.is_zero()) {
        note("adjacent products at p=" + std::to_string(p) +
             " r=" + std::to_string(r));
        return false;
      }
      if (!is_basis(pair.dual) || !is_basis(pair.basis)) {
        note("independence at p=" + std::to_string(p));
        return false;
      }

      const CouplingMatrix cm = coupling_matrix(pair);
      for (std::size_t j = 0; j < r; ++j)
        if (!cm.a[j][j].is_zero()) {
          note("a[j][j] != 0 at p=" + std::to_string(p) +
               " r=" + std::to_string(r) + " j=" + std::to_string(j));
          return false;
        }

      const SparseMvPoly Q = twisted_lift(uni_monomial(ctx, 2), cm, ctx);
      const SparseMvPoly top = homogeneous_part(Q, 4);
      const std::uint64_t hits =
          singular_census(top, 0, ctx, 1, kDefaultPointBudget, 4);
      if (hits < r * (p - 1)) {
        note("axis census " + std::to_string(hits) + " < " +
             std::to_string(r * (p - 1)) + " at p=" + std::to_string(p) +
             " r=" + std::to_string(r));
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 7. Thue–Morse: smooth monomial systems and the hard deviation bound
// ---------------------------------------------------------------------------
bool thue_morse_checks() {
  for (auto [p, r, d] : {std::tuple<std::uint64_t, std::size_t, std::size_t>{
                             5, 3, 2},
                         {7, 2, 3},
                         {7, 3, 2}}) {
    FieldCtx ctx(p, r);
    const BasisPair pair = dual_basis(polynomial_basis(ctx));
    for (std::uint64_t c = 1; c < p; ++c) {
      const SparseMvPoly Q = thue_morse_lift(uni_monomial(ctx, d), pair, c);
      if (singular_census(Q, 0, ctx, 1) != 0) {
        note("singular point at p=" + std::to_string(p) +
             " r=" + std::to_string(r) + " c=" + std::to_string(c));
        return false;
      }
    }
  }

  std::mt19937_64 rng(701);
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) {
    for (std::size_t r = 2; r <= 8; ++r) {
      if (upow(p, r) > 100'000) continue;
      FieldCtx ctx(p, r);
      const BasisPair pair = dual_basis(random_basis(ctx, rng));
      std::vector<UniPolyFq> fs{uni_monomial(ctx, 2), uni_monomial(ctx, 3),
                                random_uni_poly(ctx, 3, rng)};
      for (const UniPolyFq& f : fs) {
        const std::size_t d = uni_degree(f).value();
        if (std::gcd<std::uint64_t>(d, p) != 1) continue;
        const DistReport rep = distribution(f, pair, DigitFunction::thue_morse,
                                            kDefaultPointBudget, 4);
        const Ds13Result res = ds13_check(rep, d);
        if (!res.ok) {
          note("bound violated at p=" + std::to_string(p) +
               " r=" + std::to_string(r) + " f=" + rep.f +
               " max_dev=" + std::to_string(res.max_abs_deviation));
          return false;
        }
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 8. cross-prime trend of the relative deviation
// ---------------------------------------------------------------------------
bool cross_prime_trend() {
  const SweepResult res =
      sweep(2, 4, DigitFunction::rudin_shapiro, {3, 5, 7, 11, 13},
            BasisPolicy::polynomial, {FPolicy::monomial, 2, 0, ""}, 1,
            kDefaultPointBudget, 4);
  if (res.entries.size() != 5) return false;
  const double first = res.entries.front().rel_dev;   // p = 3
  const double last = res.entries.back().rel_dev;     // p = 13
  if (!(last < first)) {
    note("rel_dev " + format_double(last) + " at p=13 not below " +
         format_double(first) + " at p=3");
    return false;
  }
  const double at7 = res.entries[2].max_normalized;
  const double at13 = res.entries[4].max_normalized;
  if (at13 > at7) {
    note("max normalized grew from " + format_double(at7) + " (p=7) to " +
         format_double(at13) + " (p=13)");
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 9. main enumeration vs the structurally independent oracle
// ---------------------------------------------------------------------------
bool oracle_equivalence() {
  const std::pair<std::uint64_t, std::size_t> grid[] = {
      {2, 4}, {2, 6}, {3, 2}, {3, 3}, {3, 4}, {5, 2}, {5, 3}, {7, 2},
      {7, 3}, {11, 2}, {13, 2}, {2, 8}, {3, 5}, {5, 4}, {17, 2}, {2, 5},
      {3, 6}, {5, 2}, {7, 2}, {11, 2}};
  for (int i = 0; i < 20; ++i) {
    const auto [p, r] = grid[i];
    std::mt19937_64 rng(mix_seed(900, i));
    FieldCtx ctx(p, r);
    const BasisPair pair = dual_basis(random_basis(ctx, rng));
    const UniPolyFq f = random_uni_poly(ctx, 1 + i % 3, rng);
    const DigitFunction kind = (i % 2 || r < 2) ? DigitFunction::thue_morse
                                                : DigitFunction::rudin_shapiro;
    const DistReport rep = distribution(f, pair, kind);
    if (rep.counts != testing::oracle_distribution(f, pair, kind)) {
      note("divergence on configuration " + std::to_string(i) + " (p=" +
           std::to_string(p) + ", r=" + std::to_string(r) + ")");
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// 10. worker count never changes the emitted bytes
// ---------------------------------------------------------------------------
std::string slurp(const char* path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool parallel_determinism() {
  const std::string base = std::string(FFDIGITS_CLI_PATH) +
                           " count --p 13 --r 4 --f X^2 --kind R";
  if (std::system((base + " --jobs 1 --output acceptance_j1.csv").c_str()) !=
      0)
    return false;
  if (std::system((base + " --jobs 8 --output acceptance_j8.csv").c_str()) !=
      0)
    return false;
  const std::string a = slurp("acceptance_j1.csv");
  const std::string b = slurp("acceptance_j8.csv");
  std::remove("acceptance_j1.csv");
  std::remove("acceptance_j8.csv");
  if (a.empty() || a != b) {
    note("outputs differ or are empty (" + std::to_string(a.size()) +
         " vs " + std::to_string(b.size()) + " bytes)");
    return false;
  }
  return true;
}

}  // namespace

int main() {
  run(1, "degree-one counts equal the closed form", degree_one_exactness);
  run(2, "two-step recursion, formula and enumeration", recursion_exactness);
  run(3, "lift value identity, exhaustive, zero mismatches",
      lift_value_identity);
  run(4, "lift coefficients fixed, degree 2d, exact top slice",
      lift_structure);
  run(5, "coupling identities on 50 seeded bases", coupling_identities);
  run(6, "special digit system and axis singular points",
      special_construction);
  run(7, "thue_morse smooth systems and hard deviation bound",
      thue_morse_checks);
  run(8, "relative deviation shrinks from p=3 to p=13", cross_prime_trend);
  run(9, "enumeration equals the independent oracle on 20 configs",
      oracle_equivalence);
  run(10, "1-worker and 8-worker CSV outputs byte-identical",
      parallel_determinism);

  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
