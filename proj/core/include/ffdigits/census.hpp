#pragma once

#include <string>
#include <vector>

#include "ffdigits/lift.hpp"

namespace ffdigits {

// ---------------------------------------------------------------------------
// Exhaustive digit-function distributions over F_{p^r}.
// ---------------------------------------------------------------------------

enum class DigitFunction { rudin_shapiro, thue_morse };

char digit_function_letter(DigitFunction kind);          // 'R' / 'T'
DigitFunction digit_function_from_letter(char letter);   // accepts 'R'/'T'

struct DistReport {
  std::uint64_t p = 0;
  std::size_t r = 0;
  std::size_t d = 0;   // degree of f (0 for constant / zero f)
  std::string f;       // f in the term grammar of poly_io
  DigitFunction kind = DigitFunction::rudin_shapiro;
  std::vector<std::uint64_t> counts;  // counts[c] = |{xi : g(f(xi)) = c}|
};

// Exact counts by full enumeration: xi runs over all of F_{p^r} as a digit
// odometer in the pair's basis (last digit fastest), f(xi) goes through
// Horner, the digits of the value come out through the dual basis, and the
// digit function tallies one of p classes.  Deterministic; the worker split
// never changes the result (histograms merge by addition).
DistReport distribution(const UniPolyFq& f, const BasisPair& pair,
                        DigitFunction kind,
                        std::uint64_t budget = kDefaultPointBudget,
                        unsigned jobs = 1);

// Closed-form count for the quadratic-form case (f a permutation, kind R):
// p^{r-1} - p^{floor((r-1)/2)}, plus p^{floor((r+1)/2)} more when c = 0.
// Requires r >= 2; throws overflow_error when the count exceeds 64 bits.
std::uint64_t permutation_formula(std::uint64_t p, std::size_t r,
                                  std::uint64_t c);

// Verifies the two-step recursion N_r(c) = p*N_{r-2}(c) + (p-1)*p^{r-2}
// for every c and every 4 <= r <= r_max, and cross-checks the closed form
// against brute-force tallies of x_1*x_2 + ... + x_{r-1}*x_r wherever p^r
// fits the enumeration budget.  Returns false and describes the first
// failing (p, r, c) through `counterexample` (when given) instead of
// throwing.
bool recursion_check(std::uint64_t p, std::size_t r_max,
                     std::uint64_t enum_budget = 1'000'000,
                     std::string* counterexample = nullptr);

// ---------------------------------------------------------------------------
// Deviation reports.
// ---------------------------------------------------------------------------

// The deviation exponent h depends only on the parity of r and whether
// c = 0; it is a quarter-integer, returned here as 4h (0, 1, 2 or 3).
unsigned deviation_exponent_quarters(std::size_t r, bool c_is_zero);

struct DeviationRow {
  std::uint64_t c = 0;
  std::uint64_t count = 0;
  std::uint64_t main_term = 0;      // p^{r-1}
  std::uint64_t abs_deviation = 0;  // |count - p^{r-1}|
  unsigned h_quarters = 0;          // 4h
  double normalized = 0.0;          // abs_deviation / p^{(3r+1)/4 - h}
};

// Per-class deviation rows for a kind-R report.  No verdict: the constant
// in front of the predicted power of p is unknown, so judgments come from
// cross-p sweeps, not single rows.  d is recorded by the caller's schema;
// it does not enter the row arithmetic.
std::vector<DeviationRow> hk_report(const DistReport& rep, std::size_t d);

struct Ds13Row {
  std::uint64_t c = 0;
  std::uint64_t count = 0;
  std::uint64_t abs_deviation = 0;
  bool within = false;
};

struct Ds13Result {
  std::vector<Ds13Row> rows;
  std::uint64_t max_abs_deviation = 0;
  bool ok = false;  // every class within the bound
};

// Hard bound for kind-T reports: |counts[c] - p^{r-1}| <= (d-1) * p^{r/2}
// for every c, checked exactly as an integer comparison of squares.
// Requires kind T and gcd(d, p) = 1 (inapplicable otherwise).
Ds13Result ds13_check(const DistReport& rep, std::size_t d);

// ---------------------------------------------------------------------------
// Sweep orchestration: one distribution per prime, deterministic policies.
// ---------------------------------------------------------------------------

enum class BasisPolicy { polynomial, special_dual, seeded_random };

std::string basis_policy_name(BasisPolicy policy);
BasisPolicy basis_policy_from_name(const std::string& name);

// polynomial: dual pair of (1, alpha, ..., alpha^{r-1});
// special_dual: the adjacent-products-vanish construction;
// seeded_random: rejection-sampled basis from the given seed.
BasisPair make_basis(const FieldCtx& ctx, BasisPolicy policy,
                     std::uint64_t seed);

enum class FPolicy { monomial, seeded_random, user };

struct FSpec {
  FPolicy policy = FPolicy::monomial;
  std::size_t d = 1;       // degree for monomial / seeded_random
  std::uint64_t seed = 0;  // seeded_random only
  std::string text;        // user only: term-grammar source
};

UniPolyFq make_poly(const FieldCtx& ctx, const FSpec& spec);

// max_c |counts[c] / p^{r-1} - 1|
double relative_deviation(const DistReport& rep);

struct SweepEntry {
  std::uint64_t p = 0;
  DistReport report;
  double rel_dev = 0.0;
  double max_normalized = 0.0;  // max hk_report row (kind R; 0 for T)
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // ascending p
  bool trend_checked = false;  // r >= 4, >= 2 primes, span >= factor 4
  bool trend_ok = false;       // rel_dev at largest p < rel_dev at smallest
};

// Runs one distribution per prime in p_list (sorted ascending, duplicates
// dropped) with the basis and f chosen deterministically from `seed`.  The
// trend flag is soft: it is reported, never thrown.
SweepResult sweep(std::size_t d, std::size_t r, DigitFunction kind,
                  std::vector<std::uint64_t> p_list, BasisPolicy basis_policy,
                  const FSpec& f_policy, std::uint64_t seed = 1,
                  std::uint64_t budget = kDefaultPointBudget,
                  unsigned jobs = 1);

// ---------------------------------------------------------------------------
// CSV emission (shared by the CLI and tests).
// ---------------------------------------------------------------------------

std::string csv_header();

// One row per class c, ascending.  Kind-R rows carry h and the normalized
// deviation; kind-T rows leave those two fields empty (their bound is a
// hard inequality reported separately, not a normalized statistic).
std::vector<std::string> csv_rows(const DistReport& rep,
                                  const std::string& basis_policy);

// Fixed "%.10g" rendering so equal doubles always print identically.
std::string format_double(double v);

}  // namespace ffdigits
