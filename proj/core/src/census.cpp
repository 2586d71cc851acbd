#include "ffdigits/census.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "ffdigits/poly_io.hpp"

namespace ffdigits {

namespace {

std::uint64_t pow_sat(std::uint64_t base, std::uint64_t exp) {
  unsigned __int128 out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    out *= base;
    if (out > ~std::uint64_t{0}) return ~std::uint64_t{0};
  }
  return static_cast<std::uint64_t>(out);
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp,
                          const char* who) {
  unsigned __int128 out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    out *= base;
    if (out > ~std::uint64_t{0})
      throw std::overflow_error(std::string(who) +
                                ": count exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(out);
}

}  // namespace

char digit_function_letter(DigitFunction kind) {
  return kind == DigitFunction::rudin_shapiro ? 'R' : 'T';
}

DigitFunction digit_function_from_letter(char letter) {
  if (letter == 'R' || letter == 'r') return DigitFunction::rudin_shapiro;
  if (letter == 'T' || letter == 't') return DigitFunction::thue_morse;
  throw std::invalid_argument("unknown digit function (expected R or T)");
}

// ---------------------------------------------------------------------------
// distribution
// ---------------------------------------------------------------------------

namespace {

struct DistPlan {
  const FieldCtx* ctx = nullptr;
  std::size_t r = 0;
  std::uint64_t p = 0;
  std::size_t ncoeffs = 0;              // of f, lowest degree first
  std::vector<std::uint64_t> fc;        // flat, r limbs per coefficient
  std::vector<std::uint64_t> basis;     // flat basis coordinates, r per elem
  std::vector<std::uint64_t> trows;     // trows[i*r+j] = Tr(dual[i]*alpha^j)
  bool rudin = true;
};

void dist_worker(const DistPlan& pl, std::uint64_t lo, std::uint64_t hi,
                 std::vector<std::uint64_t>& counts) {
  const FieldCtx& ctx = *pl.ctx;
  const std::size_t r = pl.r;
  const std::uint64_t p = pl.p;

  // digit odometer position lo, last digit fastest
  std::vector<std::uint64_t> x(r, 0);
  {
    std::uint64_t n = lo;
    for (std::size_t i = r; i-- > 0;) {
      x[i] = n % p;
      n /= p;
    }
  }
  std::vector<std::uint64_t> xi(r, 0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t l = 0; l < r; ++l)
      xi[l] = (xi[l] + x[i] * pl.basis[i * r + l]) % p;

  std::vector<std::uint64_t> acc(r), out(r), work(2 * r), dig(r);
  for (std::uint64_t n = lo; n < hi; ++n) {
    // f(xi) by Horner
    if (pl.ncoeffs == 0) {
      std::fill(acc.begin(), acc.end(), 0);
    } else {
      std::copy(pl.fc.begin() + (pl.ncoeffs - 1) * r,
                pl.fc.begin() + pl.ncoeffs * r, acc.begin());
      for (std::size_t k = pl.ncoeffs - 1; k-- > 0;) {
        ctx.mul_into(std::span<const std::uint64_t>(acc.data(), r),
                     std::span<const std::uint64_t>(xi.data(), r),
                     std::span<std::uint64_t>(out.data(), r),
                     std::span<std::uint64_t>(work));
        const std::uint64_t* cf = pl.fc.data() + k * r;
        for (std::size_t l = 0; l < r; ++l) out[l] = (out[l] + cf[l]) % p;
        std::swap(acc, out);
      }
    }
    // digits of the value, then the digit function
    for (std::size_t i = 0; i < r; ++i) {
      std::uint64_t s = 0;
      const std::uint64_t* row = pl.trows.data() + i * r;
      for (std::size_t j = 0; j < r; ++j) s = (s + row[j] * acc[j]) % p;
      dig[i] = s;
    }
    std::uint64_t g = 0;
    if (pl.rudin) {
      for (std::size_t i = 0; i + 1 < r; ++i) g = (g + dig[i] * dig[i + 1]) % p;
    } else {
      for (std::size_t i = 0; i < r; ++i) g += dig[i];
      g %= p;
    }
    ++counts[g];

    // advance the odometer; every touched digit adds its basis element to
    // xi (a wrap subtracts (p-1) copies, which is the same as adding one)
    for (std::size_t pos = r; pos-- > 0;) {
      const std::uint64_t* b = pl.basis.data() + pos * r;
      for (std::size_t l = 0; l < r; ++l) xi[l] = (xi[l] + b[l]) % p;
      if (++x[pos] < p) break;
      x[pos] = 0;
    }
  }
}

}  // namespace

DistReport distribution(const UniPolyFq& f, const BasisPair& pair,
                        DigitFunction kind, std::uint64_t budget,
                        unsigned jobs) {
  const FieldCtx& ctx = pair.ctx();
  const std::size_t r = ctx.r();
  const std::uint64_t p = ctx.p();
  if (kind == DigitFunction::rudin_shapiro && r < 2)
    throw std::invalid_argument("distribution: kind R needs r >= 2");
  if (pair.basis.elems.size() != r || pair.dual.elems.size() != r)
    throw std::invalid_argument("distribution: malformed basis pair");

  const std::uint64_t total = pow_sat(p, r);
  if (total > budget)
    throw budget_error("distribution: needs " + std::to_string(total) +
                       " point evaluations, budget is " +
                       std::to_string(budget));

  const UniPolyFq fc = uni_trim(f);

  DistPlan pl;
  pl.ctx = &ctx;
  pl.r = r;
  pl.p = p;
  pl.ncoeffs = fc.c.size();
  for (const auto& coeff : fc.c)
    pl.fc.insert(pl.fc.end(), coeff.c.begin(), coeff.c.end());
  for (const auto& b : pair.basis.elems)
    pl.basis.insert(pl.basis.end(), b.c.begin(), b.c.end());
  pl.trows.assign(r * r, 0);
  {
    FieldElem ap = ctx.one();
    for (std::size_t j = 0; j < r; ++j) {
      for (std::size_t i = 0; i < r; ++i)
        pl.trows[i * r + j] = ctx.trace(ctx.mul(pair.dual.elems[i], ap));
      ap = ctx.mul(ap, ctx.alpha());
    }
  }
  pl.rudin = kind == DigitFunction::rudin_shapiro;

  DistReport rep;
  rep.p = p;
  rep.r = r;
  rep.d = uni_degree(fc).value_or(0);
  rep.f = format_uni_poly(fc, ctx);
  rep.kind = kind;
  rep.counts.assign(p, 0);

  const unsigned nworkers = std::max<std::uint64_t>(
      1, std::min<std::uint64_t>({jobs ? jobs : 1, 64, total}));
  if (nworkers == 1) {
    dist_worker(pl, 0, total, rep.counts);
    return rep;
  }
  std::vector<std::vector<std::uint64_t>> local(
      nworkers, std::vector<std::uint64_t>(p, 0));
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < nworkers; ++w) {
    const std::uint64_t lo = total / nworkers * w;
    const std::uint64_t hi =
        (w + 1 == nworkers) ? total : total / nworkers * (w + 1);
    threads.emplace_back(
        [&pl, lo, hi, &local, w] { dist_worker(pl, lo, hi, local[w]); });
  }
  for (auto& th : threads) th.join();
  for (const auto& hist : local)
    for (std::uint64_t c = 0; c < p; ++c) rep.counts[c] += hist[c];
  return rep;
}

// ---------------------------------------------------------------------------
// Closed form and recursion
// ---------------------------------------------------------------------------

std::uint64_t permutation_formula(std::uint64_t p, std::size_t r,
                                  std::uint64_t c) {
  if (!is_prime(p))
    throw std::invalid_argument("permutation_formula: p must be prime");
  if (r < 2)
    throw std::invalid_argument("permutation_formula: needs r >= 2");
  if (c >= p)
    throw std::invalid_argument("permutation_formula: c out of range");
  const std::uint64_t lead = checked_pow(p, r - 1, "permutation_formula");
  const std::uint64_t low = checked_pow(p, (r - 1) / 2, "permutation_formula");
  if (c != 0) return lead - low;
  const std::uint64_t high = checked_pow(p, (r + 1) / 2, "permutation_formula");
  unsigned __int128 n = static_cast<unsigned __int128>(lead) + high - low;
  if (n > ~std::uint64_t{0})
    throw std::overflow_error("permutation_formula: count exceeds 64 bits");
  return static_cast<std::uint64_t>(n);
}

bool recursion_check(std::uint64_t p, std::size_t r_max,
                     std::uint64_t enum_budget, std::string* counterexample) {
  if (!is_prime(p))
    throw std::invalid_argument("recursion_check: p must be prime");
  if (r_max < 4)
    throw std::invalid_argument("recursion_check: needs r_max >= 4");

  auto fail = [&](std::size_t r, std::uint64_t c, const char* stage) {
    if (counterexample)
      *counterexample = std::string(stage) + " failed at p=" +
                        std::to_string(p) + " r=" + std::to_string(r) +
                        " c=" + std::to_string(c);
    return false;
  };

  for (std::size_t r = 4; r <= r_max; ++r)
    for (std::uint64_t c = 0; c < p; ++c) {
      const unsigned __int128 lhs = permutation_formula(p, r, c);
      const unsigned __int128 rhs =
          static_cast<unsigned __int128>(p) * permutation_formula(p, r - 2, c) +
          static_cast<unsigned __int128>(p - 1) *
              checked_pow(p, r - 2, "recursion_check");
      if (lhs != rhs) return fail(r, c, "recursion");
    }

  for (std::size_t r = 2; r <= r_max; ++r) {
    const std::uint64_t total = pow_sat(p, r);
    if (total > enum_budget) continue;
    std::vector<std::uint64_t> tally(p, 0);
    std::vector<std::uint64_t> x(r, 0);
    for (std::uint64_t n = 0; n < total; ++n) {
      std::uint64_t g = 0;
      for (std::size_t i = 0; i + 1 < r; ++i) g = (g + x[i] * x[i + 1]) % p;
      ++tally[g];
      for (std::size_t pos = r; pos-- > 0;) {
        if (++x[pos] < p) break;
        x[pos] = 0;
      }
    }
    for (std::uint64_t c = 0; c < p; ++c)
      if (tally[c] != permutation_formula(p, r, c))
        return fail(r, c, "enumeration");
  }
  return true;
}

// ---------------------------------------------------------------------------
// Deviation reports
// ---------------------------------------------------------------------------

unsigned deviation_exponent_quarters(std::size_t r, bool c_is_zero) {
  if (r % 2 == 0) return c_is_zero ? 1 : 3;
  return c_is_zero ? 0 : 2;
}

std::vector<DeviationRow> hk_report(const DistReport& rep, std::size_t d) {
  (void)d;
  if (rep.kind != DigitFunction::rudin_shapiro)
    throw std::invalid_argument("hk_report: needs a kind-R report");
  if (rep.counts.size() != rep.p)
    throw std::invalid_argument("hk_report: malformed report");
  const std::uint64_t main_term = checked_pow(rep.p, rep.r - 1, "hk_report");
  std::vector<DeviationRow> rows;
  rows.reserve(rep.p);
  for (std::uint64_t c = 0; c < rep.p; ++c) {
    DeviationRow row;
    row.c = c;
    row.count = rep.counts[c];
    row.main_term = main_term;
    row.abs_deviation = row.count > main_term ? row.count - main_term
                                              : main_term - row.count;
    row.h_quarters = deviation_exponent_quarters(rep.r, c == 0);
    const double expo = (3.0 * rep.r + 1.0 - row.h_quarters) / 4.0;
    row.normalized = row.abs_deviation / std::pow(double(rep.p), expo);
    rows.push_back(row);
  }
  return rows;
}

Ds13Result ds13_check(const DistReport& rep, std::size_t d) {
  if (rep.kind != DigitFunction::thue_morse)
    throw std::invalid_argument("ds13_check: needs a kind-T report");
  if (rep.counts.size() != rep.p)
    throw std::invalid_argument("ds13_check: malformed report");
  if (std::gcd<std::uint64_t>(d, rep.p) != 1)
    throw std::invalid_argument(
        "ds13_check: inapplicable, p divides deg f (needs gcd(d, p) = 1)");

  const std::uint64_t main_term = checked_pow(rep.p, rep.r - 1, "ds13_check");
  unsigned __int128 pr = 1;
  for (std::size_t i = 0; i < rep.r; ++i) pr *= rep.p;
  const unsigned __int128 bound_sq =
      static_cast<unsigned __int128>(d - 1) * (d - 1) * pr;

  Ds13Result res;
  res.ok = true;
  for (std::uint64_t c = 0; c < rep.p; ++c) {
    Ds13Row row;
    row.c = c;
    row.count = rep.counts[c];
    row.abs_deviation = row.count > main_term ? row.count - main_term
                                              : main_term - row.count;
    const unsigned __int128 dev_sq =
        static_cast<unsigned __int128>(row.abs_deviation) * row.abs_deviation;
    row.within = dev_sq <= bound_sq;
    res.max_abs_deviation = std::max(res.max_abs_deviation, row.abs_deviation);
    res.ok = res.ok && row.within;
    res.rows.push_back(row);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Policies and sweeps
// ---------------------------------------------------------------------------

std::string basis_policy_name(BasisPolicy policy) {
  switch (policy) {
    case BasisPolicy::polynomial: return "polynomial";
    case BasisPolicy::special_dual: return "special-dual";
    case BasisPolicy::seeded_random: return "seeded-random";
  }
  throw std::invalid_argument("basis_policy_name: bad enum value");
}

BasisPolicy basis_policy_from_name(const std::string& name) {
  if (name == "polynomial") return BasisPolicy::polynomial;
  if (name == "special-dual") return BasisPolicy::special_dual;
  if (name == "seeded-random") return BasisPolicy::seeded_random;
  throw std::invalid_argument("unknown basis policy '" + name +
                              "' (expected polynomial, special-dual or "
                              "seeded-random)");
}

BasisPair make_basis(const FieldCtx& ctx, BasisPolicy policy,
                     std::uint64_t seed) {
  switch (policy) {
    case BasisPolicy::polynomial: return dual_basis(polynomial_basis(ctx));
    case BasisPolicy::special_dual: return special_delta(ctx);
    case BasisPolicy::seeded_random: {
      std::mt19937_64 rng(seed);
      return dual_basis(random_basis(ctx, rng));
    }
  }
  throw std::invalid_argument("make_basis: bad enum value");
}

UniPolyFq make_poly(const FieldCtx& ctx, const FSpec& spec) {
  switch (spec.policy) {
    case FPolicy::monomial: return uni_monomial(ctx, spec.d);
    case FPolicy::seeded_random: {
      std::mt19937_64 rng(spec.seed);
      return random_uni_poly(ctx, spec.d, rng);
    }
    case FPolicy::user: return parse_uni_poly(spec.text, ctx);
  }
  throw std::invalid_argument("make_poly: bad enum value");
}

double relative_deviation(const DistReport& rep) {
  const double main_term =
      std::pow(double(rep.p), double(rep.r) - 1.0);
  double worst = 0.0;
  for (std::uint64_t c = 0; c < rep.p; ++c)
    worst = std::max(worst, std::abs(rep.counts[c] / main_term - 1.0));
  return worst;
}

SweepResult sweep(std::size_t d, std::size_t r, DigitFunction kind,
                  std::vector<std::uint64_t> p_list, BasisPolicy basis_policy,
                  const FSpec& f_policy, std::uint64_t seed,
                  std::uint64_t budget, unsigned jobs) {
  for (std::uint64_t p : p_list)
    if (!is_prime(p))
      throw std::invalid_argument("sweep: " + std::to_string(p) +
                                  " is not prime");
  std::sort(p_list.begin(), p_list.end());
  p_list.erase(std::unique(p_list.begin(), p_list.end()), p_list.end());

  SweepResult res;
  for (std::uint64_t p : p_list) {
    FieldCtx ctx(p, r);
    const BasisPair pair = make_basis(ctx, basis_policy, mix_seed(seed, 2 * p));
    FSpec fs = f_policy;
    fs.d = d;
    fs.seed = mix_seed(seed, 2 * p + 1);
    const UniPolyFq f = make_poly(ctx, fs);
    if (uni_degree(f).value_or(0) != d)
      throw std::invalid_argument(
          "sweep: f has degree " +
          std::to_string(uni_degree(f).value_or(0)) + ", expected " +
          std::to_string(d));
    SweepEntry entry;
    entry.p = p;
    entry.report = distribution(f, pair, kind, budget, jobs);
    entry.rel_dev = relative_deviation(entry.report);
    if (kind == DigitFunction::rudin_shapiro)
      for (const auto& row : hk_report(entry.report, d))
        entry.max_normalized = std::max(entry.max_normalized, row.normalized);
    res.entries.push_back(std::move(entry));
  }

  if (res.entries.size() >= 2 && r >= 4 &&
      res.entries.back().p >= 4 * res.entries.front().p) {
    res.trend_checked = true;
    res.trend_ok = res.entries.back().rel_dev < res.entries.front().rel_dev;
  }
  return res;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_header() {
  return "p,r,d,kind,basis_policy,f_serialized,c,count,main_term,"
         "abs_deviation,h,normalized";
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find(',') == std::string::npos && s.find('"') == std::string::npos)
    return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string h_label(unsigned quarters) {
  switch (quarters) {
    case 0: return "0";
    case 1: return "0.25";
    case 2: return "0.5";
    case 3: return "0.75";
  }
  throw std::invalid_argument("h_label: bad quarter value");
}

}  // namespace

std::vector<std::string> csv_rows(const DistReport& rep,
                                  const std::string& basis_policy) {
  const std::uint64_t main_term = checked_pow(rep.p, rep.r - 1, "csv_rows");
  const std::string prefix =
      std::to_string(rep.p) + ',' + std::to_string(rep.r) + ',' +
      std::to_string(rep.d) + ',' + digit_function_letter(rep.kind) + ',' +
      csv_field(basis_policy) + ',' + csv_field(rep.f) + ',';
  std::vector<std::string> rows;
  rows.reserve(rep.p);
  for (std::uint64_t c = 0; c < rep.p; ++c) {
    const std::uint64_t count = rep.counts[c];
    const std::uint64_t dev =
        count > main_term ? count - main_term : main_term - count;
    std::string row = prefix + std::to_string(c) + ',' +
                      std::to_string(count) + ',' + std::to_string(main_term) +
                      ',' + std::to_string(dev) + ',';
    if (rep.kind == DigitFunction::rudin_shapiro) {
      const unsigned q = deviation_exponent_quarters(rep.r, c == 0);
      const double expo = (3.0 * rep.r + 1.0 - q) / 4.0;
      row += h_label(q) + ',' +
             format_double(dev / std::pow(double(rep.p), expo));
    } else {
      row += ',';
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ffdigits
