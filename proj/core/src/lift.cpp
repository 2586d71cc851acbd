#include "ffdigits/lift.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>

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

}  // namespace

// ---------------------------------------------------------------------------
// UniPolyFq
// ---------------------------------------------------------------------------

UniPolyFq uni_trim(UniPolyFq f) {
  while (!f.c.empty() && f.c.back().is_zero()) f.c.pop_back();
  return f;
}

std::optional<std::size_t> uni_degree(const UniPolyFq& f) {
  if (f.c.empty()) return std::nullopt;
  return f.c.size() - 1;
}

UniPolyFq uni_monomial(const FieldCtx& ctx, std::size_t d) {
  UniPolyFq f;
  f.c.assign(d + 1, ctx.zero());
  f.c[d] = ctx.one();
  return f;
}

UniPolyFq random_uni_poly(const FieldCtx& ctx, std::size_t d,
                          std::mt19937_64& rng) {
  UniPolyFq f;
  for (std::size_t i = 0; i < d; ++i) f.c.push_back(random_element(ctx, rng));
  f.c.push_back(random_nonzero(ctx, rng));
  return f;
}

FieldElem eval_horner(const UniPolyFq& f, const FieldElem& x,
                      const FieldCtx& ctx) {
  FieldElem acc = ctx.zero();
  for (std::size_t i = f.c.size(); i-- > 0;)
    acc = ctx.add(ctx.mul(acc, x), f.c[i]);
  return acc;
}

UniPolyFq twist(const UniPolyFq& f, std::size_t j, const FieldCtx& ctx) {
  UniPolyFq out = f;
  for (auto& coeff : out.c) coeff = ctx.frobenius(coeff, j);
  return out;
}

UniPolyFq uni_derivative(const UniPolyFq& f, const FieldCtx& ctx) {
  UniPolyFq out;
  for (std::size_t i = 1; i < f.c.size(); ++i)
    out.c.push_back(ctx.scale(f.c[i], i % ctx.p()));
  return uni_trim(std::move(out));
}

// ---------------------------------------------------------------------------
// CouplingMatrix
// ---------------------------------------------------------------------------

CouplingMatrix coupling_matrix(const BasisPair& pair) {
  const FieldCtx& ctx = pair.ctx();
  const std::size_t r = ctx.r();
  if (r < 2)
    throw std::invalid_argument("coupling_matrix: needs r >= 2");
  if (pair.basis.elems.size() != r || pair.dual.elems.size() != r)
    throw std::invalid_argument("coupling_matrix: malformed basis pair");

  std::vector<std::vector<FieldElem>> phi_d(
      r, std::vector<FieldElem>(r, ctx.zero()));
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < r; ++i)
      phi_d[j][i] = ctx.frobenius(pair.dual.elems[i], j);

  CouplingMatrix cm;
  cm.a.assign(r, std::vector<FieldElem>(r, ctx.zero()));
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t k = 0; k < r; ++k) {
      FieldElem acc = ctx.zero();
      for (std::size_t i = 0; i + 1 < r; ++i)
        acc = ctx.add(acc, ctx.mul(phi_d[j][i], phi_d[k][i + 1]));
      cm.a[j][k] = std::move(acc);
    }

  // column-0 identity: sum_j a[j][0] * basis[0]^(p^j) == dual[1]
  FieldElem lhs = ctx.zero();
  for (std::size_t j = 0; j < r; ++j)
    lhs = ctx.add(lhs,
                  ctx.mul(cm.a[j][0], ctx.frobenius(pair.basis.elems[0], j)));
  if (!(lhs == pair.dual.elems[1]))
    throw invariant_error("coupling_matrix: column identity failed");

  // Frobenius shifts the index pattern diagonally
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t k = 0; k < r; ++k)
      if (!(ctx.frobenius(cm.a[j][k], 1) == cm.a[(j + 1) % r][(k + 1) % r]))
        throw invariant_error("coupling_matrix: shift identity failed");

  return cm;
}

// ---------------------------------------------------------------------------
// SparseMvPoly
// ---------------------------------------------------------------------------

bool SparseMvPoly::GradedLex::operator()(const Exps& a, const Exps& b) const {
  std::uint64_t da = 0, db = 0;
  for (auto v : a) da += v;
  for (auto v : b) db += v;
  if (da != db) return da < db;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::optional<std::uint32_t> SparseMvPoly::degree() const {
  if (terms_.empty()) return std::nullopt;
  const auto& top = terms_.rbegin()->first;  // graded order: last is maximal
  std::uint64_t d = 0;
  for (auto v : top) d += v;
  return static_cast<std::uint32_t>(d);
}

void SparseMvPoly::add_term(const Exps& e, const FieldElem& coeff,
                            const FieldCtx& ctx) {
  if (e.size() != nvars_)
    throw std::invalid_argument("add_term: exponent vector has wrong arity");
  if (coeff.is_zero()) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, coeff);
    return;
  }
  it->second = ctx.add(it->second, coeff);
  if (it->second.is_zero()) terms_.erase(it);
}

const FieldElem* SparseMvPoly::coeff(const Exps& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? nullptr : &it->second;
}

SparseMvPoly mv_add(const SparseMvPoly& a, const SparseMvPoly& b,
                    const FieldCtx& ctx) {
  if (a.nvars() != b.nvars())
    throw std::invalid_argument("mv_add: arity mismatch");
  SparseMvPoly out = a;
  for (const auto& [e, c] : b.terms()) out.add_term(e, c, ctx);
  return out;
}

SparseMvPoly mv_mul(const SparseMvPoly& a, const SparseMvPoly& b,
                    const FieldCtx& ctx, std::uint64_t term_budget) {
  if (a.nvars() != b.nvars())
    throw std::invalid_argument("mv_mul: arity mismatch");
  SparseMvPoly out(a.nvars());
  SparseMvPoly::Exps e(a.nvars());
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) {
      for (std::size_t i = 0; i < e.size(); ++i) {
        const std::uint64_t s =
            static_cast<std::uint64_t>(ea[i]) + static_cast<std::uint64_t>(eb[i]);
        if (s > 0xffffffffull)
          throw std::overflow_error("mv_mul: exponent overflow");
        e[i] = static_cast<std::uint32_t>(s);
      }
      out.add_term(e, ctx.mul(ca, cb), ctx);
      if (out.term_count() > term_budget)
        throw budget_error("mv_mul: product exceeds the term budget of " +
                           std::to_string(term_budget) + " terms");
    }
  return out;
}

SparseMvPoly mv_scale(const SparseMvPoly& a, const FieldElem& s,
                      const FieldCtx& ctx) {
  SparseMvPoly out(a.nvars());
  for (const auto& [e, c] : a.terms()) out.add_term(e, ctx.mul(c, s), ctx);
  return out;
}

SparseMvPoly partial_derivative(const SparseMvPoly& a, std::size_t var,
                                const FieldCtx& ctx) {
  if (var >= a.nvars())
    throw std::invalid_argument("partial_derivative: no such variable");
  SparseMvPoly out(a.nvars());
  for (const auto& [e, c] : a.terms()) {
    if (e[var] == 0) continue;
    SparseMvPoly::Exps ne = e;
    --ne[var];
    out.add_term(ne, ctx.scale(c, e[var] % ctx.p()), ctx);
  }
  return out;
}

SparseMvPoly homogeneous_part(const SparseMvPoly& a, std::uint32_t deg) {
  SparseMvPoly out(a.nvars());
  for (const auto& [e, c] : a.terms()) {
    std::uint64_t d = 0;
    for (auto v : e) d += v;
    if (d == deg) out.terms_.emplace(e, c);
  }
  return out;
}

FieldElem mv_eval(const SparseMvPoly& a, const std::vector<FieldElem>& point,
                  const FieldCtx& ctx) {
  if (point.size() != a.nvars())
    throw std::invalid_argument("mv_eval: point has wrong arity");
  FieldElem acc = ctx.zero();
  for (const auto& [e, c] : a.terms()) {
    FieldElem t = c;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i]) t = ctx.mul(t, ctx.pow(point[i], e[i]));
    acc = ctx.add(acc, t);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Lifts
// ---------------------------------------------------------------------------

std::vector<FieldElem> twisted_coordinates(const DigitVector& x,
                                           const BasisPair& pair) {
  const FieldCtx& ctx = pair.ctx();
  const std::size_t r = ctx.r();
  if (x.size() != r)
    throw std::invalid_argument("twisted_coordinates: expected r digits");
  std::vector<FieldElem> y(r, ctx.zero());
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j)
      y[i] = ctx.add(
          y[i], ctx.scale(ctx.frobenius(pair.basis.elems[j], i), x[j]));
  return y;
}

SparseMvPoly twisted_lift(const UniPolyFq& f, const CouplingMatrix& a,
                          const FieldCtx& ctx) {
  const std::size_t r = ctx.r();
  const UniPolyFq fc = uni_trim(f);
  if (!uni_degree(fc) || *uni_degree(fc) < 1)
    throw std::invalid_argument("twisted_lift: f must be non-constant");
  if (a.a.size() != r)
    throw std::invalid_argument("twisted_lift: coupling matrix arity");

  std::vector<UniPolyFq> tw(r);
  for (std::size_t j = 0; j < r; ++j) tw[j] = twist(fc, j, ctx);

  SparseMvPoly q(r);
  SparseMvPoly::Exps e(r, 0);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t k = 0; k < r; ++k) {
      if (a.a[j][k].is_zero()) continue;
      for (std::size_t m1 = 0; m1 < tw[j].c.size(); ++m1) {
        if (tw[j].c[m1].is_zero()) continue;
        for (std::size_t m2 = 0; m2 < tw[k].c.size(); ++m2) {
          if (tw[k].c[m2].is_zero()) continue;
          std::fill(e.begin(), e.end(), 0);
          e[j] += static_cast<std::uint32_t>(m1);
          e[k] += static_cast<std::uint32_t>(m2);
          q.add_term(e, ctx.mul(a.a[j][k], ctx.mul(tw[j].c[m1], tw[k].c[m2])),
                     ctx);
        }
      }
    }
  return q;
}

SparseMvPoly digit_lift(const UniPolyFq& f, const BasisPair& pair,
                        std::uint64_t term_budget) {
  const FieldCtx& ctx = pair.ctx();
  const std::size_t r = ctx.r();
  const UniPolyFq fc = uni_trim(f);
  if (!uni_degree(fc) || *uni_degree(fc) < 1)
    throw std::invalid_argument("digit_lift: f must be non-constant");
  if (r < 2) throw std::invalid_argument("digit_lift: needs r >= 2");

  const CouplingMatrix cm = coupling_matrix(pair);

  // g[j] = (phi^j f)(L_j) with the linear form L_j = sum_i basis[i]^(p^j) X_i
  std::vector<SparseMvPoly> g;
  g.reserve(r);
  SparseMvPoly::Exps e(r, 0);
  for (std::size_t j = 0; j < r; ++j) {
    SparseMvPoly lin(r);
    for (std::size_t i = 0; i < r; ++i) {
      std::fill(e.begin(), e.end(), 0);
      e[i] = 1;
      lin.add_term(e, ctx.frobenius(pair.basis.elems[i], j), ctx);
    }
    const UniPolyFq tw = twist(fc, j, ctx);
    SparseMvPoly acc(r);
    std::fill(e.begin(), e.end(), 0);
    acc.add_term(e, tw.c.back(), ctx);
    for (std::size_t k = tw.c.size() - 1; k-- > 0;) {
      acc = mv_mul(acc, lin, ctx, term_budget);
      std::fill(e.begin(), e.end(), 0);
      acc.add_term(e, tw.c[k], ctx);
    }
    g.push_back(std::move(acc));
  }

  SparseMvPoly F(r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t k = 0; k < r; ++k) {
      if (cm.a[j][k].is_zero()) continue;
      F = mv_add(F, mv_scale(mv_mul(g[j], g[k], ctx, term_budget), cm.a[j][k],
                             ctx),
                 ctx);
      if (F.term_count() > term_budget)
        throw budget_error("digit_lift: exceeded the term budget of " +
                           std::to_string(term_budget) + " terms");
    }

  // F must be fixed by Frobenius coefficient-wise, i.e. defined over F_p.
  for (const auto& [exps, coeff] : F.terms()) {
    (void)exps;
    if (!(ctx.frobenius(coeff, 1) == coeff) || !ctx.in_prime_field(coeff))
      throw invariant_error("digit_lift: coefficient left the prime field");
  }

  // Spot-check the factorization F = Q o (twisted coordinates).
  const SparseMvPoly q = twisted_lift(fc, cm, ctx);
  std::mt19937_64 rng(0x636f6d70u);
  for (int it = 0; it < 100; ++it) {
    DigitVector x(r);
    for (auto& v : x) v = rand_below(rng, ctx.p());
    std::vector<FieldElem> embedded;
    embedded.reserve(r);
    for (auto v : x) embedded.push_back(ctx.from_fp(v));
    const FieldElem lhs = mv_eval(F, embedded, ctx);
    const FieldElem rhs = mv_eval(q, twisted_coordinates(x, pair), ctx);
    if (!(lhs == rhs))
      throw invariant_error("digit_lift: composition with the coordinate "
                            "change disagreed on a sample point");
  }
  return F;
}

SparseMvPoly thue_morse_lift(const UniPolyFq& f, const BasisPair& pair,
                             std::uint64_t c) {
  const FieldCtx& ctx = pair.ctx();
  const std::size_t r = ctx.r();
  const UniPolyFq fc = uni_trim(f);
  if (!uni_degree(fc) || *uni_degree(fc) < 1)
    throw std::invalid_argument("thue_morse_lift: f must be non-constant");

  FieldElem delta = ctx.zero();
  for (const auto& d : pair.dual.elems) delta = ctx.add(delta, d);
  if (delta.is_zero())
    throw invariant_error(
        "thue_morse_lift: dual elements sum to zero; not a basis");

  SparseMvPoly q(r);
  SparseMvPoly::Exps e(r, 0);
  for (std::size_t l = 0; l < r; ++l) {
    const FieldElem dl = ctx.frobenius(delta, l);
    const UniPolyFq tw = twist(fc, l, ctx);
    for (std::size_t mdeg = 0; mdeg < tw.c.size(); ++mdeg) {
      if (tw.c[mdeg].is_zero()) continue;
      std::fill(e.begin(), e.end(), 0);
      e[l] = static_cast<std::uint32_t>(mdeg);
      q.add_term(e, ctx.mul(dl, tw.c[mdeg]), ctx);
    }
  }
  std::fill(e.begin(), e.end(), 0);
  q.add_term(e, ctx.neg(ctx.from_fp(c)), ctx);
  return q;
}

IdentityCheck verify_value_identity(const SparseMvPoly& F, const UniPolyFq& f,
                                    const BasisPair& pair,
                                    std::uint64_t exhaustive_limit,
                                    std::uint64_t samples,
                                    std::uint64_t seed) {
  const FieldCtx& ctx = pair.ctx();
  const std::size_t r = ctx.r();
  if (F.nvars() != r)
    throw std::invalid_argument("verify_value_identity: arity mismatch");

  IdentityCheck out;
  auto check_point = [&](const DigitVector& x) {
    std::vector<FieldElem> embedded;
    embedded.reserve(r);
    for (auto v : x) embedded.push_back(ctx.from_fp(v));
    const FieldElem lhs = mv_eval(F, embedded, ctx);
    const FieldElem xi = from_digits(x, pair);
    const std::uint64_t rhs = rudin_shapiro(eval_horner(f, xi, ctx), pair);
    ++out.points;
    if (!(lhs == ctx.from_fp(rhs))) ++out.mismatches;
  };

  const std::uint64_t total = pow_sat(ctx.p(), r);
  if (total <= exhaustive_limit) {
    DigitVector x(r, 0);
    while (true) {
      check_point(x);
      std::size_t pos = r;
      while (pos > 0) {
        if (++x[pos - 1] < ctx.p()) break;
        x[--pos] = 0;
      }
      if (pos == 0) break;
    }
  } else {
    std::mt19937_64 rng(seed);
    DigitVector x(r);
    for (std::uint64_t s = 0; s < samples; ++s) {
      for (auto& v : x) v = rand_below(rng, ctx.p());
      check_point(x);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Singular-point census
// ---------------------------------------------------------------------------

namespace {

bool prime_field_coeffs(const SparseMvPoly& P, const FieldCtx& ctx) {
  for (const auto& [e, c] : P.terms()) {
    (void)e;
    if (!ctx.in_prime_field(c)) return false;
  }
  return true;
}

// First root of g (coefficients in F_p) among the elements of E, walking
// coordinate odometers with the last coordinate fastest.  The caller
// guarantees a root exists.
FieldElem scan_root(const PolyFp& g, const FieldCtx& E) {
  FieldElem x = E.zero();
  while (true) {
    FieldElem acc = E.zero();
    for (std::size_t i = g.c.size(); i-- > 0;) {
      acc = E.mul(acc, x);
      acc.c[0] = (acc.c[0] + g.c[i]) % E.p();
    }
    if (acc.is_zero()) return x;
    std::size_t pos = E.r();
    while (pos > 0) {
      if (++x.c[pos - 1] < E.p()) break;
      x.c[--pos] = 0;
    }
    if (pos == 0)
      throw invariant_error("singular_census: no root found for the "
                            "coefficient embedding");
  }
}

struct CompiledTerm {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> vars;  // (var, exp)
  std::size_t coeff;  // offset into the flat coefficient store
};

struct CompiledPoly {
  std::vector<CompiledTerm> terms;
};

struct CensusPlan {
  std::size_t nvars = 0;
  std::size_t re = 0;        // limb count of the evaluation field
  std::uint64_t p = 0;
  std::uint64_t nvals = 0;   // size of the coordinate value set
  std::uint32_t max_exp = 0;
  bool scalar_values = false;  // every coordinate value is a prime-field constant
  std::vector<CompiledPoly> polys;
  std::vector<std::uint64_t> coeffs;      // flat, re limbs per coefficient
  std::vector<std::uint64_t> value_pows;  // [v*(max_exp+1)+e] scalar or flat elems
};

std::uint64_t census_worker(const CensusPlan& pl, const FieldCtx& E,
                            std::uint64_t lo, std::uint64_t hi) {
  const std::size_t re = pl.re;
  const std::uint64_t p = pl.p;
  std::vector<std::uint32_t> idx(pl.nvars, 0);
  {
    std::uint64_t n = lo;
    for (std::size_t v = pl.nvars; v-- > 0;) {
      idx[v] = static_cast<std::uint32_t>(n % pl.nvals);
      n /= pl.nvals;
    }
  }
  std::vector<std::uint64_t> acc(re), tmp(re), out(re), work(2 * re);
  const std::size_t stride = pl.max_exp + 1;
  std::uint64_t count = 0;

  for (std::uint64_t n = lo; n < hi; ++n) {
    bool all_zero = true;
    for (const auto& poly : pl.polys) {
      std::fill(acc.begin(), acc.end(), 0);
      for (const auto& term : poly.terms) {
        const std::uint64_t* cf = pl.coeffs.data() + term.coeff;
        if (pl.scalar_values) {
          std::uint64_t s = 1;
          for (auto [var, exp] : term.vars)
            s = s * pl.value_pows[idx[var] * stride + exp] % p;
          if (!s) continue;
          for (std::size_t l = 0; l < re; ++l)
            acc[l] = (acc[l] + s * cf[l]) % p;
        } else {
          std::copy(cf, cf + re, tmp.begin());
          for (auto [var, exp] : term.vars) {
            const std::uint64_t* pw =
                pl.value_pows.data() + (idx[var] * stride + exp) * re;
            E.mul_into(std::span(tmp.data(), re), std::span(pw, re),
                       std::span(out.data(), re), std::span(work));
            std::swap(tmp, out);
          }
          for (std::size_t l = 0; l < re; ++l)
            acc[l] = (acc[l] + tmp[l]) % p;
        }
      }
      for (std::size_t l = 0; l < re; ++l)
        if (acc[l]) {
          all_zero = false;
          break;
        }
      if (!all_zero) break;
    }
    if (all_zero) ++count;
    for (std::size_t v = pl.nvars; v-- > 0;) {
      if (++idx[v] < pl.nvals) break;
      idx[v] = 0;
    }
  }
  return count;
}

}  // namespace

std::uint64_t singular_census_cost(const SparseMvPoly& P, const FieldCtx& ctx,
                                   unsigned m) {
  if (m == 0)
    throw std::invalid_argument("singular_census: m must be >= 1");
  if (P.nvars() == 0)
    throw std::invalid_argument("singular_census: polynomial has no variables");
  const std::uint64_t pts =
      pow_sat(ctx.p(), static_cast<std::uint64_t>(m) * P.nvars());
  std::uint64_t scan = 0;
  if (m >= 2 && !prime_field_coeffs(P, ctx))
    scan = pow_sat(ctx.p(), static_cast<std::uint64_t>(m) * ctx.r());
  const std::uint64_t total = pts + scan;
  return total < pts ? ~std::uint64_t{0} : total;  // saturate on wrap
}

std::uint64_t singular_census(const SparseMvPoly& P, std::uint64_t c,
                              const FieldCtx& ctx, unsigned m,
                              std::uint64_t budget, unsigned jobs) {
  const std::uint64_t cost = singular_census_cost(P, ctx, m);
  if (cost > budget)
    throw budget_error("singular_census: needs about " + std::to_string(cost) +
                       " point evaluations, budget is " +
                       std::to_string(budget));

  const std::size_t nvars = P.nvars();
  const std::uint64_t p = ctx.p();
  const bool fp_coeffs = prime_field_coeffs(P, ctx);

  // The vanishing system: every partial derivative of P, plus P - c.
  std::vector<SparseMvPoly> system;
  for (std::size_t v = 0; v < nvars; ++v)
    system.push_back(partial_derivative(P, v, ctx));
  {
    SparseMvPoly pc = P;
    pc.add_term(SparseMvPoly::Exps(nvars, 0), ctx.neg(ctx.from_fp(c)), ctx);
    system.push_back(std::move(pc));
  }
  std::stable_sort(system.begin(), system.end(),
                   [](const SparseMvPoly& a, const SparseMvPoly& b) {
                     return a.term_count() < b.term_count();
                   });

  // Realize the evaluation field and the set of coordinate values.
  std::unique_ptr<FieldCtx> owned;
  const FieldCtx* E = nullptr;
  std::vector<FieldElem> values;
  FieldElem theta{};  // image of alpha under the coefficient embedding

  if (fp_coeffs) {
    // Coefficients live in F_p, so probe F_{p^m} directly.
    owned = std::make_unique<FieldCtx>(p, m);
    E = owned.get();
    const std::uint64_t nv = pow_sat(p, m);
    FieldElem v = E->zero();
    for (std::uint64_t n = 0; n < nv; ++n) {
      values.push_back(v);
      for (std::size_t pos = m; pos-- > 0;) {
        if (++v.c[pos] < p) break;
        v.c[pos] = 0;
      }
    }
    theta = E->zero();  // unused
  } else if (m == 1) {
    E = &ctx;
    for (std::uint64_t t = 0; t < p; ++t) values.push_back(ctx.from_fp(t));
    theta = ctx.alpha();
  } else {
    // General case: F_{p^(r*m)} contains both the coefficients and F_{p^m}.
    owned = std::make_unique<FieldCtx>(p, ctx.r() * m);
    E = owned.get();
    theta = scan_root(ctx.modulus(), *E);
    const FieldElem psi = scan_root(find_irreducible(p, m), *E);
    std::vector<FieldElem> psi_pows{E->one()};
    for (unsigned i = 1; i < m; ++i)
      psi_pows.push_back(E->mul(psi_pows.back(), psi));
    std::vector<std::uint64_t> t(m, 0);
    const std::uint64_t nv = pow_sat(p, m);
    for (std::uint64_t n = 0; n < nv; ++n) {
      FieldElem v = E->zero();
      for (unsigned i = 0; i < m; ++i)
        v = E->add(v, E->scale(psi_pows[i], t[i]));
      values.push_back(std::move(v));
      for (std::size_t pos = m; pos-- > 0;) {
        if (++t[pos] < p) break;
        t[pos] = 0;
      }
    }
  }

  auto embed = [&](const FieldElem& a) -> FieldElem {
    if (E == &ctx) return a;
    FieldElem acc = E->zero();
    for (std::size_t i = a.c.size(); i-- > 0;) {
      acc = E->mul(acc, theta);
      acc.c[0] = (acc.c[0] + a.c[i]) % p;
    }
    return acc;
  };

  // Compile the system into flat tables.
  CensusPlan pl;
  pl.nvars = nvars;
  pl.re = E->r();
  pl.p = p;
  pl.nvals = values.size();
  pl.scalar_values = true;
  for (const auto& v : values)
    for (std::size_t l = 1; l < v.c.size(); ++l)
      if (v.c[l]) pl.scalar_values = false;

  for (const auto& poly : system)
    for (const auto& [e, coeff] : poly.terms()) {
      (void)coeff;
      for (auto ex : e) pl.max_exp = std::max(pl.max_exp, ex);
    }

  for (const auto& poly : system) {
    CompiledPoly cp;
    for (const auto& [e, coeff] : poly.terms()) {
      CompiledTerm t;
      for (std::uint32_t v = 0; v < e.size(); ++v)
        if (e[v]) t.vars.emplace_back(v, e[v]);
      t.coeff = pl.coeffs.size();
      const FieldElem emb = embed(coeff);
      pl.coeffs.insert(pl.coeffs.end(), emb.c.begin(), emb.c.end());
      cp.terms.push_back(std::move(t));
    }
    pl.polys.push_back(std::move(cp));
  }

  const std::size_t stride = pl.max_exp + 1;
  if (pl.scalar_values) {
    pl.value_pows.assign(pl.nvals * stride, 0);
    for (std::uint64_t v = 0; v < pl.nvals; ++v) {
      pl.value_pows[v * stride] = 1 % p;
      for (std::size_t e = 1; e < stride; ++e)
        pl.value_pows[v * stride + e] =
            pl.value_pows[v * stride + e - 1] * values[v].c[0] % p;
    }
  } else {
    pl.value_pows.assign(pl.nvals * stride * pl.re, 0);
    for (std::uint64_t v = 0; v < pl.nvals; ++v) {
      FieldElem cur = E->one();
      for (std::size_t e = 0; e < stride; ++e) {
        std::copy(cur.c.begin(), cur.c.end(),
                  pl.value_pows.begin() + (v * stride + e) * pl.re);
        if (e + 1 < stride) cur = E->mul(cur, values[v]);
      }
    }
  }

  std::uint64_t total = 1;
  for (std::size_t v = 0; v < nvars; ++v) total *= pl.nvals;

  const unsigned nworkers = std::max(
      1u, std::min({jobs, 64u, static_cast<unsigned>(
                                   std::min<std::uint64_t>(total, 64))}));
  if (nworkers == 1) return census_worker(pl, *E, 0, total);

  std::vector<std::uint64_t> partial(nworkers, 0);
  std::vector<std::thread> threads;
  for (unsigned w = 0; w < nworkers; ++w) {
    const std::uint64_t lo = total / nworkers * w;
    const std::uint64_t hi =
        (w + 1 == nworkers) ? total : total / nworkers * (w + 1);
    threads.emplace_back([&pl, &E, lo, hi, w, &partial] {
      partial[w] = census_worker(pl, *E, lo, hi);
    });
  }
  for (auto& th : threads) th.join();
  std::uint64_t count = 0;
  for (auto v : partial) count += v;
  return count;
}

}  // namespace ffdigits
