#include "ffdigits/ff.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "ffdigits/fp_linalg.hpp"

namespace ffdigits {

namespace {

std::uint64_t mulmod_wide(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(
      static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod_wide(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t out = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) out = mulmod_wide(out, a, m);
    a = mulmod_wide(a, a, m);
    e >>= 1;
  }
  return out;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t s : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % s == 0) return n == s;
  }
  // deterministic Miller-Rabin for 64-bit inputs
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = powmod_wide(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod_wide(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// PolyFp
// ---------------------------------------------------------------------------

PolyFp poly_trim(PolyFp a) {
  while (!a.c.empty() && a.c.back() == 0) a.c.pop_back();
  return a;
}

std::optional<std::size_t> poly_degree(const PolyFp& a) {
  if (a.c.empty()) return std::nullopt;
  return a.c.size() - 1;
}

PolyFp poly_add(const PolyFp& a, const PolyFp& b, std::uint64_t p) {
  PolyFp out;
  out.c.resize(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < out.c.size(); ++i) {
    std::uint64_t v = 0;
    if (i < a.c.size()) v += a.c[i];
    if (i < b.c.size()) v += b.c[i];
    out.c[i] = v % p;
  }
  return poly_trim(std::move(out));
}

PolyFp poly_sub(const PolyFp& a, const PolyFp& b, std::uint64_t p) {
  PolyFp out;
  out.c.resize(std::max(a.c.size(), b.c.size()), 0);
  for (std::size_t i = 0; i < out.c.size(); ++i) {
    std::uint64_t v = p;
    if (i < a.c.size()) v += a.c[i];
    if (i < b.c.size()) v -= b.c[i];
    out.c[i] = v % p;
  }
  return poly_trim(std::move(out));
}

PolyFp poly_mul(const PolyFp& a, const PolyFp& b, std::uint64_t p) {
  if (a.c.empty() || b.c.empty()) return {};
  PolyFp out;
  out.c.assign(a.c.size() + b.c.size() - 1, 0);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (!a.c[i]) continue;
    for (std::size_t j = 0; j < b.c.size(); ++j)
      out.c[i + j] = (out.c[i + j] + a.c[i] * b.c[j]) % p;
  }
  return poly_trim(std::move(out));
}

std::pair<PolyFp, PolyFp> poly_divrem(const PolyFp& a, const PolyFp& b,
                                      std::uint64_t p) {
  PolyFp rem = poly_trim(a);
  PolyFp div = poly_trim(b);
  if (div.c.empty()) throw std::invalid_argument("poly_divrem: divide by zero");
  if (rem.c.size() < div.c.size()) return {PolyFp{}, rem};
  const std::uint64_t lead_inv = fp_inv_scalar(div.c.back(), p);
  const std::size_t db = div.c.size();
  PolyFp quot;
  quot.c.assign(rem.c.size() - db + 1, 0);
  for (std::size_t i = rem.c.size(); i >= db; --i) {
    const std::size_t idx = i - 1;  // highest coefficient still to clear
    const std::uint64_t f = rem.c[idx] % p * lead_inv % p;
    if (f) {
      quot.c[idx - (db - 1)] = f;
      for (std::size_t j = 0; j < db; ++j) {
        auto& slot = rem.c[idx - (db - 1) + j];
        slot = (slot + (p - div.c[j] % p) * f) % p;
      }
    }
  }
  return {poly_trim(std::move(quot)), poly_trim(std::move(rem))};
}

PolyFp poly_rem(const PolyFp& a, const PolyFp& b, std::uint64_t p) {
  return poly_divrem(a, b, p).second;
}

PolyFp poly_gcd(PolyFp a, PolyFp b, std::uint64_t p) {
  a = poly_trim(std::move(a));
  b = poly_trim(std::move(b));
  while (!b.c.empty()) {
    PolyFp r = poly_rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.c.empty() && a.c.back() != 1) {
    const std::uint64_t inv = fp_inv_scalar(a.c.back(), p);
    for (auto& v : a.c) v = v * inv % p;
  }
  return a;
}

PolyFp poly_powmod(const PolyFp& base, std::uint64_t e, const PolyFp& mod,
                   std::uint64_t p) {
  PolyFp out{{1}};
  PolyFp b = poly_rem(base, mod, p);
  while (e) {
    if (e & 1) out = poly_rem(poly_mul(out, b, p), mod, p);
    b = poly_rem(poly_mul(b, b, p), mod, p);
    e >>= 1;
  }
  return out;
}

std::uint64_t poly_eval(const PolyFp& a, std::uint64_t x, std::uint64_t p) {
  std::uint64_t out = 0;
  x %= p;
  for (std::size_t i = a.c.size(); i-- > 0;) out = (out * x + a.c[i]) % p;
  return out;
}

bool is_irreducible(const PolyFp& g, std::uint64_t p) {
  if (!is_prime(p) || p >= kPrimeCap)
    throw std::invalid_argument("is_irreducible: p must be a prime < 2^31");
  PolyFp f = poly_trim(g);
  for (auto& v : f.c) v %= p;
  f = poly_trim(std::move(f));
  if (f.c.empty())
    throw std::invalid_argument("is_irreducible: zero polynomial");
  const std::size_t n = f.c.size() - 1;
  if (n == 0) return false;  // units are not irreducible
  if (n == 1) return true;
  // normalize to monic; irreducibility is unchanged
  if (f.c.back() != 1) {
    const std::uint64_t inv = fp_inv_scalar(f.c.back(), p);
    for (auto& v : f.c) v = v * inv % p;
  }
  const PolyFp x{{0, 1}};
  // chain[i] = X^(p^i) mod f
  std::vector<PolyFp> chain(n + 1);
  chain[0] = poly_rem(x, f, p);
  for (std::size_t i = 1; i <= n; ++i)
    chain[i] = poly_powmod(chain[i - 1], p, f, p);
  if (!(chain[n] == chain[0])) return false;
  for (std::uint64_t l : prime_factors(n)) {
    const PolyFp diff = poly_sub(chain[n / l], chain[0], p);
    const PolyFp g1 = poly_gcd(diff, f, p);
    if (poly_degree(g1) != std::optional<std::size_t>{0}) return false;
  }
  return true;
}

PolyFp find_irreducible(std::uint64_t p, std::size_t r) {
  if (!is_prime(p) || p >= kPrimeCap)
    throw std::invalid_argument("find_irreducible: p must be a prime < 2^31");
  if (r == 0) throw std::invalid_argument("find_irreducible: r must be >= 1");
  // Walk candidate lower-coefficient tuples in base-p counter order, c_0
  // least significant, and return the first irreducible hit.
  PolyFp cand;
  cand.c.assign(r + 1, 0);
  cand.c[r] = 1;
  while (true) {
    if (is_irreducible(cand, p)) return cand;
    std::size_t pos = 0;
    while (pos < r && cand.c[pos] == p - 1) cand.c[pos++] = 0;
    if (pos == r)
      throw invariant_error("find_irreducible: exhausted candidates");
    ++cand.c[pos];
  }
}

// ---------------------------------------------------------------------------
// FieldCtx
// ---------------------------------------------------------------------------

FieldCtx::FieldCtx(std::uint64_t p, std::size_t r)
    : p_(p), r_(r), modulus_(find_irreducible(p, r)) {
  init_tables();
}

FieldCtx::FieldCtx(std::uint64_t p, std::size_t r, PolyFp modulus)
    : p_(p), r_(r), modulus_(poly_trim(std::move(modulus))) {
  if (!is_prime(p_) || p_ >= kPrimeCap)
    throw std::invalid_argument("FieldCtx: p must be a prime < 2^31");
  for (auto& v : modulus_.c) v %= p_;
  modulus_ = poly_trim(std::move(modulus_));
  if (poly_degree(modulus_) != std::optional<std::size_t>{r_})
    throw std::invalid_argument("FieldCtx: modulus degree must equal r");
  if (modulus_.c.back() != 1)
    throw std::invalid_argument("FieldCtx: modulus must be monic");
  if (!is_irreducible(modulus_, p_))
    throw std::invalid_argument("FieldCtx: modulus is reducible");
  init_tables();
}

void FieldCtx::init_tables() {
  if (r_ == 0) throw std::invalid_argument("FieldCtx: r must be >= 1");
  neg_mod_.resize(r_);
  for (std::size_t i = 0; i < r_; ++i)
    neg_mod_[i] = (p_ - modulus_.c[i] % p_) % p_;

  frob_.assign(r_, std::vector<std::uint64_t>(r_ * r_, 0));
  for (std::size_t i = 0; i < r_; ++i) frob_[0][i * r_ + i] = 1;
  if (r_ > 1) {
    // column i of the one-step map is (alpha^p)^i
    const FieldElem ap = pow(alpha(), p_);
    FieldElem col = one();
    for (std::size_t i = 0; i < r_; ++i) {
      for (std::size_t row = 0; row < r_; ++row)
        frob_[1][row * r_ + i] = col.c[row];
      if (i + 1 < r_) col = mul(col, ap);
    }
    for (std::size_t k = 2; k < r_; ++k) {
      // frob_[k] = frob_[1] * frob_[k-1]
      for (std::size_t i = 0; i < r_; ++i)
        for (std::size_t j = 0; j < r_; ++j) {
          unsigned __int128 acc = 0;
          for (std::size_t t = 0; t < r_; ++t)
            acc += static_cast<unsigned __int128>(frob_[1][i * r_ + t]) *
                   frob_[k - 1][t * r_ + j];
          frob_[k][i * r_ + j] = static_cast<std::uint64_t>(acc % p_);
        }
    }
  }
  trace_mat_.assign(r_ * r_, 0);
  for (const auto& m : frob_)
    for (std::size_t i = 0; i < r_ * r_; ++i)
      trace_mat_[i] = (trace_mat_[i] + m[i]) % p_;
}

void FieldCtx::check_elem(const FieldElem& a) const {
  if (a.c.size() != r_)
    throw std::invalid_argument(
        "FieldElem does not belong to this field context (length " +
        std::to_string(a.c.size()) + ", expected " + std::to_string(r_) + ")");
}

std::uint64_t FieldCtx::fp_add(std::uint64_t a, std::uint64_t b) const {
  return (a + b) % p_;
}
std::uint64_t FieldCtx::fp_sub(std::uint64_t a, std::uint64_t b) const {
  return (a + p_ - b % p_) % p_;
}
std::uint64_t FieldCtx::fp_mul(std::uint64_t a, std::uint64_t b) const {
  return a % p_ * (b % p_) % p_;
}
std::uint64_t FieldCtx::fp_neg(std::uint64_t a) const {
  return (p_ - a % p_) % p_;
}
std::uint64_t FieldCtx::fp_inv(std::uint64_t a) const {
  return fp_inv_scalar(a, p_);
}
std::uint64_t FieldCtx::fp_pow(std::uint64_t a, std::uint64_t e) const {
  std::uint64_t out = 1 % p_;
  a %= p_;
  while (e) {
    if (e & 1) out = out * a % p_;
    a = a * a % p_;
    e >>= 1;
  }
  return out;
}

FieldElem FieldCtx::zero() const {
  return FieldElem{std::vector<std::uint64_t>(r_, 0)};
}

FieldElem FieldCtx::one() const { return from_fp(1); }

FieldElem FieldCtx::from_fp(std::uint64_t v) const {
  FieldElem out = zero();
  out.c[0] = v % p_;
  return out;
}

FieldElem FieldCtx::alpha() const {
  FieldElem out = zero();
  if (r_ > 1) out.c[1] = 1;
  // r = 1: the class of X is 0 because the canonical modulus is X itself
  return out;
}

FieldElem FieldCtx::element(std::vector<std::uint64_t> coords) const {
  if (coords.size() != r_)
    throw std::invalid_argument("element: expected exactly r coordinates");
  for (auto& v : coords) v %= p_;
  return FieldElem{std::move(coords)};
}

bool FieldCtx::in_prime_field(const FieldElem& a) const {
  check_elem(a);
  for (std::size_t i = 1; i < r_; ++i)
    if (a.c[i]) return false;
  return true;
}

FieldElem FieldCtx::add(const FieldElem& a, const FieldElem& b) const {
  check_elem(a);
  check_elem(b);
  FieldElem out = a;
  for (std::size_t i = 0; i < r_; ++i) out.c[i] = (out.c[i] + b.c[i]) % p_;
  return out;
}

FieldElem FieldCtx::sub(const FieldElem& a, const FieldElem& b) const {
  check_elem(a);
  check_elem(b);
  FieldElem out = a;
  for (std::size_t i = 0; i < r_; ++i)
    out.c[i] = (out.c[i] + p_ - b.c[i]) % p_;
  return out;
}

FieldElem FieldCtx::neg(const FieldElem& a) const {
  check_elem(a);
  FieldElem out = a;
  for (auto& v : out.c) v = (p_ - v) % p_;
  return out;
}

void FieldCtx::mul_into(std::span<const std::uint64_t> a,
                        std::span<const std::uint64_t> b,
                        std::span<std::uint64_t> out,
                        std::span<std::uint64_t> work) const {
  const std::size_t r = r_;
  for (auto& v : work) v = 0;
  for (std::size_t i = 0; i < r; ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < r; ++j)
      work[i + j] = (work[i + j] + a[i] * b[j]) % p_;
  }
  // fold degrees 2r-2 .. r back below the modulus
  for (std::size_t i = 2 * r - 2; i + 1 > r; --i) {
    const std::uint64_t t = work[i];
    if (!t) continue;
    work[i] = 0;
    for (std::size_t j = 0; j < r; ++j)
      work[i - r + j] = (work[i - r + j] + neg_mod_[j] * t) % p_;
  }
  for (std::size_t i = 0; i < r; ++i) out[i] = work[i];
}

FieldElem FieldCtx::mul(const FieldElem& a, const FieldElem& b) const {
  check_elem(a);
  check_elem(b);
  FieldElem out = zero();
  if (r_ == 1) {
    out.c[0] = a.c[0] * b.c[0] % p_;
    return out;
  }
  std::vector<std::uint64_t> work(2 * r_ - 1);
  mul_into(a.c, b.c, out.c, work);
  return out;
}

FieldElem FieldCtx::scale(const FieldElem& a, std::uint64_t s) const {
  check_elem(a);
  FieldElem out = a;
  s %= p_;
  for (auto& v : out.c) v = v * s % p_;
  return out;
}

FieldElem FieldCtx::inv(const FieldElem& a) const {
  check_elem(a);
  if (a.is_zero())
    throw std::invalid_argument("inv: the zero element is not invertible");
  // extended Euclid over F_p[X]: u*a + v*modulus = gcd
  PolyFp old_r = poly_trim(PolyFp{a.c});
  PolyFp r = modulus_;
  PolyFp old_s{{1}};
  PolyFp s{};
  while (!r.c.empty()) {
    auto [q, rem] = poly_divrem(old_r, r, p_);
    old_r = std::move(r);
    r = std::move(rem);
    PolyFp tmp = poly_sub(old_s, poly_mul(q, s, p_), p_);
    old_s = std::move(s);
    s = std::move(tmp);
  }
  if (poly_degree(old_r) != std::optional<std::size_t>{0})
    throw invariant_error("inv: gcd with an irreducible modulus not constant");
  const std::uint64_t scale_by = fp_inv_scalar(old_r.c[0], p_);
  PolyFp u = poly_rem(old_s, modulus_, p_);
  FieldElem out = zero();
  for (std::size_t i = 0; i < u.c.size(); ++i) out.c[i] = u.c[i] * scale_by % p_;
  return out;
}

FieldElem FieldCtx::pow(const FieldElem& a, std::uint64_t e) const {
  check_elem(a);
  FieldElem out = one();
  FieldElem base = a;
  while (e) {
    if (e & 1) out = mul(out, base);
    base = mul(base, base);
    e >>= 1;
  }
  return out;
}

FieldElem FieldCtx::frobenius(const FieldElem& a, std::size_t k) const {
  check_elem(a);
  k %= r_;
  const auto& m = frob_[k];
  FieldElem out = zero();
  for (std::size_t i = 0; i < r_; ++i) {
    unsigned __int128 acc = 0;
    for (std::size_t j = 0; j < r_; ++j)
      acc += static_cast<unsigned __int128>(m[i * r_ + j]) * a.c[j];
    out.c[i] = static_cast<std::uint64_t>(acc % p_);
  }
  return out;
}

std::uint64_t FieldCtx::trace(const FieldElem& a) const {
  check_elem(a);
  std::uint64_t first = 0;
  for (std::size_t i = 0; i < r_; ++i) {
    unsigned __int128 acc = 0;
    for (std::size_t j = 0; j < r_; ++j)
      acc += static_cast<unsigned __int128>(trace_mat_[i * r_ + j]) * a.c[j];
    const std::uint64_t v = static_cast<std::uint64_t>(acc % p_);
    if (i == 0) {
      first = v;
    } else if (v != 0) {
      throw invariant_error("trace: orbit sum left the prime subfield");
    }
  }
  return first;
}

const std::vector<std::uint64_t>& FieldCtx::frobenius_matrix(
    std::size_t k) const {
  return frob_[k % r_];
}

}  // namespace ffdigits
