#include "ffdigits/fp_linalg.hpp"

#include <stdexcept>

namespace ffdigits {

std::uint64_t fp_inv_scalar(std::uint64_t a, std::uint64_t p) {
  a %= p;
  if (a == 0) throw std::invalid_argument("fp_inv_scalar: zero has no inverse");
  // extended Euclid on (a, p); everything fits in int64 since p < 2^31
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(p);
  std::int64_t new_r = static_cast<std::int64_t>(a);
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    std::int64_t tmp = t - q * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - q * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1) throw std::invalid_argument("fp_inv_scalar: modulus not prime?");
  if (t < 0) t += static_cast<std::int64_t>(p);
  return static_cast<std::uint64_t>(t);
}

namespace {

// Row-reduce m in place, applying the same operations to rhs when present.
// Returns the rank.
std::size_t eliminate(FpMatrix& m, FpMatrix* rhs, std::uint64_t p) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    std::size_t pivot = rank;
    while (pivot < rows && m[pivot][col] % p == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[rank]);
    if (rhs) std::swap((*rhs)[pivot], (*rhs)[rank]);
    const std::uint64_t inv = fp_inv_scalar(m[rank][col], p);
    for (auto& v : m[rank]) v = v % p * inv % p;
    if (rhs)
      for (auto& v : (*rhs)[rank]) v = v % p * inv % p;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == rank) continue;
      const std::uint64_t f = m[i][col] % p;
      if (!f) continue;
      for (std::size_t j = 0; j < cols; ++j)
        m[i][j] = (m[i][j] + (p - f) * m[rank][j]) % p;
      if (rhs)
        for (std::size_t j = 0; j < (*rhs)[i].size(); ++j)
          (*rhs)[i][j] = ((*rhs)[i][j] + (p - f) * (*rhs)[rank][j]) % p;
    }
    ++rank;
  }
  return rank;
}

}  // namespace

std::optional<FpMatrix> fp_invert(FpMatrix m, std::uint64_t p) {
  const std::size_t n = m.size();
  FpMatrix id(n, std::vector<std::uint64_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw std::invalid_argument("fp_invert: not square");
    id[i][i] = 1;
  }
  if (eliminate(m, &id, p) != n) return std::nullopt;
  return id;
}

std::size_t fp_rank(FpMatrix m, std::uint64_t p) {
  return eliminate(m, nullptr, p);
}

std::vector<std::uint64_t> fp_matvec(const FpMatrix& m,
                                     const std::vector<std::uint64_t>& v,
                                     std::uint64_t p) {
  std::vector<std::uint64_t> out(m.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    unsigned __int128 acc = 0;
    for (std::size_t j = 0; j < v.size(); ++j)
      acc += static_cast<unsigned __int128>(m[i][j]) * v[j];
    out[i] = static_cast<std::uint64_t>(acc % p);
  }
  return out;
}

FpMatrix fp_matmul(const FpMatrix& a, const FpMatrix& b, std::uint64_t p) {
  const std::size_t n = a.size();
  const std::size_t k = b.size();
  const std::size_t m = k ? b[0].size() : 0;
  FpMatrix out(n, std::vector<std::uint64_t>(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      unsigned __int128 acc = 0;
      for (std::size_t t = 0; t < k; ++t)
        acc += static_cast<unsigned __int128>(a[i][t]) * b[t][j];
      out[i][j] = static_cast<std::uint64_t>(acc % p);
    }
  return out;
}

}  // namespace ffdigits
