#pragma once

#include <cstdint>
#include <optional>
#include <vector>

// Small dense linear algebra over the prime field F_p.  Everything here works
// on plain residue matrices; it backs dual-basis computation, independence
// checks and digit extraction elsewhere in the library.

namespace ffdigits {

using FpMatrix = std::vector<std::vector<std::uint64_t>>;

// Inverse of a mod p (p prime, a not divisible by p).
std::uint64_t fp_inv_scalar(std::uint64_t a, std::uint64_t p);

// Gauss-Jordan inverse; nullopt when the matrix is singular.
std::optional<FpMatrix> fp_invert(FpMatrix m, std::uint64_t p);

std::size_t fp_rank(FpMatrix m, std::uint64_t p);

std::vector<std::uint64_t> fp_matvec(const FpMatrix& m,
                                     const std::vector<std::uint64_t>& v,
                                     std::uint64_t p);

FpMatrix fp_matmul(const FpMatrix& a, const FpMatrix& b, std::uint64_t p);

}  // namespace ffdigits
