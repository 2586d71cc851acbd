#pragma once

#include "ffdigits/census.hpp"

namespace ffdigits::testing {

// Independent recount of a digit-function distribution, sharing no stage
// with distribution(): it walks digit vectors (first digit fastest, the
// opposite end of the odometer), assembles xi = sum x_i beta_i by naive
// scaling, evaluates f(xi) term by term with pow (no Horner), and reads the
// digits of the value by solving the basis coordinate system with a
// Gauss-inverted matrix instead of traces against the dual.
std::vector<std::uint64_t> oracle_distribution(const UniPolyFq& f,
                                               const BasisPair& pair,
                                               DigitFunction kind);

}  // namespace ffdigits::testing
