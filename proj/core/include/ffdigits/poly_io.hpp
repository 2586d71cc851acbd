#pragma once

#include <string>
#include <vector>

#include "ffdigits/lift.hpp"

namespace ffdigits {

// Serialization used by the CLI and golden tests.  Coefficient vectors are
// decimal, lowest degree first, bracketed: "[1,0,1]" is X^2 + 1 over F_p and
// also the element 1 + alpha^2 of an extension written in its power basis.

std::string format_fp_poly(const PolyFp& g);
std::string format_elem(const FieldElem& a);
// "[[1,0],[0,1]]" — one coordinate vector per basis element, in order.
std::string format_basis(const OrderedBasis& b);

// Univariate polynomials use a small term grammar: terms "k*X^e" joined by
// "+", where k is either a decimal residue (prime-field coefficient) or a
// bracketed coordinate vector.  format_uni_poly emits highest degree first,
// omits "*" after a coefficient of one, and prints prime-field coefficients
// as bare decimals; parse_uni_poly accepts anything the grammar allows,
// reduces mod p, pads short coordinate vectors, and accumulates repeated
// exponents.
std::string format_uni_poly(const UniPolyFq& f, const FieldCtx& ctx);
UniPolyFq parse_uni_poly(const std::string& text, const FieldCtx& ctx);

// "[a,b,c]" (or bare "a,b,c") -> {a,b,c}; rejects anything non-numeric.
std::vector<std::uint64_t> parse_int_list(const std::string& text);

// One term per line, "coeff_vector : exponent_vector", in the polynomial's
// canonical (graded lexicographic) order.
std::vector<std::string> poly_term_lines(const SparseMvPoly& a);

}  // namespace ffdigits
