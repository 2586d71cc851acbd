#include "ffdigits/poly_io.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace ffdigits {

namespace {

std::string join_u64(const std::vector<std::uint64_t>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  out += ']';
  return out;
}

std::string strip_space(const std::string& s) {
  std::string out;
  for (char ch : s)
    if (!std::isspace(static_cast<unsigned char>(ch))) out += ch;
  return out;
}

std::uint64_t parse_u64(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("expected a number");
  for (char ch : s)
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw std::invalid_argument("expected a number, got '" + s + "'");
  std::size_t used = 0;
  const std::uint64_t v = std::stoull(s, &used);
  if (used != s.size())
    throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

}  // namespace

std::string format_fp_poly(const PolyFp& g) { return join_u64(g.c); }

std::string format_elem(const FieldElem& a) { return join_u64(a.c); }

std::string format_basis(const OrderedBasis& b) {
  std::string out = "[";
  for (std::size_t i = 0; i < b.elems.size(); ++i) {
    if (i) out += ',';
    out += format_elem(b.elems[i]);
  }
  out += ']';
  return out;
}

std::string format_uni_poly(const UniPolyFq& f, const FieldCtx& ctx) {
  const UniPolyFq g = uni_trim(f);
  if (g.c.empty()) return "0";
  std::string out;
  for (std::size_t i = g.c.size(); i-- > 0;) {
    const FieldElem& coeff = g.c[i];
    if (coeff.is_zero()) continue;
    if (!out.empty()) out += '+';
    const bool is_one = coeff == ctx.one();
    std::string ser = ctx.in_prime_field(coeff) ? std::to_string(coeff.c[0])
                                                : format_elem(coeff);
    if (i == 0) {
      out += ser;
    } else {
      if (!is_one) {
        out += ser;
        out += '*';
      }
      out += 'X';
      if (i != 1) {
        out += '^';
        out += std::to_string(i);
      }
    }
  }
  return out.empty() ? "0" : out;
}

std::vector<std::uint64_t> parse_int_list(const std::string& text) {
  std::string s = strip_space(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']')
      throw std::invalid_argument("unbalanced brackets in '" + text + "'");
    s = s.substr(1, s.size() - 2);
  }
  std::vector<std::uint64_t> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = s.find(',', start);
    out.push_back(parse_u64(s.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

UniPolyFq parse_uni_poly(const std::string& text, const FieldCtx& ctx) {
  const std::string s = strip_space(text);
  if (s.empty())
    throw std::invalid_argument("cannot parse polynomial: empty string");

  // split on '+' outside brackets
  std::vector<std::string> pieces;
  std::string cur;
  int depth = 0;
  for (char ch : s) {
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (depth < 0)
      throw std::invalid_argument("cannot parse polynomial: unbalanced ']'");
    if (ch == '+' && depth == 0) {
      pieces.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (depth != 0)
    throw std::invalid_argument("cannot parse polynomial: unbalanced '['");
  pieces.push_back(cur);

  auto parse_coeff = [&](const std::string& t) -> FieldElem {
    if (!t.empty() && t.front() == '[') {
      std::vector<std::uint64_t> v = parse_int_list(t);
      if (v.size() > ctx.r())
        throw std::invalid_argument(
            "cannot parse polynomial: coefficient vector longer than r");
      v.resize(ctx.r(), 0);
      return ctx.element(v);
    }
    return ctx.from_fp(parse_u64(t) % ctx.p());
  };

  std::vector<FieldElem> coeffs;
  auto put = [&](std::size_t e, const FieldElem& k) {
    if (e >= coeffs.size()) coeffs.resize(e + 1, ctx.zero());
    coeffs[e] = ctx.add(coeffs[e], k);
  };

  for (const std::string& piece : pieces) {
    if (piece.empty())
      throw std::invalid_argument("cannot parse polynomial: empty term");
    const std::size_t xpos = piece.find('X');
    if (xpos == std::string::npos) {
      put(0, parse_coeff(piece));
      continue;
    }
    FieldElem k = ctx.one();
    if (xpos > 0) {
      if (piece[xpos - 1] != '*')
        throw std::invalid_argument(
            "cannot parse polynomial: expected '*' before X in '" + piece +
            "'");
      k = parse_coeff(piece.substr(0, xpos - 1));
    }
    std::size_t e = 1;
    if (xpos + 1 < piece.size()) {
      if (piece[xpos + 1] != '^')
        throw std::invalid_argument(
            "cannot parse polynomial: expected '^' after X in '" + piece +
            "'");
      e = static_cast<std::size_t>(parse_u64(piece.substr(xpos + 2)));
      if (e > 4096)
        throw std::invalid_argument(
            "cannot parse polynomial: exponent too large");
    }
    put(e, k);
  }

  UniPolyFq f;
  f.c = std::move(coeffs);
  return uni_trim(std::move(f));
}

std::vector<std::string> poly_term_lines(const SparseMvPoly& a) {
  std::vector<std::string> out;
  for (const auto& [e, coeff] : a.terms()) {
    std::vector<std::uint64_t> exps(e.begin(), e.end());
    out.push_back(join_u64(coeff.c) + " : " + join_u64(exps));
  }
  return out;
}

}  // namespace ffdigits
