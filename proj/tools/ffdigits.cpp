#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ffdigits/census.hpp"
#include "ffdigits/poly_io.hpp"
#include "json.hpp"

using namespace ffdigits;
using ordered_json = nlohmann::ordered_json;

namespace {

// The config echo pins everything that defines the experiment; it leaves out
// the output destination and the worker count, which only affect where and
// how fast the same bytes are produced.
std::string config_line(const ordered_json& cfg) {
  return "# config: " + cfg.dump() + "\n";
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out)
    throw std::invalid_argument("cannot open output file '" + output + "'");
  out << text;
}

FieldCtx make_ctx(std::uint64_t p, std::size_t r, const std::string& modulus) {
  if (modulus.empty()) return FieldCtx(p, r);
  return FieldCtx(p, r, PolyFp{parse_int_list(modulus)});
}

DigitFunction parse_kind(const std::string& s) {
  if (s.size() != 1)
    throw std::invalid_argument("unknown digit function (expected R or T)");
  return digit_function_from_letter(s[0]);
}

std::uint64_t upow(std::uint64_t base, std::size_t e) {
  std::uint64_t out = 1;
  while (e--) out *= base;
  return out;
}

std::string term_block(const char* label, const SparseMvPoly& P) {
  std::string out = std::string(label) + " (" +
                    std::to_string(P.term_count()) + " terms):\n";
  for (const std::string& line : poly_term_lines(P)) out += "  " + line + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// field
// ---------------------------------------------------------------------------

struct FieldArgs {
  std::uint64_t p = 0;
  std::size_t r = 0;
  std::string modulus, basis = "polynomial", output, format = "text";
  std::uint64_t seed = 1;
};

void run_field(const FieldArgs& a) {
  const FieldCtx ctx = make_ctx(a.p, a.r, a.modulus);
  const BasisPair pair =
      make_basis(ctx, basis_policy_from_name(a.basis), a.seed);

  ordered_json cfg;
  cfg["command"] = "field";
  cfg["p"] = a.p;
  cfg["r"] = a.r;
  cfg["modulus"] = format_fp_poly(ctx.modulus());
  cfg["basis_policy"] = a.basis;
  cfg["seed"] = a.seed;
  cfg["format"] = a.format;

  if (a.format == "json") {
    ordered_json j;
    j["config"] = cfg;
    j["p"] = a.p;
    j["r"] = a.r;
    j["modulus"] = format_fp_poly(ctx.modulus());
    j["basis"] = format_basis(pair.basis);
    j["dual"] = format_basis(pair.dual);
    emit(j.dump(2) + "\n", a.output);
    return;
  }
  if (a.format != "text")
    throw std::invalid_argument("field: --format must be text or json");

  std::string out = config_line(cfg);
  out += "p: " + std::to_string(a.p) + "\n";
  out += "r: " + std::to_string(a.r) + "\n";
  out += "modulus: " + format_fp_poly(ctx.modulus()) + "\n";
  out += "basis: " + format_basis(pair.basis) + "\n";
  out += "dual: " + format_basis(pair.dual) + "\n";
  emit(out, a.output);
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

struct CountArgs {
  std::uint64_t p = 0;
  std::size_t r = 0;
  std::string f, kind = "R", modulus, basis = "polynomial", output,
                 format = "csv";
  std::int64_t c = -1;  // -1: no class filter
  std::uint64_t seed = 1, budget = kDefaultPointBudget;
  unsigned jobs = 1;
};

void run_count(const CountArgs& a) {
  const FieldCtx ctx = make_ctx(a.p, a.r, a.modulus);
  const BasisPair pair =
      make_basis(ctx, basis_policy_from_name(a.basis), a.seed);
  const DigitFunction kind = parse_kind(a.kind);
  const UniPolyFq f = parse_uni_poly(a.f, ctx);
  if (a.c >= 0 && static_cast<std::uint64_t>(a.c) >= a.p)
    throw std::invalid_argument("count: --c out of range");

  const DistReport rep = distribution(f, pair, kind, a.budget, a.jobs);
  const std::uint64_t main_term = upow(a.p, a.r - 1);
  const bool ds13_applies = kind == DigitFunction::thue_morse &&
                            std::gcd<std::uint64_t>(rep.d, a.p) == 1;
  const double ds13_bound =
      double(rep.d ? rep.d - 1 : 0) * std::pow(double(a.p), double(a.r) / 2.0);

  ordered_json cfg;
  cfg["command"] = "count";
  cfg["p"] = a.p;
  cfg["r"] = a.r;
  cfg["d"] = rep.d;
  cfg["modulus"] = format_fp_poly(ctx.modulus());
  cfg["basis_policy"] = a.basis;
  cfg["f"] = rep.f;
  cfg["kind"] = std::string(1, digit_function_letter(kind));
  cfg["c"] = a.c < 0 ? ordered_json(nullptr) : ordered_json(a.c);
  cfg["seed"] = a.seed;
  cfg["budget"] = a.budget;
  cfg["format"] = a.format;

  if (a.format == "json") {
    ordered_json j;
    j["config"] = cfg;
    j["rows"] = ordered_json::array();
    for (std::uint64_t c = 0; c < a.p; ++c) {
      if (a.c >= 0 && c != static_cast<std::uint64_t>(a.c)) continue;
      const std::uint64_t n = rep.counts[c];
      const std::uint64_t dev = n > main_term ? n - main_term : main_term - n;
      ordered_json row;
      row["c"] = c;
      row["count"] = n;
      row["main_term"] = main_term;
      row["abs_deviation"] = dev;
      if (kind == DigitFunction::rudin_shapiro) {
        const unsigned q = deviation_exponent_quarters(a.r, c == 0);
        row["h"] = q / 4.0;
        row["normalized"] =
            dev / std::pow(double(a.p), (3.0 * a.r + 1.0 - q) / 4.0);
      }
      j["rows"].push_back(std::move(row));
    }
    if (kind == DigitFunction::thue_morse) {
      if (ds13_applies) {
        const Ds13Result res = ds13_check(rep, rep.d);
        j["ds13"] = {{"max_abs_deviation", res.max_abs_deviation},
                     {"bound", ds13_bound},
                     {"ok", res.ok}};
      } else {
        j["ds13"] = {{"applicable", false}};
      }
    }
    emit(j.dump(2) + "\n", a.output);
    return;
  }
  if (a.format != "csv")
    throw std::invalid_argument("count: --format must be csv or json");

  std::string out = config_line(cfg);
  out += csv_header() + "\n";
  const std::vector<std::string> rows = csv_rows(rep, a.basis);
  for (std::uint64_t c = 0; c < a.p; ++c) {
    if (a.c >= 0 && c != static_cast<std::uint64_t>(a.c)) continue;
    out += rows[c] + "\n";
  }
  if (kind == DigitFunction::thue_morse) {
    if (ds13_applies) {
      const Ds13Result res = ds13_check(rep, rep.d);
      out += "# ds13: max_abs_deviation " +
             std::to_string(res.max_abs_deviation) + ", bound " +
             format_double(ds13_bound) + ", " + (res.ok ? "pass" : "FAIL") +
             "\n";
    } else {
      out += "# ds13: inapplicable (p divides deg f)\n";
    }
  }
  emit(out, a.output);
}

// ---------------------------------------------------------------------------
// lift
// ---------------------------------------------------------------------------

struct LiftArgs {
  std::uint64_t p = 0;
  std::size_t r = 0;
  std::string f, modulus, basis = "polynomial", output, format = "text";
  std::uint64_t seed = 1, budget = kDefaultTermBudget;
};

void run_lift(const LiftArgs& a) {
  const FieldCtx ctx = make_ctx(a.p, a.r, a.modulus);
  const BasisPolicy policy = basis_policy_from_name(a.basis);
  const BasisPair pair = make_basis(ctx, policy, a.seed);
  const UniPolyFq f = parse_uni_poly(a.f, ctx);
  const std::size_t d = uni_degree(f).value_or(0);

  const CouplingMatrix cm = coupling_matrix(pair);
  const SparseMvPoly Q = twisted_lift(f, cm, ctx);
  const SparseMvPoly F = digit_lift(f, pair, a.budget);
  const SparseMvPoly Qtop =
      homogeneous_part(Q, static_cast<std::uint32_t>(2 * d));
  const IdentityCheck chk = verify_value_identity(F, f, pair);
  if (chk.mismatches)
    throw invariant_error("lift: value identity failed on " +
                          std::to_string(chk.mismatches) + " of " +
                          std::to_string(chk.points) + " points");

  bool diag_zero = true;
  for (std::size_t j = 0; j < a.r; ++j)
    if (!cm.a[j][j].is_zero()) diag_zero = false;
  const bool special = policy == BasisPolicy::special_dual;
  const bool in_window = d < a.p;

  ordered_json cfg;
  cfg["command"] = "lift";
  cfg["p"] = a.p;
  cfg["r"] = a.r;
  cfg["d"] = d;
  cfg["modulus"] = format_fp_poly(ctx.modulus());
  cfg["basis_policy"] = a.basis;
  cfg["f"] = format_uni_poly(f, ctx);
  cfg["seed"] = a.seed;
  cfg["budget"] = a.budget;
  cfg["format"] = a.format;

  if (a.format == "json") {
    ordered_json j;
    j["config"] = cfg;
    j["coupling"] = ordered_json::array();
    for (std::size_t row = 0; row < a.r; ++row) {
      ordered_json line = ordered_json::array();
      for (std::size_t col = 0; col < a.r; ++col)
        line.push_back(format_elem(cm.a[row][col]));
      j["coupling"].push_back(std::move(line));
    }
    j["F"] = poly_term_lines(F);
    j["Q"] = poly_term_lines(Q);
    j["Q_top"] = poly_term_lines(Qtop);
    j["deg_F"] = F.degree().value_or(0);
    j["expected_deg_F"] = 2 * d;
    j["frobenius_fixed"] = true;
    j["coupling_identities"] = true;
    j["value_identity"] = {{"points", chk.points},
                           {"mismatches", chk.mismatches}};
    j["special_diagonal"] =
        special ? ordered_json(diag_zero) : ordered_json(nullptr);
    j["degree_window"] = {{"d", d}, {"p", a.p}, {"within", in_window}};
    emit(j.dump(2) + "\n", a.output);
    return;
  }
  if (a.format != "text")
    throw std::invalid_argument("lift: --format must be text or json");

  std::string out = config_line(cfg);
  out += "basis: " + format_basis(pair.basis) + "\n";
  out += "dual: " + format_basis(pair.dual) + "\n";
  for (std::size_t row = 0; row < a.r; ++row) {
    out += "a[" + std::to_string(row) + "]:";
    for (std::size_t col = 0; col < a.r; ++col)
      out += " " + format_elem(cm.a[row][col]);
    out += "\n";
  }
  out += term_block("F", F);
  out += term_block("Q", Q);
  out += term_block("Q_top", Qtop);
  out += "deg F: " + std::to_string(F.degree().value_or(0)) +
         " (2d = " + std::to_string(2 * d) + ")\n";
  out += "coefficients Frobenius-fixed: yes\n";
  out += "coupling identities: yes\n";
  out += "value identity: " + std::to_string(chk.points) + " points, " +
         std::to_string(chk.mismatches) + " mismatches\n";
  out += std::string("special diagonal (a[j][j] = 0): ") +
         (special ? (diag_zero ? "yes" : "VIOLATED") : "n/a") + "\n";
  out += "degree window: d = " + std::to_string(d) +
         (in_window ? " < p = " : " >= p = ") + std::to_string(a.p) +
         (in_window ? ", quadratic-count analysis applies"
                    : ", outside the d < p analysis window") +
         "\n";
  emit(out, a.output);
}

// ---------------------------------------------------------------------------
// census-singular
// ---------------------------------------------------------------------------

struct CensusArgs {
  std::uint64_t p = 0;
  std::size_t r = 0;
  std::string f, system = "tm", modulus, basis = "polynomial", output,
                 format = "text";
  std::uint64_t c = 0, seed = 1, budget = kDefaultPointBudget;
  unsigned jobs = 1;
};

void run_census(const CensusArgs& a) {
  const FieldCtx ctx = make_ctx(a.p, a.r, a.modulus);
  const BasisPair pair =
      make_basis(ctx, basis_policy_from_name(a.basis), a.seed);
  const UniPolyFq f = parse_uni_poly(a.f, ctx);
  const std::size_t d = uni_degree(f).value_or(0);
  if (a.c >= a.p)
    throw std::invalid_argument("census-singular: --c out of range");

  SparseMvPoly P(ctx.r());
  std::uint64_t census_value = 0;
  if (a.system == "q") {
    P = twisted_lift(f, coupling_matrix(pair), ctx);
    census_value = a.c;
  } else if (a.system == "qtop") {
    P = homogeneous_part(twisted_lift(f, coupling_matrix(pair), ctx),
                         static_cast<std::uint32_t>(2 * d));
    census_value = a.c;
  } else if (a.system == "tm") {
    P = thue_morse_lift(f, pair, a.c);
    census_value = 0;
  } else {
    throw std::invalid_argument(
        "census-singular: --system must be q, qtop or tm");
  }

  ordered_json cfg;
  cfg["command"] = "census-singular";
  cfg["p"] = a.p;
  cfg["r"] = a.r;
  cfg["d"] = d;
  cfg["modulus"] = format_fp_poly(ctx.modulus());
  cfg["basis_policy"] = a.basis;
  cfg["f"] = format_uni_poly(f, ctx);
  cfg["system"] = a.system;
  cfg["c"] = a.c;
  cfg["seed"] = a.seed;
  cfg["budget"] = a.budget;
  cfg["format"] = a.format;

  struct Row {
    unsigned m;
    std::uint64_t cost;
    bool skipped;
    std::uint64_t count;
  };
  std::vector<Row> table;
  for (unsigned m = 1; m <= 2; ++m) {
    const std::uint64_t cost = singular_census_cost(P, ctx, m);
    if (m > 1 && cost > a.budget) {
      table.push_back({m, cost, true, 0});
      continue;
    }
    table.push_back(
        {m, cost, false,
         singular_census(P, census_value, ctx, m, a.budget, a.jobs)});
  }

  if (a.format == "json") {
    ordered_json j;
    j["config"] = cfg;
    j["system"] = {{"name", a.system},
                   {"variables", P.nvars()},
                   {"terms", P.term_count()},
                   {"degree", P.degree().value_or(0)},
                   {"census_value", census_value}};
    j["census"] = ordered_json::array();
    for (const Row& row : table) {
      ordered_json entry;
      entry["m"] = row.m;
      entry["cost"] = row.cost;
      if (row.skipped)
        entry["skipped"] = true;
      else
        entry["count"] = row.count;
      j["census"].push_back(std::move(entry));
    }
    emit(j.dump(2) + "\n", a.output);
    return;
  }
  if (a.format != "text")
    throw std::invalid_argument("census-singular: --format must be text or json");

  std::string out = config_line(cfg);
  out += "system: " + a.system + "\n";
  out += "variables: " + std::to_string(P.nvars()) + "\n";
  out += "terms: " + std::to_string(P.term_count()) + "\n";
  out += "degree: " + std::to_string(P.degree().value_or(0)) + "\n";
  out += "census value: " + std::to_string(census_value) + "\n";
  for (const Row& row : table) {
    out += "m = " + std::to_string(row.m) + ": ";
    if (row.skipped)
      out += "skipped (cost " + std::to_string(row.cost) +
             " exceeds budget " + std::to_string(a.budget) + ")\n";
    else
      out += "count " + std::to_string(row.count) + " (cost " +
             std::to_string(row.cost) + ")\n";
  }
  emit(out, a.output);
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string p_list;
  std::size_t r = 0, d = 1;
  std::string kind = "R", basis = "polynomial", f_policy = "monomial", f,
              output, format = "csv";
  std::uint64_t seed = 1, budget = kDefaultPointBudget;
  unsigned jobs = 1;
};

void run_sweep(const SweepArgs& a) {
  const DigitFunction kind = parse_kind(a.kind);
  FSpec fs;
  if (a.f_policy == "monomial") {
    fs.policy = FPolicy::monomial;
  } else if (a.f_policy == "seeded-random") {
    fs.policy = FPolicy::seeded_random;
  } else if (a.f_policy == "user") {
    fs.policy = FPolicy::user;
    fs.text = a.f;
  } else {
    throw std::invalid_argument(
        "sweep: --f-policy must be monomial, seeded-random or user");
  }
  const std::vector<std::uint64_t> p_list = parse_int_list(a.p_list);

  const SweepResult res = sweep(a.d, a.r, kind, p_list,
                                basis_policy_from_name(a.basis), fs, a.seed,
                                a.budget, a.jobs);

  ordered_json cfg;
  cfg["command"] = "sweep";
  cfg["p_list"] = ordered_json::array();
  for (const SweepEntry& e : res.entries) cfg["p_list"].push_back(e.p);
  cfg["r"] = a.r;
  cfg["d"] = a.d;
  cfg["basis_policy"] = a.basis;
  cfg["f_policy"] = a.f_policy;
  if (fs.policy == FPolicy::user) cfg["f"] = a.f;
  cfg["kind"] = std::string(1, digit_function_letter(kind));
  cfg["seed"] = a.seed;
  cfg["budget"] = a.budget;
  cfg["format"] = a.format;

  const auto trend_text = [&]() -> std::string {
    if (!res.trend_checked)
      return "not evaluated (needs >= 2 primes, r >= 4, prime span >= 4x)";
    return "rel_dev " + format_double(res.entries.front().rel_dev) + " (p=" +
           std::to_string(res.entries.front().p) + ") -> " +
           format_double(res.entries.back().rel_dev) + " (p=" +
           std::to_string(res.entries.back().p) +
           "), decreasing: " + (res.trend_ok ? "yes" : "no");
  };

  if (a.format == "json") {
    ordered_json j;
    j["config"] = cfg;
    j["rows"] = ordered_json::array();
    for (const SweepEntry& e : res.entries) {
      ordered_json row;
      row["p"] = e.p;
      row["f"] = e.report.f;
      row["counts"] = e.report.counts;
      row["rel_dev"] = e.rel_dev;
      row["max_normalized"] = e.max_normalized;
      j["rows"].push_back(std::move(row));
    }
    j["trend"] = {{"checked", res.trend_checked}, {"ok", res.trend_ok}};
    emit(j.dump(2) + "\n", a.output);
    return;
  }
  if (a.format != "csv")
    throw std::invalid_argument("sweep: --format must be csv or json");

  std::string out = config_line(cfg);
  out += csv_header() + "\n";
  for (const SweepEntry& e : res.entries)
    for (const std::string& row : csv_rows(e.report, a.basis)) out += row + "\n";
  out += "# trend: " + trend_text() + "\n";
  emit(out, a.output);
}

const char* kFGrammarHelp =
    "polynomial in X: terms 'k*X^e' joined by '+'; k is a decimal residue "
    "or a bracketed coordinate vector like [1,0,2] (lowest degree first)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exhaustive digit-function statistics over finite fields"};
  app.require_subcommand(1);

  FieldArgs fa;
  CLI::App* field = app.add_subcommand(
      "field", "print a field's canonical modulus and a basis/dual pair");
  field->add_option("--p", fa.p, "prime characteristic")->required();
  field->add_option("--r", fa.r, "extension degree")->required();
  field->add_option("--modulus", fa.modulus,
                    "modulus coefficients, lowest degree first");
  field->add_option("--basis", fa.basis,
                    "polynomial | special-dual | seeded-random");
  field->add_option("--seed", fa.seed, "seed for seeded-random");
  field->add_option("--output", fa.output, "write to this file");
  field->add_option("--format", fa.format, "text | json");

  CountArgs ca;
  CLI::App* count = app.add_subcommand(
      "count", "exhaustive digit-function distribution of f over F_{p^r}");
  count->add_option("--p", ca.p, "prime characteristic")->required();
  count->add_option("--r", ca.r, "extension degree")->required();
  count->add_option("--f", ca.f, kFGrammarHelp)->required();
  count->add_option("--kind", ca.kind, "digit function: R | T");
  count->add_option("--c", ca.c, "emit only this class");
  count->add_option("--modulus", ca.modulus,
                    "modulus coefficients, lowest degree first");
  count->add_option("--basis", ca.basis,
                    "polynomial | special-dual | seeded-random");
  count->add_option("--seed", ca.seed, "seed for seeded-random");
  count->add_option("--budget", ca.budget, "point-evaluation budget");
  count->add_option("--jobs", ca.jobs, "worker threads");
  count->add_option("--output", ca.output, "write to this file");
  count->add_option("--format", ca.format, "csv | json");

  LiftArgs la;
  CLI::App* lift = app.add_subcommand(
      "lift", "build the digit-form polynomials of f and report invariants");
  lift->add_option("--p", la.p, "prime characteristic")->required();
  lift->add_option("--r", la.r, "extension degree")->required();
  lift->add_option("--f", la.f, kFGrammarHelp)->required();
  lift->add_option("--modulus", la.modulus,
                   "modulus coefficients, lowest degree first");
  lift->add_option("--basis", la.basis,
                   "polynomial | special-dual | seeded-random");
  lift->add_option("--seed", la.seed, "seed for seeded-random");
  lift->add_option("--budget", la.budget, "term budget for expansions");
  lift->add_option("--output", la.output, "write to this file");
  lift->add_option("--format", la.format, "text | json");

  CensusArgs sa;
  CLI::App* census = app.add_subcommand(
      "census-singular",
      "count singular points of a lifted system over F_{p^m}, m = 1, 2");
  census->add_option("--p", sa.p, "prime characteristic")->required();
  census->add_option("--r", sa.r, "extension degree")->required();
  census->add_option("--f", sa.f, kFGrammarHelp)->required();
  census->add_option("--system", sa.system,
                     "q (full lift) | qtop (top slice) | tm");
  census->add_option("--c", sa.c, "class value");
  census->add_option("--modulus", sa.modulus,
                     "modulus coefficients, lowest degree first");
  census->add_option("--basis", sa.basis,
                     "polynomial | special-dual | seeded-random");
  census->add_option("--seed", sa.seed, "seed for seeded-random");
  census->add_option("--budget", sa.budget, "point-evaluation budget");
  census->add_option("--jobs", sa.jobs, "worker threads");
  census->add_option("--output", sa.output, "write to this file");
  census->add_option("--format", sa.format, "text | json");

  SweepArgs wa;
  CLI::App* sw = app.add_subcommand(
      "sweep", "one distribution per prime, with a cross-prime trend check");
  sw->add_option("--p-list", wa.p_list, "comma-separated primes, e.g. 3,5,7")
      ->required();
  sw->add_option("--r", wa.r, "extension degree")->required();
  sw->add_option("--d", wa.d, "degree of f")->required();
  sw->add_option("--kind", wa.kind, "digit function: R | T");
  sw->add_option("--basis", wa.basis,
                 "polynomial | special-dual | seeded-random");
  sw->add_option("--f-policy", wa.f_policy, "monomial | seeded-random | user");
  sw->add_option("--f", wa.f, kFGrammarHelp);
  sw->add_option("--seed", wa.seed, "master seed (per-prime seeds derive)");
  sw->add_option("--budget", wa.budget, "point-evaluation budget per prime");
  sw->add_option("--jobs", wa.jobs, "worker threads");
  sw->add_option("--output", wa.output, "write to this file");
  sw->add_option("--format", wa.format, "csv | json");

  field->callback([&] { run_field(fa); });
  count->callback([&] { run_count(ca); });
  lift->callback([&] { run_lift(la); });
  census->callback([&] { run_census(sa); });
  sw->callback([&] { run_sweep(wa); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const budget_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const invariant_error& e) {
    std::fprintf(stderr, "internal invariant violated: %s\n", e.what());
    return 4;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
