// Clause normal form: Tseitin conversion and DIMACS input/output.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kdiff/prop.hpp"

namespace kdiff::prop {

using Clause = std::vector<int>;

struct CnfFormula {
  int num_vars = 0;
  /// Variables 1..num_original carry the input formula's variables.
  int num_original = 0;
  std::vector<Clause> clauses;
  /// names[i] names variable i+1; auxiliaries are `__aux<k>`.
  std::vector<std::string> names;

  std::optional<int> index_of(std::string_view name) const;
};

/// Same variable count, names and clause multiset.
bool same_up_to_clause_order(const CnfFormula& a, const CnfFormula& b);

/// Converts `f` after constant folding. Variables listed in `original` get
/// indices 1..n in that order (even when `f` does not mention them); any other
/// variable of `f` follows in order of first occurrence.
CnfFormula tseitin_cnf(const Formula& f, const std::vector<std::string>& original = {});

/// Emits `c <index> <name>` lines, the `p cnf` header, then one clause per
/// line terminated by ` 0`.
void write_dimacs(const CnfFormula& cnf, std::ostream& sink);
CnfFormula parse_dimacs(std::string_view source);

/// True iff every clause has a true literal; `values[i]` is variable i+1.
bool satisfies(const CnfFormula& cnf, const std::vector<std::uint8_t>& values);

}  // namespace kdiff::prop
