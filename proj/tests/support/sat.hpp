// A deliberately naive satisfiability check used to judge CNF output without
// trusting the converter: unit propagation, then branching on what is left.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <vector>

#include "kdiff/cnf.hpp"

namespace kdiff::testing {

// values: 0 false, 1 true, -1 unassigned; index v-1 for variable v.
inline bool propagate(const prop::CnfFormula& cnf, std::vector<int>& values) {
  bool progress = true;
  while (progress) {
    progress = false;
    for (const prop::Clause& clause : cnf.clauses) {
      int unassigned = 0;
      int last = 0;
      bool sat = false;
      for (int lit : clause) {
        int v = values[std::abs(lit) - 1];
        if (v < 0) {
          ++unassigned;
          last = lit;
        } else if ((v == 1) == (lit > 0)) {
          sat = true;
          break;
        }
      }
      if (sat) continue;
      if (unassigned == 0) return false;
      if (unassigned == 1) {
        values[std::abs(last) - 1] = last > 0 ? 1 : 0;
        progress = true;
      }
    }
  }
  return true;
}

inline bool solve(const prop::CnfFormula& cnf, std::vector<int> values) {
  if (!propagate(cnf, values)) return false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= 0) continue;
    for (int choice : {0, 1}) {
      auto copy = values;
      copy[i] = choice;
      if (solve(cnf, copy)) return true;
    }
    return false;
  }
  return true;
}

/// Whether the CNF admits an extension of the given original-variable values.
inline bool accepts(const prop::CnfFormula& cnf, const std::vector<std::uint8_t>& original) {
  std::vector<int> values(static_cast<std::size_t>(cnf.num_vars), -1);
  for (std::size_t i = 0; i < original.size(); ++i) values[i] = original[i] ? 1 : 0;
  return solve(cnf, values);
}

}  // namespace kdiff::testing
