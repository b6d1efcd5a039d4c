#include "kdiff/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <map>
#include <ostream>
#include <unordered_map>

namespace kdiff::prop {

std::optional<int> CnfFormula::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

bool same_up_to_clause_order(const CnfFormula& a, const CnfFormula& b) {
  if (a.num_vars != b.num_vars || a.names != b.names || a.clauses.size() != b.clauses.size()) return false;
  auto sorted = [](std::vector<Clause> cs) {
    for (Clause& c : cs) std::sort(c.begin(), c.end());
    std::sort(cs.begin(), cs.end());
    return cs;
  };
  return sorted(a.clauses) == sorted(b.clauses);
}

namespace {

class TseitinBuilder {
 public:
  explicit TseitinBuilder(CnfFormula& cnf) : cnf_(cnf) {}

  int variable(const std::string& name) {
    auto it = by_name_.find(name);
    if (it != by_name_.end()) return it->second;
    cnf_.names.push_back(name);
    int idx = ++cnf_.num_vars;
    by_name_.emplace(name, idx);
    return idx;
  }

  void assert_formula(const Formula& f) {
    switch (f.kind()) {
      case Kind::kTrue:
        return;
      case Kind::kFalse: {
        int x = fresh();
        add({x});
        add({-x});
        return;
      }
      case Kind::kAnd:
        for (const Formula& c : f.children()) assert_formula(c);
        return;
      case Kind::kOr: {
        Clause clause;
        for (const Formula& c : f.children()) clause.push_back(literal(c));
        add(std::move(clause));
        return;
      }
      case Kind::kImplies:
        add({-literal(f.children()[0]), literal(f.children()[1])});
        return;
      default:
        add({literal(f)});
    }
  }

 private:
  int fresh() {
    cnf_.names.push_back("__aux" + std::to_string(aux_++));
    return ++cnf_.num_vars;
  }

  // Full (two-sided) gate definitions, so every assignment of the original
  // variables extends to exactly one assignment of the auxiliaries.
  int literal(const Formula& f) {
    if (f.kind() == Kind::kVar) return variable(f.name());
    if (f.kind() == Kind::kNot) return -literal(f.children()[0]);
    auto memo = memo_.find(f.id());
    if (memo != memo_.end()) return memo->second;
    int out = 0;
    switch (f.kind()) {
      case Kind::kAnd:
      case Kind::kOr: {
        const bool is_and = f.kind() == Kind::kAnd;
        std::vector<int> lits;
        for (const Formula& c : f.children()) lits.push_back(literal(c));
        out = fresh();
        Clause big{is_and ? out : -out};
        for (int l : lits) {
          add(is_and ? Clause{-out, l} : Clause{out, -l});
          big.push_back(is_and ? -l : l);
        }
        add(std::move(big));
        break;
      }
      case Kind::kImplies: {
        int a = literal(f.children()[0]);
        int b = literal(f.children()[1]);
        out = fresh();
        add({-out, -a, b});
        add({out, a});
        add({out, -b});
        break;
      }
      case Kind::kIff: {
        int a = literal(f.children()[0]);
        int b = literal(f.children()[1]);
        out = fresh();
        add({-out, -a, b});
        add({-out, a, -b});
        add({out, a, b});
        add({out, -a, -b});
        break;
      }
      case Kind::kTrue:
      case Kind::kFalse: {
        // Only reachable for unfolded input; pin a fresh variable.
        out = fresh();
        add({f.kind() == Kind::kTrue ? out : -out});
        break;
      }
      default:
        break;
    }
    memo_.emplace(f.id(), out);
    return out;
  }

  // Drops duplicate literals and tautologies.
  void add(Clause clause) {
    std::sort(clause.begin(), clause.end(), [](int a, int b) { return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b; });
    clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
    for (std::size_t i = 1; i < clause.size(); ++i) {
      if (clause[i] == -clause[i - 1]) return;
    }
    cnf_.clauses.push_back(std::move(clause));
  }

  CnfFormula& cnf_;
  std::unordered_map<std::string, int> by_name_;
  std::unordered_map<const void*, int> memo_;
  int aux_ = 0;
};

}  // namespace

CnfFormula tseitin_cnf(const Formula& f, const std::vector<std::string>& original) {
  Formula folded = fold_constants(f);
  CnfFormula cnf;
  TseitinBuilder builder(cnf);
  for (const std::string& name : original) builder.variable(name);
  for (const std::string& name : variables(folded)) builder.variable(name);
  cnf.num_original = cnf.num_vars;
  builder.assert_formula(folded);
  return cnf;
}

void write_dimacs(const CnfFormula& cnf, std::ostream& sink) {
  for (std::size_t i = 0; i < cnf.names.size(); ++i) {
    if (!cnf.names[i].empty()) sink << "c " << (i + 1) << ' ' << cnf.names[i] << '\n';
  }
  sink << "p cnf " << cnf.num_vars << ' ' << cnf.clauses.size() << '\n';
  for (const Clause& clause : cnf.clauses) {
    for (int lit : clause) sink << lit << ' ';
    sink << "0\n";
  }
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (start < i) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<long long> to_int(std::string_view s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

CnfFormula parse_dimacs(std::string_view source) {
  CnfFormula cnf;
  std::map<long long, std::string> names;
  bool have_header = false;
  long long declared_clauses = 0;
  Clause pending;
  int line_no = 0;
  std::size_t start = 0;
  while (start < source.size()) {
    std::size_t end = source.find('\n', start);
    if (end == std::string_view::npos) end = source.size();
    std::string_view line = source.substr(start, end - start);
    start = end + 1;
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "c") {
      if (tokens.size() == 3) {
        if (auto idx = to_int(tokens[1]); idx && *idx > 0) names[*idx] = std::string(tokens[2]);
      }
      continue;
    }
    if (tokens[0] == "p") {
      if (have_header) throw FormatError(line_no, "duplicate problem line");
      if (tokens.size() != 4 || tokens[1] != "cnf") throw FormatError(line_no, "malformed problem line");
      auto vars = to_int(tokens[2]);
      auto clauses = to_int(tokens[3]);
      if (!vars || !clauses || *vars < 0 || *clauses < 0) throw FormatError(line_no, "malformed problem line");
      cnf.num_vars = static_cast<int>(*vars);
      declared_clauses = *clauses;
      have_header = true;
      continue;
    }
    if (!have_header) throw FormatError(line_no, "clause before problem line");
    for (std::string_view tok : tokens) {
      auto lit = to_int(tok);
      if (!lit) throw FormatError(line_no, "invalid literal '" + std::string(tok) + "'");
      if (*lit == 0) {
        cnf.clauses.push_back(std::move(pending));
        pending.clear();
        continue;
      }
      if (std::llabs(*lit) > cnf.num_vars) throw FormatError(line_no, "literal " + std::string(tok) + " out of range");
      pending.push_back(static_cast<int>(*lit));
    }
  }
  if (!have_header) throw FormatError(std::max(line_no, 1), "missing problem line");
  if (!pending.empty()) throw FormatError(line_no, "unterminated clause");
  if (static_cast<long long>(cnf.clauses.size()) != declared_clauses) {
    throw FormatError(line_no, "expected " + std::to_string(declared_clauses) + " clauses, found " +
                                   std::to_string(cnf.clauses.size()));
  }
  cnf.names.assign(static_cast<std::size_t>(cnf.num_vars), std::string());
  for (const auto& [idx, name] : names) {
    if (idx <= cnf.num_vars) cnf.names[static_cast<std::size_t>(idx - 1)] = name;
  }
  cnf.num_original = 0;
  while (cnf.num_original < cnf.num_vars && cnf.names[cnf.num_original].rfind("__aux", 0) != 0) ++cnf.num_original;
  return cnf;
}

bool satisfies(const CnfFormula& cnf, const std::vector<std::uint8_t>& values) {
  for (const Clause& clause : cnf.clauses) {
    bool sat = false;
    for (int lit : clause) {
      bool v = values[static_cast<std::size_t>(std::abs(lit) - 1)] != 0;
      if ((lit > 0) == v) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

}  // namespace kdiff::prop
