#include "kdiff/kconfig.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace kdiff {

// ---------------------------------------------------------------------------
// Expr
// ---------------------------------------------------------------------------

bool is_comparison(ExprKind kind) {
  switch (kind) {
    case ExprKind::kEq:
    case ExprKind::kNeq:
    case ExprKind::kLt:
    case ExprKind::kLeq:
    case ExprKind::kGt:
    case ExprKind::kGeq:
      return true;
    default:
      return false;
  }
}

bool is_ordering(ExprKind kind) { return is_comparison(kind) && kind != ExprKind::kEq && kind != ExprKind::kNeq; }

ExprPtr Expr::sym(std::string name) {
  return ExprPtr(new Expr(ExprKind::kSym, std::move(name), nullptr, nullptr));
}

ExprPtr Expr::literal(std::string text) {
  return ExprPtr(new Expr(ExprKind::kLiteral, std::move(text), nullptr, nullptr));
}

ExprPtr Expr::binary(ExprKind kind, ExprPtr lhs, ExprPtr rhs) {
  return ExprPtr(new Expr(kind, {}, std::move(lhs), std::move(rhs)));
}

ExprPtr Expr::negate(ExprPtr operand) {
  return ExprPtr(new Expr(ExprKind::kNot, {}, std::move(operand), nullptr));
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind() != b->kind() || a->text() != b->text()) return false;
  return expr_equal(a->lhs(), b->lhs()) && expr_equal(a->rhs(), b->rhs());
}

namespace {

bool is_number_text(std::string_view s) {
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    return std::all_of(s.begin() + 2, s.end(), [](unsigned char c) { return std::isxdigit(c); });
  }
  if (!s.empty() && s[0] == '-') s.remove_prefix(1);
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool is_tristate_literal(std::string_view s) { return s == "y" || s == "m" || s == "n"; }

bool is_ident_text(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

std::string quote(std::string_view text) {
  char q = text.find('"') == std::string_view::npos ? '"' : '\'';
  std::string out;
  out += q;
  out += text;
  out += q;
  return out;
}

std::string literal_text(std::string_view text) {
  if (is_tristate_literal(text) || is_number_text(text)) return std::string(text);
  return quote(text);
}

int precedence(ExprKind kind) {
  switch (kind) {
    case ExprKind::kOr:
      return 1;
    case ExprKind::kAnd:
      return 2;
    case ExprKind::kNot:
      return 3;
    case ExprKind::kSym:
    case ExprKind::kLiteral:
      return 5;
    default:
      return 4;
  }
}

std::string_view op_text(ExprKind kind) {
  switch (kind) {
    case ExprKind::kEq:
      return "=";
    case ExprKind::kNeq:
      return "!=";
    case ExprKind::kLt:
      return "<";
    case ExprKind::kLeq:
      return "<=";
    case ExprKind::kGt:
      return ">";
    case ExprKind::kGeq:
      return ">=";
    case ExprKind::kAnd:
      return "&&";
    case ExprKind::kOr:
      return "||";
    default:
      return "?";
  }
}

void render(const Expr& e, std::string& out) {
  auto child = [&](const Expr& c, int min_prec) {
    bool parens = precedence(c.kind()) < min_prec;
    if (parens) out += '(';
    render(c, out);
    if (parens) out += ')';
  };
  switch (e.kind()) {
    case ExprKind::kSym:
      out += e.text();
      return;
    case ExprKind::kLiteral:
      out += literal_text(e.text());
      return;
    case ExprKind::kNot:
      out += '!';
      child(*e.operand(), precedence(ExprKind::kNot));
      return;
    default: {
      int p = precedence(e.kind());
      // Left-associative: the right operand needs strictly higher precedence.
      child(*e.lhs(), p);
      out += ' ';
      out += op_text(e.kind());
      out += ' ';
      child(*e.rhs(), p + 1);
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  render(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

std::string_view to_string(OptionType type) {
  switch (type) {
    case OptionType::kBool:
      return "bool";
    case OptionType::kTristate:
      return "tristate";
    case OptionType::kInt:
      return "int";
    case OptionType::kHex:
      return "hex";
    case OptionType::kString:
      return "string";
  }
  return "?";
}

bool is_boolean_type(OptionType type) { return type == OptionType::kBool || type == OptionType::kTristate; }
bool is_numeric_type(OptionType type) { return type == OptionType::kInt || type == OptionType::kHex; }

KconfigModel::KconfigModel(std::vector<ConfigItem> items, std::vector<ChoiceBlock> choices,
                           std::optional<std::string> modules_option, std::string source_name)
    : items_(std::move(items)),
      choices_(std::move(choices)),
      modules_option_(std::move(modules_option)),
      source_name_(std::move(source_name)) {
  for (std::size_t i = 0; i < items_.size(); ++i) index_.emplace(items_[i].name, i);
}

std::optional<std::size_t> KconfigModel::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const ConfigItem* KconfigModel::find(std::string_view name) const {
  auto idx = index_of(name);
  return idx ? &items_[*idx] : nullptr;
}

namespace {

bool prompts_equal(const std::vector<Prompt>& a, const std::vector<Prompt>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const Prompt& x, const Prompt& y) {
    return x.text == y.text && expr_equal(x.condition, y.condition);
  });
}

bool items_equal(const ConfigItem& a, const ConfigItem& b) {
  if (a.name != b.name || a.type != b.type || a.choice != b.choice) return false;
  if (!prompts_equal(a.prompts, b.prompts) || !expr_equal(a.depends, b.depends)) return false;
  if (!std::equal(a.defaults.begin(), a.defaults.end(), b.defaults.begin(), b.defaults.end(),
                  [](const Default& x, const Default& y) {
                    return expr_equal(x.value, y.value) && expr_equal(x.condition, y.condition);
                  }))
    return false;
  if (!std::equal(a.selects.begin(), a.selects.end(), b.selects.begin(), b.selects.end(),
                  [](const Select& x, const Select& y) {
                    return x.target == y.target && expr_equal(x.condition, y.condition);
                  }))
    return false;
  return std::equal(a.ranges.begin(), a.ranges.end(), b.ranges.begin(), b.ranges.end(),
                    [](const Range& x, const Range& y) {
                      return x.low == y.low && x.high == y.high && expr_equal(x.condition, y.condition);
                    });
}

}  // namespace

bool structurally_equal(const KconfigModel& a, const KconfigModel& b) {
  if (a.modules_option() != b.modules_option()) return false;
  if (!std::equal(a.items().begin(), a.items().end(), b.items().begin(), b.items().end(), items_equal))
    return false;
  return std::equal(a.choices().begin(), a.choices().end(), b.choices().begin(), b.choices().end(),
                    [](const ChoiceBlock& x, const ChoiceBlock& y) {
                      return x.id == y.id && x.type == y.type && prompts_equal(x.prompts, y.prompts) &&
                             expr_equal(x.depends, y.depends) && x.members == y.members;
                    });
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

ParseError::ParseError(const std::string& source, int line, int column, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

DuplicateOption::DuplicateOption(const std::string& source, int line, const std::string& name)
    : ParseError(source, line, 1, "duplicate option '" + name + "'") {}

namespace {

enum class TokKind { kWord, kString, kOp };

struct Token {
  TokKind kind;
  std::string text;
  int column;
};

struct Line {
  int number;
  int indent;
  std::string raw;
  std::vector<Token> tokens;
};

int indent_width(std::string_view raw) {
  int width = 0;
  for (char c : raw) {
    if (c == ' ')
      ++width;
    else if (c == '\t')
      width = (width / 8 + 1) * 8;
    else
      break;
  }
  return width;
}

std::vector<Token> tokenize(const std::string& source, int line_no, std::string_view raw) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto error = [&](const std::string& msg) { return ParseError(source, line_no, static_cast<int>(i) + 1, msg); };
  while (i < raw.size()) {
    char c = raw[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    int col = static_cast<int>(i) + 1;
    if (c == '"' || c == '\'') {
      std::size_t end = raw.find(c, i + 1);
      if (end == std::string_view::npos) throw error("unterminated string");
      tokens.push_back({TokKind::kString, std::string(raw.substr(i + 1, end - i - 1)), col});
      i = end + 1;
      continue;
    }
    auto word_char = [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; };
    if (word_char(c) || (c == '-' && i + 1 < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i + 1])))) {
      std::size_t start = i++;
      while (i < raw.size() && word_char(raw[i])) ++i;
      tokens.push_back({TokKind::kWord, std::string(raw.substr(start, i - start)), col});
      continue;
    }
    static const char* const kOps[] = {"&&", "||", "!=", "<=", ">=", "=", "<", ">", "!", "(", ")"};
    bool matched = false;
    for (const char* op : kOps) {
      std::string_view sv(op);
      if (raw.substr(i, sv.size()) == sv) {
        tokens.push_back({TokKind::kOp, std::string(sv), col});
        i += sv.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw error(std::string("unexpected character '") + c + "'");
  }
  return tokens;
}

// Recursive-descent expression parser over one line's tokens.
class ExprParser {
 public:
  ExprParser(const std::string& source, int line, const std::vector<Token>& tokens, std::size_t pos)
      : source_(source), line_(line), tokens_(tokens), pos_(pos) {}

  ExprPtr parse() { return parse_or(); }
  std::size_t pos() const { return pos_; }

  ParseError error(const std::string& message) const {
    int col = pos_ < tokens_.size() ? tokens_[pos_].column : (tokens_.empty() ? 1 : tokens_.back().column + 1);
    return ParseError(source_, line_, col, message);
  }

 private:
  bool peek_op(std::string_view op) const {
    return pos_ < tokens_.size() && tokens_[pos_].kind == TokKind::kOp && tokens_[pos_].text == op;
  }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (peek_op("||")) {
      ++pos_;
      lhs = Expr::disj(lhs, parse_and());
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_not();
    while (peek_op("&&")) {
      ++pos_;
      lhs = Expr::conj(lhs, parse_not());
    }
    return lhs;
  }

  ExprPtr parse_not() {
    if (peek_op("!")) {
      ++pos_;
      return Expr::negate(parse_not());
    }
    return parse_comparison();
  }

  ExprPtr parse_comparison() {
    ExprPtr lhs = parse_primary();
    static const std::pair<const char*, ExprKind> kCmp[] = {
        {"=", ExprKind::kEq},   {"!=", ExprKind::kNeq}, {"<", ExprKind::kLt},
        {"<=", ExprKind::kLeq}, {">", ExprKind::kGt},   {">=", ExprKind::kGeq}};
    for (const auto& [op, kind] : kCmp) {
      if (peek_op(op)) {
        if (!lhs->is_leaf()) throw error("comparison operand must be a symbol or literal");
        ++pos_;
        ExprPtr rhs = parse_primary();
        if (!rhs->is_leaf()) throw error("comparison operand must be a symbol or literal");
        return Expr::binary(kind, lhs, rhs);
      }
    }
    return lhs;
  }

  ExprPtr parse_primary() {
    if (pos_ >= tokens_.size()) throw error("expected expression");
    const Token& tok = tokens_[pos_];
    if (tok.kind == TokKind::kOp) {
      if (tok.text != "(") throw error("unexpected '" + tok.text + "'");
      ++pos_;
      ExprPtr inner = parse_or();
      if (!peek_op(")")) throw error("expected ')'");
      ++pos_;
      return inner;
    }
    ++pos_;
    return value_expr(tok);
  }

 public:
  static ExprPtr value_expr(const Token& tok) {
    if (tok.kind == TokKind::kString) return Expr::literal(tok.text);
    if (is_tristate_literal(tok.text) || is_number_text(tok.text)) return Expr::literal(tok.text);
    return Expr::sym(tok.text);
  }

 private:
  const std::string& source_;
  int line_;
  const std::vector<Token>& tokens_;
  std::size_t pos_;
};

class ModelParser {
 public:
  ModelParser(std::string_view text, std::string source) : source_(std::move(source)) { split_lines(text); }

  KconfigModel run() {
    std::size_t i = 0;
    while (i < lines_.size()) {
      lines_[i].tokens = tokenize(source_, lines_[i].number, lines_[i].raw);
      const Line& line = lines_[i];
      if (line.tokens.empty()) {
        ++i;
        continue;
      }
      const Token& head = line.tokens.front();
      if (head.kind == TokKind::kWord && head.text == "config") {
        start_config(line);
      } else if (head.kind == TokKind::kWord && head.text == "choice") {
        start_choice(line);
      } else if (head.kind == TokKind::kWord && head.text == "endchoice") {
        end_choice(line);
      } else if (head.kind == TokKind::kWord && head.text == "help") {
        if (line.tokens.size() != 1) throw error(line, line.tokens[1], "unexpected tokens after 'help'");
        if (!current_item_ && !current_choice_) throw error(line, head, "help outside of an entry");
        i = skip_help(i);
        continue;
      } else if (current_item_) {
        item_attribute(line);
      } else if (current_choice_) {
        choice_attribute(line);
      } else {
        throw error(line, head, "unexpected '" + head.text + "' outside of an entry");
      }
      ++i;
    }
    finish_item();
    if (open_choice_) {
      throw ParseError(source_, choices_[*open_choice_].line, 1, "choice without endchoice");
    }
    return KconfigModel(std::move(items_), std::move(choices_), std::move(modules_), source_);
  }

 private:
  ParseError error(const Line& line, const Token& tok, const std::string& msg) const {
    return ParseError(source_, line.number, tok.column, msg);
  }
  ParseError error_at_end(const Line& line, const std::string& msg) const {
    int col = line.tokens.empty() ? 1 : line.tokens.back().column + static_cast<int>(line.tokens.back().text.size());
    return ParseError(source_, line.number, col, msg);
  }

  void split_lines(std::string_view text) {
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(start, end - start);
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      ++number;
      lines_.push_back({number, indent_width(raw), std::string(raw), {}});
      start = end + 1;
      if (end == text.size()) break;
    }
  }

  // Help text runs while lines are blank or indented at least as deep as its
  // first line, and that first line must be indented deeper than `help`.
  std::size_t skip_help(std::size_t help_index) {
    int help_indent = lines_[help_index].indent;
    std::size_t i = help_index + 1;
    int text_indent = -1;
    while (i < lines_.size()) {
      const Line& l = lines_[i];
      bool blank = l.raw.find_first_not_of(" \t") == std::string::npos;
      if (blank) {
        ++i;
        continue;
      }
      if (text_indent < 0) {
        if (l.indent <= help_indent) break;
        text_indent = l.indent;
      }
      if (l.indent < text_indent) break;
      ++i;
    }
    return i;
  }

  void start_config(const Line& line) {
    finish_item();
    if (line.tokens.size() != 2 || line.tokens[1].kind != TokKind::kWord)
      throw error_at_end(line, "expected 'config NAME'");
    const Token& name = line.tokens[1];
    if (is_tristate_literal(name.text) || is_number_text(name.text))
      throw error(line, name, "'" + name.text + "' is not a valid option name");
    if (!names_.insert(name.text).second) throw DuplicateOption(source_, line.number, name.text);
    ConfigItem item;
    item.name = name.text;
    item.line = line.number;
    if (open_choice_) {
      item.choice = *open_choice_;
      choices_[*open_choice_].members.push_back(item.name);
    }
    current_item_ = std::move(item);
    current_choice_ = false;
    has_type_ = false;
  }

  void start_choice(const Line& line) {
    finish_item();
    if (open_choice_) throw error(line, line.tokens[0], "nested choice blocks are not supported");
    if (line.tokens.size() != 1) throw error(line, line.tokens[1], "'choice' takes no arguments");
    ChoiceBlock choice;
    choice.id = "choice" + std::to_string(choices_.size());
    choice.line = line.number;
    open_choice_ = choices_.size();
    choices_.push_back(std::move(choice));
    current_choice_ = true;
    choice_has_type_ = false;
  }

  void end_choice(const Line& line) {
    finish_item();
    if (!open_choice_) throw error(line, line.tokens[0], "endchoice without choice");
    if (line.tokens.size() != 1) throw error(line, line.tokens[1], "'endchoice' takes no arguments");
    ChoiceBlock& choice = choices_[*open_choice_];
    if (choice.members.empty()) throw error(line, line.tokens[0], "empty choice");
    // Without its own type a choice takes the type of its first member.
    if (!choice_has_type_) {
      for (const std::string& name : choice.members) {
        auto it = std::find_if(items_.begin(), items_.end(), [&](const ConfigItem& i) { return i.name == name; });
        if (it != items_.end() && is_boolean_type(it->type)) {
          choice.type = it->type;
          break;
        }
      }
    }
    open_choice_.reset();
    current_choice_ = false;
  }

  void finish_item() {
    if (!current_item_) return;
    if (!has_type_) {
      throw ParseError(source_, current_item_->line, 1, "option '" + current_item_->name + "' has no type");
    }
    items_.push_back(std::move(*current_item_));
    current_item_.reset();
  }

  // Parses `[if EXPR]` at `pos` through the end of the line.
  ExprPtr optional_condition(const Line& line, std::size_t pos) {
    const auto& toks = line.tokens;
    if (pos == toks.size()) return nullptr;
    if (toks[pos].kind != TokKind::kWord || toks[pos].text != "if")
      throw error(line, toks[pos], "expected 'if' or end of line");
    return expr_to_end(line, pos + 1);
  }

  ExprPtr expr_to_end(const Line& line, std::size_t pos) {
    ExprParser p(source_, line.number, line.tokens, pos);
    ExprPtr e = p.parse();
    if (p.pos() != line.tokens.size()) throw error(line, line.tokens[p.pos()], "unexpected token in expression");
    return e;
  }

  static std::optional<OptionType> type_keyword(std::string_view w) {
    if (w == "bool" || w == "boolean") return OptionType::kBool;
    if (w == "tristate") return OptionType::kTristate;
    if (w == "int") return OptionType::kInt;
    if (w == "hex") return OptionType::kHex;
    if (w == "string") return OptionType::kString;
    return std::nullopt;
  }

  // `<type> ["text" [if EXPR]]` / `prompt "text" [if EXPR]`
  std::optional<Prompt> prompt_tail(const Line& line, std::size_t pos, bool required) {
    const auto& toks = line.tokens;
    if (pos == toks.size()) {
      if (required) throw error_at_end(line, "expected prompt string");
      return std::nullopt;
    }
    if (toks[pos].kind != TokKind::kString) throw error(line, toks[pos], "expected prompt string");
    return Prompt{toks[pos].text, optional_condition(line, pos + 1)};
  }

  void item_attribute(const Line& line) {
    ConfigItem& item = *current_item_;
    const auto& toks = line.tokens;
    const Token& head = toks[0];
    if (head.kind != TokKind::kWord) throw error(line, head, "expected attribute");
    if (auto type = type_keyword(head.text)) {
      if (has_type_) throw error(line, head, "duplicate type declaration");
      has_type_ = true;
      item.type = *type;
      if (auto prompt = prompt_tail(line, 1, false)) item.prompts.push_back(std::move(*prompt));
    } else if (head.text == "prompt") {
      item.prompts.push_back(*prompt_tail(line, 1, true));
    } else if (head.text == "default") {
      if (toks.size() < 2) throw error_at_end(line, "expected default value");
      // The value runs up to a top-level `if`.
      std::size_t end = 1;
      while (end < toks.size() && !(toks[end].kind == TokKind::kWord && toks[end].text == "if")) ++end;
      std::vector<Token> value_tokens(toks.begin() + 1, toks.begin() + static_cast<std::ptrdiff_t>(end));
      ExprParser p(source_, line.number, value_tokens, 0);
      ExprPtr value = p.parse();
      if (p.pos() != value_tokens.size()) throw error(line, value_tokens[p.pos()], "unexpected token in default");
      item.defaults.push_back({value, optional_condition(line, end)});
    } else if (head.text == "depends") {
      depends_clause(line, item.depends);
    } else if (head.text == "select") {
      if (toks.size() < 2 || toks[1].kind != TokKind::kWord || !is_ident_text(toks[1].text))
        throw error_at_end(line, "expected 'select NAME'");
      item.selects.push_back({toks[1].text, optional_condition(line, 2)});
    } else if (head.text == "range") {
      if (toks.size() < 3) throw error_at_end(line, "expected 'range LOW HIGH'");
      for (std::size_t k : {std::size_t{1}, std::size_t{2}}) {
        if (toks[k].kind != TokKind::kWord || !is_number_text(toks[k].text))
          throw error(line, toks[k], "range bounds must be numeric literals");
      }
      item.ranges.push_back({toks[1].text, toks[2].text, optional_condition(line, 3)});
    } else if (head.text == "option") {
      if (toks.size() != 2 || toks[1].text != "modules") throw error(line, head, "only 'option modules' is supported");
      if (modules_ && *modules_ != item.name) throw error(line, head, "multiple MODULES options");
      modules_ = item.name;
    } else {
      throw error(line, head, "unsupported attribute '" + head.text + "'");
    }
  }

  void depends_clause(const Line& line, ExprPtr& target) {
    const auto& toks = line.tokens;
    if (toks.size() < 3 || toks[1].text != "on") throw error_at_end(line, "expected 'depends on EXPR'");
    ExprPtr e = expr_to_end(line, 2);
    target = target ? Expr::conj(target, e) : e;
  }

  void choice_attribute(const Line& line) {
    ChoiceBlock& choice = choices_[*open_choice_];
    const Token& head = line.tokens[0];
    if (head.kind != TokKind::kWord) throw error(line, head, "expected attribute");
    if (auto type = type_keyword(head.text)) {
      if (*type != OptionType::kBool && *type != OptionType::kTristate)
        throw error(line, head, "choice type must be bool or tristate");
      if (choice_has_type_) throw error(line, head, "duplicate type declaration");
      choice_has_type_ = true;
      choice.type = *type;
      if (auto prompt = prompt_tail(line, 1, false)) choice.prompts.push_back(std::move(*prompt));
    } else if (head.text == "prompt") {
      choice.prompts.push_back(*prompt_tail(line, 1, true));
    } else if (head.text == "depends") {
      depends_clause(line, choice.depends);
    } else {
      throw error(line, head, "unsupported choice attribute '" + head.text + "'");
    }
  }

  std::string source_;
  std::vector<Line> lines_;
  std::vector<ConfigItem> items_;
  std::vector<ChoiceBlock> choices_;
  std::optional<std::string> modules_;
  std::set<std::string> names_;
  std::optional<ConfigItem> current_item_;
  bool has_type_ = false;
  bool current_choice_ = false;
  bool choice_has_type_ = false;
  std::optional<std::size_t> open_choice_;
};

}  // namespace

KconfigModel parse_model(std::string_view source_text, std::string source_name) {
  // Lines are tokenized on demand so help text never reaches the lexer.
  ModelParser parser(source_text, std::move(source_name));
  return parser.run();
}

ExprPtr parse_expr(std::string_view text) {
  std::string source = "<expr>";
  auto tokens = tokenize(source, 1, text);
  ExprParser p(source, 1, tokens, 0);
  ExprPtr e = p.parse();
  if (p.pos() != tokens.size()) throw p.error("unexpected token in expression");
  return e;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

void print_prompts(std::ostringstream& out, const std::vector<Prompt>& prompts) {
  for (const Prompt& p : prompts) {
    out << "\tprompt " << quote(p.text);
    if (p.condition) out << " if " << to_string(*p.condition);
    out << '\n';
  }
}

}  // namespace

std::string print_model(const KconfigModel& model) {
  std::ostringstream out;
  std::optional<std::size_t> open;
  for (const ConfigItem& item : model.items()) {
    if (open && item.choice != open) {
      out << "endchoice\n\n";
      open.reset();
    }
    if (item.choice && item.choice != open) {
      const ChoiceBlock& c = model.choices()[*item.choice];
      out << "choice\n\t" << to_string(c.type) << '\n';
      print_prompts(out, c.prompts);
      if (c.depends) out << "\tdepends on " << to_string(*c.depends) << '\n';
      out << '\n';
      open = item.choice;
    }
    out << "config " << item.name << "\n\t" << to_string(item.type) << '\n';
    print_prompts(out, item.prompts);
    for (const Default& d : item.defaults) {
      out << "\tdefault " << to_string(*d.value);
      if (d.condition) out << " if " << to_string(*d.condition);
      out << '\n';
    }
    if (item.depends) out << "\tdepends on " << to_string(*item.depends) << '\n';
    for (const Select& s : item.selects) {
      out << "\tselect " << s.target;
      if (s.condition) out << " if " << to_string(*s.condition);
      out << '\n';
    }
    for (const Range& r : item.ranges) {
      out << "\trange " << r.low << ' ' << r.high;
      if (r.condition) out << " if " << to_string(*r.condition);
      out << '\n';
    }
    if (model.modules_option() == item.name) out << "\toption modules\n";
    out << '\n';
  }
  if (open) out << "endchoice\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

class Validator {
 public:
  explicit Validator(const KconfigModel& model) : model_(model) {}

  std::vector<Diagnostic> run() {
    check_generated_names();
    if (const auto& mod = model_.modules_option()) {
      const ConfigItem* item = model_.find(*mod);
      if (item && item->type != OptionType::kBool)
        error(item->line, "MODULES option '" + *mod + "' must be bool");
    }
    for (const ChoiceBlock& c : model_.choices()) check_choice(c);
    for (const ConfigItem& item : model_.items()) check_item(item);
    return std::move(out_);
  }

 private:
  void warn(int line, std::string msg) { out_.push_back({Severity::kWarning, std::move(msg), line}); }
  void error(int line, std::string msg) { out_.push_back({Severity::kError, std::move(msg), line}); }

  void check_generated_names() {
    for (const ConfigItem& item : model_.items()) {
      if (item.type == OptionType::kTristate && model_.find(item.name + "_MODULE"))
        error(item.line, "option '" + item.name + "_MODULE' collides with the module variable of '" + item.name + "'");
    }
  }

  void check_choice(const ChoiceBlock& c) {
    for (const Prompt& p : c.prompts) check_boolean_expr(c.line, p.condition);
    check_boolean_expr(c.line, c.depends);
    for (const std::string& m : c.members) {
      const ConfigItem* item = model_.find(m);
      if (item && !is_boolean_type(item->type))
        error(item->line, "choice member '" + m + "' must be bool or tristate");
    }
  }

  void check_item(const ConfigItem& item) {
    for (const Prompt& p : item.prompts) check_boolean_expr(item.line, p.condition);
    check_boolean_expr(item.line, item.depends);
    for (const Default& d : item.defaults) {
      check_boolean_expr(item.line, d.condition);
      if (is_boolean_type(item.type)) {
        check_boolean_expr(item.line, d.value);
      } else if (d.value->kind() != ExprKind::kLiteral) {
        error(item.line, std::string(to_string(item.type)) + " option '" + item.name +
                             "' needs a literal default, got '" + to_string(*d.value) + "'");
      } else if (is_numeric_type(item.type) && !is_number_text(d.value->text())) {
        error(item.line, "default '" + d.value->text() + "' of '" + item.name + "' is not a number");
      }
    }
    if (!item.ranges.empty() && !is_numeric_type(item.type))
      error(item.line, "range on " + std::string(to_string(item.type)) + " option '" + item.name + "'");
    for (const Range& r : item.ranges) check_boolean_expr(item.line, r.condition);
    if (!item.selects.empty() && !is_boolean_type(item.type))
      error(item.line, "select on " + std::string(to_string(item.type)) + " option '" + item.name + "'");
    for (const Select& s : item.selects) {
      check_boolean_expr(item.line, s.condition);
      const ConfigItem* target = model_.find(s.target);
      if (!target) {
        error(item.line, "'" + item.name + "' selects undeclared symbol '" + s.target + "'");
      } else if (!is_boolean_type(target->type)) {
        error(item.line, "'" + item.name + "' selects non-boolean option '" + s.target + "'");
      } else if (target->choice) {
        error(item.line, "'" + item.name + "' selects choice member '" + s.target + "'");
      }
    }
  }

  // Expressions used as tristate conditions.
  void check_boolean_expr(int line, const ExprPtr& e) {
    if (!e) return;
    switch (e->kind()) {
      case ExprKind::kSym: {
        const ConfigItem* item = model_.find(e->text());
        if (!item) {
          undeclared(line, e->text());
        } else if (!is_boolean_type(item->type)) {
          warn(line, std::string(to_string(item->type)) + " option '" + e->text() + "' used as a condition");
        }
        return;
      }
      case ExprKind::kLiteral:
        if (!is_tristate_literal(e->text()))
          warn(line, "literal '" + e->text() + "' used as a condition evaluates to n");
        return;
      case ExprKind::kNot:
        check_boolean_expr(line, e->operand());
        return;
      case ExprKind::kAnd:
      case ExprKind::kOr:
        check_boolean_expr(line, e->lhs());
        check_boolean_expr(line, e->rhs());
        return;
      default:
        check_comparison(line, *e);
    }
  }

  void check_comparison(int line, const Expr& e) {
    for (const ExprPtr& side : {e.lhs(), e.rhs()}) {
      if (side->kind() != ExprKind::kSym) continue;
      const ConfigItem* item = model_.find(side->text());
      if (!item) {
        undeclared(line, side->text());
        if (is_ordering(e.kind()) && !is_number_text(side->text()))
          error(line, "ordering comparison against undeclared symbol '" + side->text() + "'");
        continue;
      }
      if (is_ordering(e.kind()) && !is_numeric_type(item->type))
        error(line, "ordering comparison on " + std::string(to_string(item->type)) + " option '" + item->name + "'");
    }
    if (is_ordering(e.kind())) {
      for (const ExprPtr& side : {e.lhs(), e.rhs()}) {
        if (side->kind() == ExprKind::kLiteral && !is_number_text(side->text()))
          error(line, "ordering comparison against non-numeric literal '" + side->text() + "'");
      }
    }
  }

  void undeclared(int line, const std::string& name) {
    if (warned_.insert(name).second) warn(line, "symbol '" + name + "' is referenced but never declared");
  }

  const KconfigModel& model_;
  std::vector<Diagnostic> out_;
  std::set<std::string> warned_;
};

}  // namespace

std::vector<Diagnostic> validate_model(const KconfigModel& model) { return Validator(model).run(); }

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

std::string format_diagnostic(const KconfigModel& model, const Diagnostic& d) {
  std::string out = model.source_name();
  if (d.line > 0) out += ":" + std::to_string(d.line);
  out += d.severity == Severity::kError ? ": error: " : ": warning: ";
  out += d.message;
  return out;
}

std::vector<std::pair<std::string, OptionType>> collect_options(const KconfigModel& model) {
  std::vector<std::pair<std::string, OptionType>> out;
  out.reserve(model.size());
  for (const ConfigItem& item : model.items()) out.emplace_back(item.name, item.type);
  return out;
}

}  // namespace kdiff
