#include "kdiff/oracle.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

extern char** environ;

namespace kdiff {

namespace {

bool same_value(OptionType type, const std::string& a, const std::string& b) {
  if (is_numeric_type(type)) {
    auto x = parse_integer(a);
    auto y = parse_integer(b);
    if (x && y) return *x == *y;
  }
  return a == b;
}

class RepairPass {
 public:
  RepairPass(const KconfigModel& model, Configuration& cfg) : model_(model), cfg_(cfg) {}

  bool run() {
    changed_ = false;
    std::vector<bool> choice_done(model_.choices().size(), false);
    for (std::size_t i = 0; i < model_.size(); ++i) {
      const ConfigItem& item = model_.items()[i];
      if (item.choice) {
        if (!choice_done[*item.choice]) {
          choice_done[*item.choice] = true;
          resolve_choice(model_.choices()[*item.choice]);
        }
      } else if (is_boolean_type(item.type)) {
        resolve_tristate(i);
      } else {
        resolve_value(i);
      }
    }
    return changed_;
  }

  bool select_override() const { return override_; }

 private:
  Tri cond(const ExprPtr& e) const { return eval_condition(e, cfg_, model_); }

  bool modules_off() const {
    const auto& mod = model_.modules_option();
    if (!mod) return false;
    auto idx = model_.index_of(*mod);
    return !idx || cfg_.tri(*idx) != Tri::Y;
  }

  void assign(std::size_t i, ConfigValue v) {
    const ConfigItem& item = model_.items()[i];
    if (std::holds_alternative<Tri>(v) && std::holds_alternative<Tri>(cfg_[i])) {
      if (std::get<Tri>(v) == std::get<Tri>(cfg_[i])) return;
    } else if (same_value(item.type, value_text(v), value_text(cfg_[i]))) {
      return;
    }
    cfg_[i] = std::move(v);
    changed_ = true;
  }

  Tri prompt_bound(const std::vector<Prompt>& prompts, Tri dep) const {
    Tri best = Tri::N;
    for (const Prompt& p : prompts) best = tri_or(best, tri_and(cond(p.condition), dep));
    return best;
  }

  Tri selected(const std::string& name) const {
    Tri r = Tri::N;
    for (std::size_t j = 0; j < model_.size(); ++j) {
      for (const Select& s : model_.items()[j].selects) {
        if (s.target == name) r = tri_or(r, tri_and(cfg_.tri(j), cond(s.condition)));
      }
    }
    return r;
  }

  // Value of the first default whose condition is not n, limited by `dep`.
  Tri default_value(const ConfigItem& item, Tri dep) const {
    for (const Default& d : item.defaults) {
      Tri c = cond(d.condition);
      if (c == Tri::N) continue;
      return tri_and(tri_and(eval_expr(*d.value, cfg_, model_), c), dep);
    }
    return Tri::N;
  }

  void resolve_tristate(std::size_t i) {
    const ConfigItem& item = model_.items()[i];
    const Tri u = cfg_.tri(i);
    const bool bool_like = item.type == OptionType::kBool || modules_off();
    auto round = [&](Tri t) { return bool_like ? tri_ceil(t) : t; };
    const Tri dep = cond(item.depends);
    const Tri vis = item.prompts.empty() ? Tri::N : prompt_bound(item.prompts, dep);
    const Tri rev = selected(item.name);
    if (rank(round(rev)) > rank(round(dep))) override_ = true;
    Tri t = vis != Tri::N ? tri_or(tri_and(u, vis), rev) : tri_or(default_value(item, dep), rev);
    assign(i, round(t));
  }

  void resolve_choice(const ChoiceBlock& choice) {
    const Tri cdep = cond(choice.depends);
    const Tri cvis = choice.prompts.empty() ? cdep : prompt_bound(choice.prompts, cdep);
    const bool choice_bool_like = choice.type == OptionType::kBool || modules_off();

    struct Member {
      std::size_t index;
      const ConfigItem* item;
      Tri dep;
      bool in_group;
      Tri group_vis;
      bool bool_like;
    };
    std::vector<Member> members;
    for (const std::string& name : choice.members) {
      std::size_t idx = *model_.index_of(name);
      const ConfigItem& item = model_.items()[idx];
      Tri dep = tri_and(cond(item.depends), cdep);
      Tri own = item.prompts.empty() ? Tri::N : prompt_bound(item.prompts, dep);
      bool bool_like = item.type == OptionType::kBool || choice_bool_like;
      members.push_back({idx, &item, dep, own != Tri::N && cvis != Tri::N, tri_and(own, cvis), bool_like});
    }

    Tri mode = Tri::N;
    if (cvis != Tri::N) {
      if (choice_bool_like) {
        mode = Tri::Y;
      } else {
        bool any_y = false;
        bool any_m = false;
        for (const Member& m : members) {
          if (!m.in_group) continue;
          any_y = any_y || cfg_.tri(m.index) == Tri::Y;
          any_m = any_m || cfg_.tri(m.index) == Tri::M;
        }
        mode = any_y ? cvis : any_m ? Tri::M : cvis;
      }
    }

    const Member* chosen = nullptr;
    if (mode == Tri::Y) {
      for (const Member& m : members) {
        if (m.in_group && cfg_.tri(m.index) == Tri::Y) {
          chosen = &m;
          break;
        }
      }
      if (!chosen) {
        for (const Member& m : members) {
          if (m.in_group) {
            chosen = &m;
            break;
          }
        }
      }
    }

    // Everything is computed from the values on entry, then written back.
    std::vector<Tri> next;
    for (const Member& m : members) {
      auto round = [&](Tri t) { return m.bool_like ? tri_ceil(t) : t; };
      Tri u = cfg_.tri(m.index);
      if (!m.in_group) {
        next.push_back(round(default_value(*m.item, m.dep)));
      } else if (mode == Tri::Y) {
        next.push_back(round(tri_and(&m == chosen ? Tri::Y : Tri::N, m.group_vis)));
      } else {
        next.push_back(m.item->type == OptionType::kBool ? Tri::N : tri_and(u, m.group_vis));
      }
    }
    for (std::size_t k = 0; k < members.size(); ++k) assign(members[k].index, next[k]);
  }

  void resolve_value(std::size_t i) {
    const ConfigItem& item = model_.items()[i];
    const Tri dep = cond(item.depends);
    const Tri vis = item.prompts.empty() ? Tri::N : prompt_bound(item.prompts, dep);

    const Range* range = nullptr;
    for (const Range& r : item.ranges) {
      if (cond(r.condition) != Tri::N) {
        range = &r;
        break;
      }
    }
    auto clamp = [&](const std::string& v) -> std::string {
      if (!range) return v;
      auto x = parse_integer(v);
      if (!x) return range->low;
      if (*x < *parse_integer(range->low)) return range->low;
      if (*x > *parse_integer(range->high)) return range->high;
      return v;
    };
    const Default* def = nullptr;
    for (const Default& d : item.defaults) {
      if (cond(d.condition) != Tri::N) {
        def = &d;
        break;
      }
    }

    const std::string u = value_text(cfg_[i]);
    if (vis != Tri::N) {
      if (range) {
        auto x = parse_integer(u);
        bool inside = x && *x >= *parse_integer(range->low) && *x <= *parse_integer(range->high);
        if (!inside) assign(i, def ? clamp(def->value->text()) : range->low);
      }
    } else if (dep != Tri::N && def) {
      assign(i, clamp(def->value->text()));
    }
  }

  const KconfigModel& model_;
  Configuration& cfg_;
  bool changed_ = false;
  bool override_ = false;
};

}  // namespace

RepairOutcome repair(const KconfigModel& model, const Configuration& cfg) {
  RepairOutcome out;
  out.repaired = cfg;
  for (int pass = 0; pass < kMaxRepairPasses; ++pass) {
    RepairPass step(model, out.repaired);
    bool changed = step.run();
    out.select_override_fired = out.select_override_fired || step.select_override();
    if (!changed) {
      out.changed = !same_configuration(model, out.repaired, cfg);
      return out;
    }
  }
  throw NonConvergence(kMaxRepairPasses);
}

bool is_valid(const KconfigModel& model, const Configuration& cfg) {
  Configuration copy = cfg;
  return !RepairPass(model, copy).run();
}

// ---------------------------------------------------------------------------
// .config files
// ---------------------------------------------------------------------------

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string unquote(std::string_view s) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') return std::string(s);
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) ++i;
    out += s[i];
  }
  return out;
}

}  // namespace

void write_dotconfig(const KconfigModel& model, const Configuration& cfg, std::ostream& sink) {
  for (std::size_t i = 0; i < model.size(); ++i) {
    const ConfigItem& item = model.items()[i];
    if (is_boolean_type(item.type)) {
      Tri t = cfg.tri(i);
      if (t == Tri::N) {
        sink << "# CONFIG_" << item.name << " is not set\n";
      } else {
        sink << "CONFIG_" << item.name << '=' << tri_char(t) << '\n';
      }
    } else if (item.type == OptionType::kString) {
      sink << "CONFIG_" << item.name << '=' << quote(value_text(cfg[i])) << '\n';
    } else if (!value_text(cfg[i]).empty()) {
      sink << "CONFIG_" << item.name << '=' << value_text(cfg[i]) << '\n';
    }
  }
}

Configuration parse_dotconfig(const KconfigModel& model, std::string_view text) {
  Configuration cfg(model);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view = line;
    if (view.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (view[0] == '#') {
      // "# CONFIG_X is not set" leaves X at n; other comments are ignored.
      continue;
    }
    if (view.rfind("CONFIG_", 0) != 0) throw DotconfigError(line_no, "expected CONFIG_<NAME>=<value>");
    view.remove_prefix(7);
    auto eq = view.find('=');
    if (eq == std::string_view::npos) throw DotconfigError(line_no, "missing '='");
    auto idx = model.index_of(view.substr(0, eq));
    if (!idx) continue;
    std::string_view value = view.substr(eq + 1);
    const ConfigItem& item = model.items()[*idx];
    if (is_boolean_type(item.type)) {
      auto t = tri_from_text(value);
      if (!t || (item.type == OptionType::kBool && *t == Tri::M)) {
        throw DotconfigError(line_no, "invalid value '" + std::string(value) + "' for " + item.name);
      }
      cfg[*idx] = *t;
    } else if (item.type == OptionType::kString) {
      if (value.size() < 2 || value.front() != '"' || value.back() != '"') {
        throw DotconfigError(line_no, "unquoted string value for " + item.name);
      }
      cfg[*idx] = unquote(value);
    } else {
      if (!parse_integer(value)) throw DotconfigError(line_no, "invalid number '" + std::string(value) + "'");
      cfg[*idx] = std::string(value);
    }
  }
  return cfg;
}

bool same_configuration(const KconfigModel& model, const Configuration& a, const Configuration& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const ConfigItem& item = model.items()[i];
    if (is_boolean_type(item.type)) {
      if (a.tri(i) != b.tri(i)) return false;
    } else if (!same_value(item.type, value_text(a[i]), value_text(b[i]))) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

bool Oracle::select_override(const KconfigModel&, const Configuration&) { return false; }

bool BuiltinOracle::is_valid(const KconfigModel& model, const Configuration& cfg) {
  return kdiff::is_valid(model, cfg);
}

bool BuiltinOracle::select_override(const KconfigModel& model, const Configuration& cfg) {
  Configuration copy = cfg;
  RepairPass pass(model, copy);
  pass.run();
  return pass.select_override();
}

ExternalConfOracle::ExternalConfOracle(std::filesystem::path binary, std::filesystem::path model_file)
    : binary_(std::move(binary)), model_file_(std::move(model_file)) {
  if (!std::filesystem::exists(binary_)) throw ProcessError("conf binary not found: " + binary_.string());
}

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "kconfdiff.XXXXXX").string();
    if (!mkdtemp(pattern.data())) throw ProcessError(std::string("mkdtemp: ") + std::strerror(errno));
    path = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

}  // namespace

bool ExternalConfOracle::is_valid(const KconfigModel& model, const Configuration& cfg) {
  TempDir dir;
  const auto config_path = dir.path / ".config";
  {
    std::ofstream out(config_path);
    write_dotconfig(model, cfg, out);
  }

  std::vector<std::string> env_storage;
  for (char** e = environ; *e; ++e) {
    if (std::strncmp(*e, "KCONFIG_CONFIG=", 15) != 0) env_storage.emplace_back(*e);
  }
  env_storage.push_back("KCONFIG_CONFIG=" + config_path.string());
  std::vector<char*> envp;
  for (std::string& s : env_storage) envp.push_back(s.data());
  envp.push_back(nullptr);

  std::string bin = binary_.string();
  std::string flag = "--olddefconfig";
  std::string file = model_file_.string();
  std::vector<char*> argv{bin.data(), flag.data(), file.data(), nullptr};

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
  pid_t pid = 0;
  int rc = posix_spawn(&pid, bin.c_str(), &actions, nullptr, argv.data(), envp.data());
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw ProcessError("cannot run " + bin + ": " + std::strerror(rc));
  int status = 0;
  if (waitpid(pid, &status, 0) < 0) throw ProcessError("waitpid failed for " + bin);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    throw ProcessError(bin + " exited with status " + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
  }

  std::ifstream in(config_path);
  std::stringstream text;
  text << in.rdbuf();
  return same_configuration(model, parse_dotconfig(model, text.str()), cfg);
}

}  // namespace kdiff
