#include "system_file.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "errors.hpp"
#include "parser.hpp"

namespace poisntt {

namespace {

struct Line {
  int number;          // 1-based
  std::string section;
  std::string key;     // first token of the left side
  std::string subkey;  // remaining left-side tokens ("1 2" for J, "x1" for range)
  std::string value;   // right of '='
};

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg, line, 0);
}

long long parse_int(const Line& ln, const std::string& what) {
  const char* s = ln.value.c_str();
  char* end = nullptr;
  long long v = std::strtoll(s, &end, 10);
  if (end == s || *end != '\0') {
    fail(ln.number, what + " must be an integer, got '" + ln.value + "'");
  }
  return v;
}

double parse_double(int line, const std::string& text,
                    const std::string& what) {
  const char* s = text.c_str();
  char* end = nullptr;
  double v = std::strtod(s, &end);
  if (end == s || *end != '\0') {
    fail(line, what + " must be a number, got '" + text + "'");
  }
  return v;
}

int parse_index(int line, const std::string& text, const std::string& what) {
  const char* s = text.c_str();
  char* end = nullptr;
  long long v = std::strtoll(s, &end, 10);
  if (end == s || *end != '\0') {
    fail(line, what + " must be an integer, got '" + text + "'");
  }
  return static_cast<int>(v);
}

Expr parse_expr_at(const Line& ln, std::span<const std::string> vars) {
  try {
    return parse_expression(ln.value, vars);
  } catch (const ParseError& e) {
    fail(ln.number, std::string(e.what()) +
                        (e.column() > 0
                             ? " (column " + std::to_string(e.column()) +
                                   " of the expression)"
                             : ""));
  }
}

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') {
    return false;
  }
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

bool is_function_name(const std::string& s) {
  return s == "sin" || s == "cos" || s == "exp" || s == "ln" || s == "sqrt" ||
         s == "abs";
}

std::vector<std::string> reserved_symbols(int count) {
  std::vector<std::string> z;
  for (int i = 1; i <= count; ++i) z.push_back("z" + std::to_string(i));
  return z;
}

}  // namespace

SystemFileData parse_system_file(std::string_view text) {
  // pass 1: split into located key/value records
  std::vector<Line> lines;
  {
    std::string section;
    int number = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t nl = text.find('\n', pos);
      std::string_view raw = text.substr(
          pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++number;
      std::string line = trim(raw.substr(0, raw.find('#')));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(number, "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section != "system" && section != "domain" &&
            section != "sample" && section != "ntt") {
          fail(number, "unknown section [" + section + "]");
        }
        continue;
      }
      if (section.empty()) {
        fail(number, "content before the first section header");
      }
      size_t eq = line.find('=');
      if (eq == std::string::npos) {
        fail(number, "expected 'key = value'");
      }
      std::vector<std::string> left = split_ws(trim(line.substr(0, eq)));
      if (left.empty()) fail(number, "missing key before '='");
      Line ln;
      ln.number = number;
      ln.section = section;
      ln.key = left.front();
      for (size_t i = 1; i < left.size(); ++i) {
        if (i > 1) ln.subkey += " ";
        ln.subkey += left[i];
      }
      ln.value = trim(line.substr(eq + 1));
      if (ln.value.empty()) fail(number, "missing value after '='");
      lines.push_back(std::move(ln));
    }
  }

  // pass 2: variables first, everything else afterwards
  std::vector<std::string> vars;
  int vars_line = 0;
  for (const Line& ln : lines) {
    if (ln.section == "system" && ln.key == "vars") {
      if (vars_line) fail(ln.number, "duplicate 'vars'");
      vars = split_ws(ln.value);
      vars_line = ln.number;
      if (vars.empty()) fail(ln.number, "'vars' must list at least one name");
      for (size_t i = 0; i < vars.size(); ++i) {
        if (!valid_identifier(vars[i])) {
          fail(ln.number, "invalid variable name '" + vars[i] + "'");
        }
        if (is_function_name(vars[i])) {
          fail(ln.number,
               "variable name '" + vars[i] + "' collides with a function");
        }
        for (size_t j = 0; j < i; ++j) {
          if (vars[j] == vars[i]) {
            fail(ln.number, "duplicate variable name '" + vars[i] + "'");
          }
        }
      }
    }
  }
  if (!vars_line) {
    throw ParseError("missing 'vars' line in [system]", 0, 0);
  }
  const int n = static_cast<int>(vars.size());

  SystemFileData out{PoissonSystem{vars, StructureMatrix(n), Expr(), {}, 0,
                                   Domain{}},
                     std::nullopt};
  out.system.domain.box.assign(static_cast<size_t>(n), {0.0, 0.0});
  std::vector<bool> range_set(static_cast<size_t>(n), false);
  std::map<std::pair<int, int>, int> j_seen;
  bool rank_seen = false, h_seen = false, eps_seen = false;
  bool points_seen = false, seed_seen = false;

  // the transformation section is assembled piecewise
  std::optional<Line> eta_ln, phi_ln, f_ln, hstar_ln, eta0_ln, c_ln,
      casfac_ln;

  for (const Line& ln : lines) {
    if (ln.section == "system") {
      if (ln.key == "vars") continue;
      if (ln.key == "rank") {
        if (rank_seen) fail(ln.number, "duplicate 'rank'");
        rank_seen = true;
        long long r = parse_int(ln, "rank");
        if (r < 1 || r > n) fail(ln.number, "rank out of range");
        out.system.rank = static_cast<int>(r);
      } else if (ln.key == "J") {
        std::vector<std::string> idx = split_ws(ln.subkey);
        if (idx.size() != 2) {
          fail(ln.number, "structure entries use 'J i j = <expr>'");
        }
        int i = parse_index(ln.number, idx[0], "J row index");
        int j = parse_index(ln.number, idx[1], "J column index");
        if (i < 1 || j < 1 || i > n || j > n) {
          fail(ln.number, "J indices out of range 1.." + std::to_string(n));
        }
        if (i >= j) {
          fail(ln.number,
               "only strictly upper entries may be given (i < j); the lower "
               "triangle follows from skew-symmetry");
        }
        if (j_seen.count({i, j})) {
          fail(ln.number, "duplicate entry J " + std::to_string(i) + " " +
                              std::to_string(j) + " (first at line " +
                              std::to_string(j_seen[{i, j}]) + ")");
        }
        j_seen[{i, j}] = ln.number;
        out.system.J.set_upper(i - 1, j - 1, parse_expr_at(ln, vars));
      } else if (ln.key == "H") {
        if (h_seen) fail(ln.number, "duplicate 'H'");
        h_seen = true;
        out.system.hamiltonian = parse_expr_at(ln, vars);
      } else if (ln.key == "casimir") {
        out.system.casimirs.push_back(parse_expr_at(ln, vars));
      } else {
        fail(ln.number, "unknown [system] key '" + ln.key + "'");
      }
    } else if (ln.section == "domain") {
      if (ln.key == "range") {
        int which = -1;
        for (int i = 0; i < n; ++i) {
          if (vars[static_cast<size_t>(i)] == ln.subkey) which = i;
        }
        if (which < 0) {
          fail(ln.number, "range for undeclared variable '" + ln.subkey + "'");
        }
        if (range_set[static_cast<size_t>(which)]) {
          fail(ln.number, "duplicate range for '" + ln.subkey + "'");
        }
        std::vector<std::string> bounds = split_ws(ln.value);
        if (bounds.size() != 2) {
          fail(ln.number, "range needs two numbers: 'range xk = lo hi'");
        }
        double lo = parse_double(ln.number, bounds[0], "range low bound");
        double hi = parse_double(ln.number, bounds[1], "range high bound");
        if (!(lo <= hi)) fail(ln.number, "range low bound exceeds high bound");
        out.system.domain.box[static_cast<size_t>(which)] = {lo, hi};
        range_set[static_cast<size_t>(which)] = true;
      } else if (ln.key == "exclude") {
        out.system.domain.exclusions.push_back(parse_expr_at(ln, vars));
      } else if (ln.key == "epsilon_exclude") {
        if (eps_seen) fail(ln.number, "duplicate 'epsilon_exclude'");
        eps_seen = true;
        double eps = parse_double(ln.number, ln.value, "epsilon_exclude");
        if (!(eps >= 0.0)) fail(ln.number, "epsilon_exclude must be >= 0");
        out.system.domain.epsilon_exclude = eps;
      } else {
        fail(ln.number, "unknown [domain] key '" + ln.key + "'");
      }
    } else if (ln.section == "sample") {
      if (ln.key == "points") {
        if (points_seen) fail(ln.number, "duplicate 'points'");
        points_seen = true;
        long long p = parse_int(ln, "points");
        if (p < 1 || p > 10000000) fail(ln.number, "points out of range");
        out.points = static_cast<int>(p);
      } else if (ln.key == "seed") {
        if (seed_seen) fail(ln.number, "duplicate 'seed'");
        seed_seen = true;
        long long s = parse_int(ln, "seed");
        if (s < 0) fail(ln.number, "seed must be nonnegative");
        out.seed = static_cast<std::uint64_t>(s);
      } else {
        fail(ln.number, "unknown [sample] key '" + ln.key + "'");
      }
    } else {  // [ntt]
      auto set_once = [&](std::optional<Line>& slot) {
        if (slot) fail(ln.number, "duplicate '" + ln.key + "'");
        slot = ln;
      };
      if (ln.key == "eta") set_once(eta_ln);
      else if (ln.key == "Phi") set_once(phi_ln);
      else if (ln.key == "F") set_once(f_ln);
      else if (ln.key == "Hstar") set_once(hstar_ln);
      else if (ln.key == "eta0") set_once(eta0_ln);
      else if (ln.key == "c") set_once(c_ln);
      else if (ln.key == "casimir_factor") set_once(casfac_ln);
      else fail(ln.number, "unknown [ntt] key '" + ln.key + "'");
    }
  }

  if (!rank_seen) throw ParseError("missing 'rank' in [system]", 0, 0);
  if (!h_seen) throw ParseError("missing 'H' in [system]", 0, 0);
  for (int i = 0; i < n; ++i) {
    if (!range_set[static_cast<size_t>(i)]) {
      throw ParseError("missing 'range " + vars[static_cast<size_t>(i)] +
                           "' in [domain]",
                       0, 0);
    }
  }

  // declared-shape consistency (rank parity, casimir count, box)
  try {
    validate_declaration(out.system);
  } catch (const InputError& e) {
    throw ParseError(e.what(), 0, 0);
  }

  // transformation section
  int forms = (eta_ln ? 1 : 0) + (phi_ln ? 1 : 0) + (f_ln ? 1 : 0);
  if (forms > 1) {
    fail((eta_ln ? eta_ln : phi_ln)->number,
         "[ntt] must contain exactly one of eta, Phi, F");
  }
  const int k = static_cast<int>(out.system.casimirs.size());
  if (forms == 1) {
    NttSpec spec;
    if (eta_ln) {
      spec.kind = NttSpec::Kind::ExplicitEta;
      spec.payload = parse_expr_at(*eta_ln, vars);
    } else {
      // z-space expressions must not capture system variables
      const Line& zline = phi_ln ? *phi_ln : *f_ln;
      std::vector<std::string> zs =
          reserved_symbols(phi_ln ? k + 1 : k + 2);
      for (const std::string& v : vars) {
        for (const std::string& z : zs) {
          if (v == z) {
            fail(zline.number, "variable '" + v +
                                   "' collides with the reserved symbol '" +
                                   z + "'");
          }
        }
      }
      spec.kind = phi_ln ? NttSpec::Kind::Constructive
                         : NttSpec::Kind::Implicit;
      spec.payload = parse_expr_at(zline, zs);
    }
    if (hstar_ln) {
      if (phi_ln) {
        fail(hstar_ln->number,
             "Hstar is derived from Phi and may not be given alongside it");
      }
      spec.hstar_hint = parse_expr_at(*hstar_ln, vars);
    }
    int factors = (eta0_ln ? 1 : 0) + (c_ln ? 1 : 0) + (casfac_ln ? 1 : 0);
    if (factors > 1) {
      fail((eta0_ln ? eta0_ln : c_ln)->number,
           "at most one of eta0, c, casimir_factor may be given");
    }
    if (factors == 1 && !phi_ln) {
      fail((eta0_ln ? eta0_ln : (c_ln ? c_ln : casfac_ln))->number,
           "classification factors require Phi");
    }
    if (eta0_ln) spec.eta0 = parse_expr_at(*eta0_ln, vars);
    if (casfac_ln) spec.casimir_factor = parse_expr_at(*casfac_ln, vars);
    if (c_ln) {
      Expr c = parse_expr_at(*c_ln, {});
      if (!c.is_const()) {
        fail(c_ln->number, "'c' must be a numeric constant");
      }
      spec.constant_factor = c.const_value();
    }
    out.ntt = std::move(spec);
  } else if (hstar_ln || eta0_ln || c_ln || casfac_ln) {
    fail((hstar_ln ? hstar_ln
                   : (eta0_ln ? eta0_ln : (c_ln ? c_ln : casfac_ln)))
             ->number,
         "[ntt] auxiliary keys require one of eta, Phi, F");
  }

  return out;
}

SamplePlan make_sample_plan(const SystemFileData& data) {
  SamplePlan plan;
  plan.points = data.points;
  plan.seed = data.seed;
  plan.domain = data.system.domain;
  return plan;
}

SystemFileData load_system_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_system_file(buf.str());
}

}  // namespace poisntt
