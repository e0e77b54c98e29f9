#include "gisfa/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "gisfa/errors.hpp"

namespace gisfa {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

double parse_factor(std::string_view f, std::string_view whole) {
  f = trim(f);
  if (f == "pi") return std::numbers::pi;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
    throw ConfigError(fmt::format("'{}' is not a number", whole));
  }
  return v;
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt_double(v[i]);
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

[[noreturn]] void fail_at(int line, const std::string& message) {
  throw ConfigError(fmt::format("line {}: {}", line, message));
}

// Typed access with range checks; errors carry the line of the key.
class Reader {
 public:
  Reader(Section& section, std::string name) : section_(section), name_(std::move(name)) {}

  bool has(const std::string& key) const { return section_.count(key) != 0; }
  int line(const std::string& key) const { return section_.at(key).line; }

  template <class F>
  void with(const std::string& key, F&& fn) {
    auto it = section_.find(key);
    if (it == section_.end()) return;
    try {
      fn(std::string_view(it->second.value));
    } catch (const ConfigError& e) {
      fail_at(it->second.line, fmt::format("[{}] {}: {}", name_, key, e.what()));
    }
  }

  void number(const std::string& key, double& out, std::function<bool(double)> ok = {},
              const char* requirement = "") {
    with(key, [&](std::string_view v) {
      const double x = parse_number(v);
      if (ok && !ok(x)) throw ConfigError(fmt::format("value {} out of range ({})", v, requirement));
      out = x;
    });
  }

  template <class Int>
  void integer(const std::string& key, Int& out, long long min_value) {
    with(key, [&](std::string_view v) {
      long long x = 0;
      const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
      if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(fmt::format("'{}' is not an integer", v));
      }
      if (x < min_value) throw ConfigError(fmt::format("value {} out of range (>= {})", v, min_value));
      out = static_cast<Int>(x);
    });
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    with(key, [&](std::string_view v) {
      out.clear();
      for (auto item : split_list(v)) out.push_back(parse_number(item));
    });
  }

 private:
  Section& section_;
  std::string name_;
};

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"pulse", {"E0", "period_as", "wavelength_nm", "tau", "cep", "window_tau", "table_steps"}},
      {"potential", {"d", "g", "mu"}},
      {"solver", {"r_max", "step"}},
      {"momentum_tables", {"p_max", "map_scale", "n_points"}},
      {"gauge", {"gammas"}},
      {"amplitudes", {"selectors", "sfa_variant"}},
      {"grid", {"name", "kind", "pz_max", "n_pz", "pt", "pt_max", "n_pt"}},
      {"quadrature", {"n_t", "qz_max", "n_qz", "qt_max", "n_qt", "map_scale", "coverage_tolerance"}},
      {"output", {"directory", "run_name", "normalization"}},
      {"run", {"workers", "gauge_audit_points"}},
  };
  return keys;
}

const char* const kRequired[] = {"[pulse] E0",  "[pulse] period_as or wavelength_nm", "[pulse] tau",
                                 "[pulse] cep", "[potential] d",
                                 "[potential] g", "[potential] mu"};

auto positive = [](double x) { return x > 0.0; };

GridSpec read_grid(Section& s, int header_line, std::size_t index) {
  Reader r(s, "grid");
  std::string kind = "axis";
  r.with("kind", [&](std::string_view v) {
    if (v != "axis" && v != "map") throw ConfigError(fmt::format("'{}' is not axis or map", v));
    kind = std::string(v);
  });
  GridSpec g;
  g.name = index == 0 ? kind : fmt::format("{}{}", kind, index);
  r.with("name", [&](std::string_view v) {
    if (v.empty() || v.find_first_of("/\\ _") != std::string_view::npos) {
      throw ConfigError("grid name must be non-empty without spaces, '_' or slashes");
    }
    g.name = std::string(v);
  });
  double pz_max = 8.0;
  int n_pz = kind == "axis" ? 321 : 161;
  double pt = 0.0;
  double pt_max = 8.0;
  int n_pt = 81;
  r.number("pz_max", pz_max, positive, "> 0");
  r.integer("n_pz", n_pz, 2);
  if (kind == "axis") {
    for (const char* k : {"pt_max", "n_pt"}) {
      if (r.has(k)) fail_at(r.line(k), fmt::format("[grid] {} applies only to kind = map", k));
    }
    r.number("pt", pt, [](double x) { return x >= 0.0; }, ">= 0");
    g.grid = MomentumGrid::axis(pz_max, n_pz, pt);
  } else {
    if (r.has("pt")) fail_at(r.line("pt"), "[grid] pt applies only to kind = axis");
    r.number("pt_max", pt_max, positive, "> 0");
    r.integer("n_pt", n_pt, 2);
    g.grid = MomentumGrid::map(pz_max, n_pz, pt_max, n_pt);
  }
  (void)header_line;
  return g;
}

}  // namespace

double parse_number(std::string_view text) {
  std::string_view s = trim(text);
  double sign = 1.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (!s.empty() && s.front() == '-') {
    // a leading sign belongs to the whole expression unless it is a plain literal
    if (s.find_first_of("*/") != std::string_view::npos || trim(s.substr(1)) == "pi") {
      sign = -1.0;
      s.remove_prefix(1);
    }
  }
  double value = 1.0;
  char op = '*';
  while (true) {
    const auto pos = s.find_first_of("*/");
    const double f = parse_factor(s.substr(0, pos), text);
    if (op == '*') {
      value *= f;
    } else {
      if (f == 0.0) throw ConfigError(fmt::format("'{}' divides by zero", text));
      value /= f;
    }
    if (pos == std::string_view::npos) break;
    op = s[pos];
    s.remove_prefix(pos + 1);
  }
  if (!std::isfinite(value)) throw ConfigError(fmt::format("'{}' is not finite", text));
  return sign * value;
}

PulseParams RunConfig::pulse(double cep) const {
  PulseParams p;
  p.E0 = E0;
  p.omega = omega;
  p.cep = cep;
  p.tau = tau;
  p.t_start = -window_tau * tau;
  p.t_end = window_tau * tau;
  return p;
}

bool RunConfig::needs_m1() const {
  return std::find(selectors.begin(), selectors.end(), Selector::m0_m1) != selectors.end();
}

RunConfig parse_config(std::string_view text) {
  std::map<std::string, Section> sections;
  std::vector<std::pair<Section, int>> grid_sections;
  Section* current = nullptr;
  std::string current_name;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    const auto comment = line.find_first_of("#;");
    line = trim(line.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail_at(line_no, fmt::format("malformed section header '{}'", line));
      current_name = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_keys().count(current_name)) {
        fail_at(line_no, fmt::format("unknown section [{}]", current_name));
      }
      if (current_name == "grid") {
        grid_sections.emplace_back(Section{}, line_no);
        current = &grid_sections.back().first;
      } else {
        if (sections.count(current_name)) {
          fail_at(line_no, fmt::format("section [{}] appears twice", current_name));
        }
        current = &sections[current_name];
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail_at(line_no, fmt::format("expected key = value, got '{}'", line));
    if (!current) fail_at(line_no, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!known_keys().at(current_name).count(key)) {
      const auto& allowed = known_keys().at(current_name);
      std::string list;
      for (const auto& k : allowed) list += (list.empty() ? "" : ", ") + k;
      fail_at(line_no, fmt::format("unknown key '{}' in [{}] (allowed: {})", key, current_name, list));
    }
    if (current->count(key)) fail_at(line_no, fmt::format("duplicate key '{}' in [{}]", key, current_name));
    if (value.empty()) fail_at(line_no, fmt::format("empty value for '{}'", key));
    (*current)[key] = Entry{value, line_no};
  }

  auto& pulse = sections["pulse"];
  auto& potential = sections["potential"];
  std::vector<std::string> missing;
  if (!pulse.count("E0")) missing.push_back(kRequired[0]);
  if (!pulse.count("period_as") && !pulse.count("wavelength_nm")) missing.push_back(kRequired[1]);
  if (!pulse.count("tau")) missing.push_back(kRequired[2]);
  if (!pulse.count("cep")) missing.push_back(kRequired[3]);
  if (!potential.count("d")) missing.push_back(kRequired[4]);
  if (!potential.count("g")) missing.push_back(kRequired[5]);
  if (!potential.count("mu")) missing.push_back(kRequired[6]);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += "\n  " + m;
    throw ConfigError("missing required keys:" + list);
  }

  RunConfig c;
  {
    Reader r(pulse, "pulse");
    r.number("E0", c.E0, positive, "> 0");
    r.number("tau", c.tau, positive, "> 0");
    r.numbers("cep", c.ceps);
    r.number("window_tau", c.window_tau, positive, "> 0");
    r.integer("table_steps", c.table_steps, 16);
    double v = 0.0;
    if (r.has("period_as")) {
      r.number("period_as", v, positive, "> 0");
      c.period_as = v;
    }
    if (r.has("wavelength_nm")) {
      r.number("wavelength_nm", v, positive, "> 0");
      c.wavelength_nm = v;
    }
    if (c.period_as && c.wavelength_nm) {
      const double w1 = omega_from_period_as(*c.period_as);
      const double w2 = omega_from_wavelength_nm(*c.wavelength_nm);
      if (std::abs(w1 - w2) > 0.01 * w1) {
        fail_at(std::max(r.line("period_as"), r.line("wavelength_nm")),
                fmt::format("period_as (line {}) and wavelength_nm (line {}) disagree by {:.2f}%",
                            r.line("period_as"), r.line("wavelength_nm"),
                            100.0 * std::abs(w1 - w2) / w1));
      }
    }
    c.omega = c.period_as ? omega_from_period_as(*c.period_as)
                          : omega_from_wavelength_nm(*c.wavelength_nm);
    for (double cep : c.ceps) {
      if (!std::isfinite(cep)) fail_at(r.line("cep"), "cep must be finite");
    }
    const int line = r.line("tau");
    for (double cep : c.ceps) {
      try {
        c.pulse(cep).validate();
      } catch (const ConfigError& e) {
        fail_at(line, e.what());
      }
    }
  }
  {
    Reader r(potential, "potential");
    r.number("d", c.potential.d);
    r.number("g", c.potential.g);
    r.number("mu", c.potential.mu, positive, "> 0");
    try {
      c.potential.validate();
    } catch (const ConfigError& e) {
      fail_at(r.line("mu"), e.what());
    }
  }
  {
    Reader r(sections["solver"], "solver");
    r.number("r_max", c.solver.r_max, positive, "> 0");
    r.number("step", c.solver.step, positive, "> 0");
  }
  {
    Reader r(sections["momentum_tables"], "momentum_tables");
    r.number("p_max", c.momentum.p_max, positive, "> 0");
    r.number("map_scale", c.momentum.map_scale, positive, "> 0");
    r.integer("n_points", c.momentum.n_points, 16);
  }
  {
    Reader r(sections["gauge"], "gauge");
    r.numbers("gammas", c.gammas);
  }
  {
    Reader r(sections["amplitudes"], "amplitudes");
    r.with("selectors", [&](std::string_view v) {
      c.selectors.clear();
      for (auto item : split_list(v)) {
        const Selector s = parse_selector(item);
        if (std::find(c.selectors.begin(), c.selectors.end(), s) == c.selectors.end()) c.selectors.push_back(s);
      }
    });
    r.with("sfa_variant", [&](std::string_view v) {
      if (v == "full") {
        c.sfa_variant = SfaVariant::full;
      } else if (v == "potential_only") {
        c.sfa_variant = SfaVariant::potential_only;
      } else {
        throw ConfigError(fmt::format("'{}' is not full or potential_only", v));
      }
    });
  }
  if (!grid_sections.empty()) {
    c.grids.clear();
    std::set<std::string> names;
    for (std::size_t i = 0; i < grid_sections.size(); ++i) {
      GridSpec g = read_grid(grid_sections[i].first, grid_sections[i].second, i);
      if (!names.insert(g.name).second) {
        fail_at(grid_sections[i].second, fmt::format("grid name '{}' used twice", g.name));
      }
      c.grids.push_back(std::move(g));
    }
  }
  {
    Reader r(sections["quadrature"], "quadrature");
    auto& q = c.quadrature;
    r.integer("n_t", q.n_t, 8);
    r.integer("n_qz", q.n_qz, 8);
    r.integer("n_qt", q.n_qt, 8);
    r.number("qz_max", q.qz_max, positive, "> 0");
    r.number("qt_max", q.qt_max, positive, "> 0");
    r.number("map_scale", q.map_scale, positive, "> 0");
    r.number("coverage_tolerance", q.coverage_tolerance, [](double x) { return x > 0.0 && x < 1.0; },
             "in (0, 1)");
  }
  {
    Reader r(sections["output"], "output");
    r.with("directory", [&](std::string_view v) { c.output_dir = std::string(v); });
    r.with("run_name", [&](std::string_view v) {
      if (v.find_first_of("/\\ ") != std::string_view::npos) {
        throw ConfigError("run_name must not contain spaces or slashes");
      }
      c.run_name = std::string(v);
    });
    r.with("normalization", [&](std::string_view v) { c.normalization = parse_normalization(v); });
  }
  {
    Reader r(sections["run"], "run");
    r.integer("workers", c.workers, 1);
    r.integer("gauge_audit_points", c.gauge_audit_points, 0);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string echo_config(const RunConfig& c) {
  std::string out;
  auto kv = [&](const char* k, const std::string& v) { out += fmt::format("{} = {}\n", k, v); };
  out += "[pulse]\n";
  kv("E0", fmt_double(c.E0));
  if (c.period_as) kv("period_as", fmt_double(*c.period_as));
  if (c.wavelength_nm) kv("wavelength_nm", fmt_double(*c.wavelength_nm));
  if (!c.period_as && !c.wavelength_nm) {
    kv("period_as", fmt_double(2.0 * std::numbers::pi / c.omega * kAtomicTimeAs));
  }
  kv("tau", fmt_double(c.tau));
  kv("cep", join_doubles(c.ceps));
  kv("window_tau", fmt_double(c.window_tau));
  kv("table_steps", std::to_string(c.table_steps));
  out += "\n[potential]\n";
  kv("d", fmt_double(c.potential.d));
  kv("g", fmt_double(c.potential.g));
  kv("mu", fmt_double(c.potential.mu));
  out += "\n[solver]\n";
  kv("r_max", fmt_double(c.solver.r_max));
  kv("step", fmt_double(c.solver.step));
  out += "\n[momentum_tables]\n";
  kv("p_max", fmt_double(c.momentum.p_max));
  kv("map_scale", fmt_double(c.momentum.map_scale));
  kv("n_points", std::to_string(c.momentum.n_points));
  out += "\n[gauge]\n";
  kv("gammas", join_doubles(c.gammas));
  out += "\n[amplitudes]\n";
  std::string sel;
  for (std::size_t i = 0; i < c.selectors.size(); ++i) {
    sel += (i ? ", " : "") + std::string(c.selectors[i] == Selector::m0_m1 ? "M0+M1"
                                                                          : selector_token(c.selectors[i]));
  }
  kv("selectors", sel);
  kv("sfa_variant", c.sfa_variant == SfaVariant::full ? "full" : "potential_only");
  for (const auto& g : c.grids) {
    out += "\n[grid]\n";
    kv("name", g.name);
    kv("kind", g.grid.on_axis() ? "axis" : "map");
    kv("pz_max", fmt_double(g.grid.pz.back()));
    kv("n_pz", std::to_string(g.grid.pz.size()));
    if (g.grid.on_axis()) {
      kv("pt", fmt_double(g.grid.pt[0]));
    } else {
      kv("pt_max", fmt_double(g.grid.pt.back()));
      kv("n_pt", std::to_string(g.grid.pt.size()));
    }
  }
  out += "\n[quadrature]\n";
  const auto& q = c.quadrature;
  kv("n_t", std::to_string(q.n_t));
  kv("qz_max", fmt_double(q.qz_max));
  kv("n_qz", std::to_string(q.n_qz));
  kv("qt_max", fmt_double(q.qt_max));
  kv("n_qt", std::to_string(q.n_qt));
  kv("map_scale", fmt_double(q.map_scale));
  kv("coverage_tolerance", fmt_double(q.coverage_tolerance));
  out += "\n[output]\n";
  kv("directory", c.output_dir.string());
  kv("run_name", c.run_name);
  kv("normalization", std::string(normalization_token(c.normalization)));
  out += "\n[run]\n";
  kv("workers", std::to_string(c.workers));
  kv("gauge_audit_points", std::to_string(c.gauge_audit_points));
  return out;
}

RunConfig paper_figures_config(RunConfig base) {
  base.ceps = {0.0, std::numbers::pi / 2.0};
  base.gammas = {0.0};
  base.selectors = {Selector::m0, Selector::m0_m1, Selector::sfa};
  base.grids = {GridSpec{"axis", MomentumGrid::axis(8.0, 321)},
                GridSpec{"map", MomentumGrid::map(8.0, 161, 8.0, 81)}};
  if (base.run_name == "run") base.run_name = "paper";
  return base;
}

}  // namespace gisfa
