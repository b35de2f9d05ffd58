#include "janus/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace janus::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> to_uint(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Entry {
  std::string value;
  std::size_t line = 0;
  std::size_t column = 0;  ///< column of the value
};

using Section = std::multimap<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"grid", {"dimension", "h", "min", "max"}},
      {"regions", {"local", "nonlocal", "gamma"}},
      {"kernel.J", {"family", "C", "delta", "s", "epsilon"}},
      {"kernel.G", {"family", "C", "delta", "s", "epsilon"}},
      {"source", {"profile", "box"}},
      {"solver", {"tol", "max_iter", "preconditioner"}},
      {"model", {"type"}},
      {"simulate", {"particles", "horizon", "seed"}},
      {"analysis", {"sample_count"}},
      {"sweep", {"deltas", "amplitudes_J", "models"}},
  };
  return s;
}

class Reader {
 public:
  std::vector<Diagnostic> errors;

  void error(const Entry& e, const std::string& msg) { errors.push_back({e.line, e.column, msg}); }
  void error(const std::string& msg) { errors.push_back({0, 0, msg}); }

  std::optional<double> number(const Entry& e, const std::string& key) {
    auto v = to_double(e.value);
    if (!v || !std::isfinite(*v)) error(e, key + ": expected a finite number, got '" + e.value + "'");
    return v;
  }

  std::optional<std::uint64_t> integer(const Entry& e, const std::string& key) {
    auto v = to_uint(e.value);
    if (!v) error(e, key + ": expected a non-negative integer, got '" + e.value + "'");
    return v;
  }

  std::optional<std::vector<double>> numbers(const Entry& e, const std::string& key) {
    std::vector<double> out;
    for (auto part : split(e.value, ',')) {
      auto v = to_double(part);
      if (!v || !std::isfinite(*v)) {
        error(e, key + ": expected a comma-separated number list, got '" + e.value + "'");
        return std::nullopt;
      }
      out.push_back(*v);
    }
    return out;
  }

  /// `[a,b]` or `[a,b]x[c,d]`
  std::optional<std::vector<std::pair<double, double>>> box(std::string_view text, const Entry& e) {
    std::vector<std::pair<double, double>> axes;
    text = trim(text);
    while (!text.empty()) {
      if (text.front() != '[') break;
      const auto close = text.find(']');
      if (close == std::string_view::npos) break;
      const auto parts = split(text.substr(1, close - 1), ',');
      if (parts.size() != 2) break;
      auto a = to_double(parts[0]), b = to_double(parts[1]);
      if (!a || !b) break;
      axes.emplace_back(*a, *b);
      text = trim(text.substr(close + 1));
      if (text.empty()) return axes;
      if (text.front() != 'x') break;
      text = trim(text.substr(1));
    }
    error(e, "malformed box '" + e.value + "'; expected [a,b] or [a,b]x[c,d]");
    return std::nullopt;
  }

  std::optional<std::vector<std::vector<std::pair<double, double>>>> region(const Entry& e) {
    std::vector<std::vector<std::pair<double, double>>> out;
    for (auto part : split(e.value, '+')) {
      auto b = box(part, e);
      if (!b) return std::nullopt;
      out.push_back(*b);
    }
    return out;
  }
};

const Entry* get(const Section& s, const std::string& key) {
  auto it = s.find(key);
  return it == s.end() ? nullptr : &it->second;
}

std::string render_box(const geometry::Box& b, int dim) {
  std::string s;
  for (int k = 0; k < dim; ++k) {
    if (k) s += "x";
    const auto a = static_cast<std::size_t>(k);
    s += "[" + shortest(b.lo[a]) + "," + shortest(b.hi[a]) + "]";
  }
  return s;
}

std::string render_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + shortest(v[i]);
  return s;
}

}  // namespace

std::string format_region(const geometry::Region& r, int dimension) {
  std::string s;
  for (std::size_t i = 0; i < r.size(); ++i) s += (i ? " + " : "") + render_box(r[i], dimension);
  return s;
}

ParseOutcome try_parse_config(std::string_view text) {
  ParseOutcome out;
  std::map<std::string, Section> sections;
  std::vector<Diagnostic> syntax;
  std::string current;
  std::size_t line_no = 0;
  bool any_content = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto indent = raw.find_first_not_of(" \t");
    const std::size_t col = indent == std::string_view::npos ? 1 : indent + 1;
    line = trim(line);
    if (line.empty()) continue;
    any_content = true;
    if (line.front() == '[') {
      if (line.back() != ']') {
        syntax.push_back({line_no, col, "unterminated section header"});
        continue;
      }
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (!schema().count(current)) {
        syntax.push_back({line_no, col + 1, "unknown section [" + current + "]"});
      } else if (sections.count(current)) {
        syntax.push_back({line_no, col + 1, "duplicate section [" + current + "]"});
      } else {
        sections[current];
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      syntax.push_back({line_no, col, "expected 'key = value'"});
      continue;
    }
    if (current.empty()) {
      syntax.push_back({line_no, col, "key outside of any section"});
      continue;
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    const std::size_t value_col = col + static_cast<std::size_t>(raw.substr(col - 1).find('=')) + 1;
    auto sec = schema().find(current);
    if (sec == schema().end()) continue;
    if (key.empty() || !sec->second.count(key)) {
      syntax.push_back({line_no, col, "unknown key '" + key + "' in [" + current + "]"});
      continue;
    }
    if (value.empty()) {
      syntax.push_back({line_no, value_col, "missing value for '" + key + "'"});
      continue;
    }
    auto& s = sections[current];
    if (key != "box" && s.count(key)) {
      syntax.push_back({line_no, col, "duplicate key '" + key + "' in [" + current + "]"});
      continue;
    }
    s.emplace(key, Entry{value, line_no, value_col});
  }
  if (!any_content) syntax.push_back({1, 1, "empty configuration"});
  if (!syntax.empty()) {
    out.code = ErrorCode::ParseError;
    out.errors = std::move(syntax);
    return out;
  }

  Reader rd;
  ProblemConfig c;
  auto section = [&](const std::string& name, bool required) -> const Section* {
    auto it = sections.find(name);
    if (it == sections.end()) {
      if (required) rd.error("missing section [" + name + "]");
      return nullptr;
    }
    return &it->second;
  };
  auto require = [&](const Section* s, const std::string& sec, const std::string& key) -> const Entry* {
    const Entry* e = s ? get(*s, key) : nullptr;
    if (s && !e) rd.error("[" + sec + "] requires '" + key + "'");
    return e;
  };

  // grid
  bool grid_ok = false;
  if (const Section* g = section("grid", true)) {
    bool ok = true;
    if (auto e = require(g, "grid", "dimension")) {
      auto v = rd.integer(*e, "dimension");
      if (v && (*v == 1 || *v == 2)) {
        c.dimension = static_cast<int>(*v);
      } else {
        if (v) rd.error(*e, "dimension must be 1 or 2");
        ok = false;
      }
    } else {
      ok = false;
    }
    if (auto e = require(g, "grid", "h")) {
      auto v = rd.number(*e, "h");
      if (v && *v > 0.0) {
        c.h = *v;
      } else {
        if (v) rd.error(*e, "h must be positive");
        ok = false;
      }
    } else {
      ok = false;
    }
    for (const char* key : {"min", "max"}) {
      const Entry* e = require(g, "grid", key);
      if (!e) {
        ok = false;
        continue;
      }
      auto v = rd.numbers(*e, key);
      if (!v) {
        ok = false;
        continue;
      }
      if (ok && static_cast<int>(v->size()) != c.dimension) {
        rd.error(*e, std::string(key) + " needs " + std::to_string(c.dimension) + " components");
        ok = false;
        continue;
      }
      geometry::Point& p = std::string(key) == "min" ? c.lo : c.hi;
      for (std::size_t k = 0; k < v->size() && k < 2; ++k) p[k] = (*v)[k];
    }
    if (ok) {
      try {
        (void)geometry::GridSpec::make(c.dimension, c.h, c.lo, c.hi);
        grid_ok = true;
      } catch (const Error& err) {
        rd.error(*get(*g, "h"), err.what());
      }
    }
  }

  auto to_region = [&](const Entry& e) -> std::optional<geometry::Region> {
    auto boxes = rd.region(e);
    if (!boxes) return std::nullopt;
    geometry::Region r;
    for (const auto& axes : *boxes) {
      if (grid_ok && static_cast<int>(axes.size()) != c.dimension) {
        rd.error(e, "box has " + std::to_string(axes.size()) + " axes, grid has " +
                        std::to_string(c.dimension));
        return std::nullopt;
      }
      geometry::Box b;
      for (std::size_t k = 0; k < axes.size() && k < 2; ++k) {
        b.lo[k] = axes[k].first;
        b.hi[k] = axes[k].second;
        if (b.lo[k] > b.hi[k]) {
          rd.error(e, "box bounds must satisfy lo <= hi");
          return std::nullopt;
        }
        if (grid_ok) {
          const double tol = 1e-9 * std::max(1.0, c.hi[k] - c.lo[k]);
          if (b.lo[k] < c.lo[k] - tol || b.hi[k] > c.hi[k] + tol) {
            rd.error(e, "box " + render_box(b, c.dimension) + " leaves the grid bounding box");
            return std::nullopt;
          }
        }
      }
      r.push_back(b);
    }
    return r;
  };

  // model (needed to decide whether gamma is required)
  if (const Section* m = section("model", false)) {
    if (auto e = get(*m, "type")) {
      try {
        c.model = assembly::model_from_string(e->value);
      } catch (const Error&) {
        rd.error(*e, "unknown model '" + e->value +
                         "'; expected volumetric, mixed, fractional-volumetric or fractional-mixed");
      }
    }
  }

  if (const Section* r = section("regions", true)) {
    if (auto e = require(r, "regions", "local")) {
      if (auto reg = to_region(*e)) c.local = *reg;
    }
    if (auto e = require(r, "regions", "nonlocal")) {
      if (auto reg = to_region(*e)) c.nonlocal = *reg;
    }
    if (auto e = get(*r, "gamma")) {
      if (auto reg = to_region(*e)) c.gamma = *reg;
    }
  }

  auto read_kernel = [&](const std::string& name, kernels::KernelSpec& k) {
    const Section* s = section(name, true);
    if (!s) return;
    bool ok = true;
    if (auto e = require(s, name, "family")) {
      try {
        k.family = kernels::family_from_string(e->value);
      } catch (const Error&) {
        rd.error(*e, "unknown kernel family '" + e->value + "'");
        ok = false;
      }
    } else {
      ok = false;
    }
    auto num = [&](const char* key, double& dst, bool required) {
      const Entry* e = required ? require(s, name, key) : get(*s, key);
      if (!e) {
        if (required) ok = false;
        return;
      }
      if (auto v = rd.number(*e, key)) {
        dst = *v;
      } else {
        ok = false;
      }
    };
    num("C", k.amplitude, true);
    num("delta", k.delta, true);
    num("s", k.order, false);
    num("epsilon", k.epsilon, false);
    if (ok) {
      try {
        k.validate();
      } catch (const Error& err) {
        const Entry* at = get(*s, err.code() == ErrorCode::InvalidOrder ? "s" : "family");
        std::string msg = err.code() == ErrorCode::InvalidOrder ? "s must be in (0,1)" : err.what();
        rd.error(*at, "[" + name + "] " + msg);
      }
    }
  };
  read_kernel("kernel.J", c.j);
  read_kernel("kernel.G", c.g);

  if (const Section* s = section("source", false)) {
    const Entry* profile = get(*s, "profile");
    const auto boxes = s->equal_range("box");
    if (profile && boxes.first != boxes.second) {
      rd.error(*profile, "[source] takes either 'profile' or 'box' lines, not both");
    } else if (profile) {
      static const std::set<std::string> names{"balanced-step", "zero", "uniform"};
      if (names.count(profile->value)) {
        c.source_profile = profile->value;
      } else {
        rd.error(*profile, "unknown source profile '" + profile->value + "'");
      }
    } else if (boxes.first != boxes.second) {
      c.source_profile = "boxes";
      std::vector<const Entry*> ordered;
      for (auto it = boxes.first; it != boxes.second; ++it) ordered.push_back(&it->second);
      std::sort(ordered.begin(), ordered.end(),
                [](const Entry* a, const Entry* b) { return a->line < b->line; });
      for (const Entry* e : ordered) {
        const auto colon = e->value.rfind(':');
        if (colon == std::string::npos) {
          rd.error(*e, "source box needs ': value'");
          continue;
        }
        Entry part = *e;
        part.value = std::string(trim(std::string_view(e->value).substr(0, colon)));
        auto reg = to_region(part);
        auto v = to_double(std::string_view(e->value).substr(colon + 1));
        if (!v || !std::isfinite(*v)) {
          rd.error(*e, "source value must be a finite number");
          continue;
        }
        if (!reg) continue;
        if (reg->size() != 1) {
          rd.error(*e, "one box per source line");
          continue;
        }
        c.source_boxes.push_back({reg->front(), *v});
      }
    }
  }

  if (const Section* s = section("solver", false)) {
    if (auto e = get(*s, "tol")) {
      if (auto v = rd.number(*e, "tol")) {
        if (*v > 0.0) c.tol = *v;
        else rd.error(*e, "tol must be positive");
      }
    }
    if (auto e = get(*s, "max_iter")) {
      if (auto v = rd.integer(*e, "max_iter")) c.max_iter = *v;
    }
    if (auto e = get(*s, "preconditioner")) {
      if (e->value == "jacobi") c.jacobi = true;
      else if (e->value == "none") c.jacobi = false;
      else rd.error(*e, "preconditioner must be 'none' or 'jacobi'");
    }
  }

  if (const Section* s = section("simulate", false)) {
    if (auto e = get(*s, "particles")) {
      if (auto v = rd.integer(*e, "particles")) {
        if (*v >= 1) c.particles = *v;
        else rd.error(*e, "particles must be >= 1");
      }
    }
    if (auto e = get(*s, "horizon")) {
      if (auto v = rd.number(*e, "horizon")) {
        if (*v > 0.0) c.horizon = *v;
        else rd.error(*e, "horizon must be positive");
      }
    }
    if (auto e = get(*s, "seed")) {
      if (auto v = rd.integer(*e, "seed")) c.seed = *v;
    }
  }

  if (const Section* s = section("analysis", false)) {
    if (auto e = get(*s, "sample_count")) {
      if (auto v = rd.integer(*e, "sample_count")) {
        if (*v >= 2) c.sample_count = *v;
        else rd.error(*e, "sample_count must be >= 2");
      }
    }
  }

  bool sweep_mixed = false;
  if (const Section* s = section("sweep", false)) {
    if (auto e = get(*s, "deltas")) {
      if (auto v = rd.numbers(*e, "deltas")) {
        if (std::all_of(v->begin(), v->end(), [](double d) { return d > 0.0; })) c.sweep_deltas = *v;
        else rd.error(*e, "sweep deltas must be positive");
      }
    }
    if (auto e = get(*s, "amplitudes_J")) {
      if (auto v = rd.numbers(*e, "amplitudes_J")) {
        if (std::all_of(v->begin(), v->end(), [](double d) { return d > 0.0; })) c.sweep_amplitudes = *v;
        else rd.error(*e, "sweep amplitudes must be positive");
      }
    }
    if (auto e = get(*s, "models")) {
      for (auto name : split(e->value, ',')) {
        try {
          c.sweep_models.push_back(assembly::model_from_string(std::string(name)));
          sweep_mixed = sweep_mixed || assembly::uses_interface(c.sweep_models.back());
        } catch (const Error&) {
          rd.error(*e, "unknown model '" + std::string(name) + "' in sweep");
        }
      }
    }
  }

  if ((assembly::uses_interface(c.model) || sweep_mixed) && c.gamma.empty()) {
    if (sections.count("regions")) rd.error("mixed models require [regions] gamma");
  }

  if (!rd.errors.empty()) {
    out.code = ErrorCode::ValidationError;
    out.errors = std::move(rd.errors);
    return out;
  }
  out.config = std::move(c);
  return out;
}

ProblemConfig parse_config(std::string_view text) {
  auto res = try_parse_config(text);
  if (res.config) return *res.config;
  std::string msg;
  for (const auto& d : res.errors) {
    if (!msg.empty()) msg += "\n";
    if (d.line) msg += "line " + std::to_string(d.line) + ", column " + std::to_string(d.column) + ": ";
    msg += d.message;
  }
  throw Error(res.code, msg);
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ProblemConfig& c) {
  std::ostringstream o;
  std::vector<double> lo(c.lo.begin(), c.lo.begin() + c.dimension);
  std::vector<double> hi(c.hi.begin(), c.hi.begin() + c.dimension);
  o << "[grid]\n"
    << "dimension = " << c.dimension << "\n"
    << "h = " << shortest(c.h) << "\n"
    << "min = " << render_list(lo) << "\n"
    << "max = " << render_list(hi) << "\n\n";
  o << "[regions]\n"
    << "local = " << format_region(c.local, c.dimension) << "\n"
    << "nonlocal = " << format_region(c.nonlocal, c.dimension) << "\n";
  if (!c.gamma.empty()) o << "gamma = " << format_region(c.gamma, c.dimension) << "\n";
  o << "\n";
  auto kernel = [&](const char* name, const kernels::KernelSpec& k) {
    o << "[" << name << "]\n"
      << "family = " << kernels::to_string(k.family) << "\n"
      << "C = " << shortest(k.amplitude) << "\n"
      << "delta = " << shortest(k.delta) << "\n"
      << "s = " << shortest(k.order) << "\n"
      << "epsilon = " << shortest(k.epsilon) << "\n\n";
  };
  kernel("kernel.J", c.j);
  kernel("kernel.G", c.g);
  o << "[source]\n";
  if (c.source_profile == "boxes") {
    for (const auto& b : c.source_boxes) {
      o << "box = " << render_box(b.box, c.dimension) << " : " << shortest(b.value) << "\n";
    }
  } else {
    o << "profile = " << c.source_profile << "\n";
  }
  o << "\n[solver]\n"
    << "tol = " << shortest(c.tol) << "\n"
    << "max_iter = " << c.max_iter << "\n"
    << "preconditioner = " << (c.jacobi ? "jacobi" : "none") << "\n\n";
  o << "[model]\n"
    << "type = " << assembly::to_string(c.model) << "\n\n";
  o << "[simulate]\n"
    << "particles = " << c.particles << "\n"
    << "horizon = " << shortest(c.horizon) << "\n"
    << "seed = " << c.seed << "\n\n";
  o << "[analysis]\n"
    << "sample_count = " << c.sample_count << "\n";
  if (!c.sweep_deltas.empty() || !c.sweep_amplitudes.empty() || !c.sweep_models.empty()) {
    o << "\n[sweep]\n";
    if (!c.sweep_deltas.empty()) o << "deltas = " << render_list(c.sweep_deltas) << "\n";
    if (!c.sweep_amplitudes.empty()) o << "amplitudes_J = " << render_list(c.sweep_amplitudes) << "\n";
    if (!c.sweep_models.empty()) {
      o << "models = ";
      for (std::size_t i = 0; i < c.sweep_models.size(); ++i) {
        o << (i ? ", " : "") << assembly::to_string(c.sweep_models[i]);
      }
      o << "\n";
    }
  }
  return o.str();
}

BuiltProblem build_problem(const ProblemConfig& c) {
  const auto grid = geometry::GridSpec::make(c.dimension, c.h, c.lo, c.hi);
  auto domain = geometry::build_domain(grid, c.local, c.nonlocal);
  std::optional<geometry::Interface> gamma;
  if (assembly::uses_interface(c.model)) gamma = geometry::extract_interface(domain.local, c.gamma);
  assembly::Layout layout(std::move(domain.local), std::move(domain.nonlocal));

  Vec f(layout.size(), 0.0);
  const double tol = 1e-9 * c.h;
  if (c.source_profile == "balanced-step") {
    const double ratio = layout.local().volume() / layout.nonlocal().volume();
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = layout.is_local(i) ? 1.0 : -ratio;
  } else if (c.source_profile == "uniform") {
    std::fill(f.begin(), f.end(), 1.0);
  } else if (c.source_profile == "boxes") {
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto x = layout.center(i);
      for (const auto& b : c.source_boxes) {
        if (b.box.contains(x, c.dimension, tol)) f[i] = b.value;
      }
    }
  }
  assembly::Problem p{c.model, std::move(layout), c.j, kernels::CouplingSpec{c.g, {}}, std::move(gamma)};
  return {std::move(p), std::move(f)};
}

}  // namespace janus::io
