#include "qtm/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#ifndef QTM_VERSION
#define QTM_VERSION "unknown"
#endif

namespace qtm {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("{}: cannot read config file", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::optional<double> to_number(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

IniDocument IniDocument::parse(std::string_view text, std::string source) {
  IniDocument doc;
  doc.source_ = std::move(source);
  std::string current;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(fmt::format("{}:{}: malformed section header", doc.source_, line_no));
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (current.empty()) throw ConfigError(fmt::format("{}:{}: empty section name", doc.source_, line_no));
      if (doc.section_lines_.contains(current))
        throw ConfigError(fmt::format("{}:{}: duplicate section [{}]", doc.source_, line_no, current));
      doc.section_lines_[current] = line_no;
      doc.sections_[current];
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError(fmt::format("{}:{}: expected 'key = value'", doc.source_, line_no));
      if (current.empty())
        throw ConfigError(fmt::format("{}:{}: key outside of any section", doc.source_, line_no));
      const std::string key(trim(line.substr(0, eq)));
      if (key.empty()) throw ConfigError(fmt::format("{}:{}: empty key", doc.source_, line_no));
      auto& section = doc.sections_[current];
      if (section.contains(key))
        throw ConfigError(fmt::format("{}:{}: duplicate key '{}' in [{}]", doc.source_, line_no, key, current));
      section[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no, false};
    }
    if (end == text.size()) break;
  }
  return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) { return parse(read_file(path), path.string()); }

bool IniDocument::has_section(const std::string& section) const { return sections_.contains(section); }

bool IniDocument::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const IniDocument::Entry* IniDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto e = s->second.find(key);
  return e == s->second.end() ? nullptr : &e->second;
}

void IniDocument::fail(const std::string& section, const std::string& key, const std::string& message) const {
  if (const auto* e = find(section, key))
    throw ConfigError(fmt::format("{}:{}: [{}] {}: {}", source_, e->line, section, key, message));
  if (const auto s = section_lines_.find(section); s != section_lines_.end())
    throw ConfigError(fmt::format("{}:{}: [{}] {}", source_, s->second, section,
                                  key.empty() ? message : fmt::format("{}: {}", key, message)));
  throw ConfigError(fmt::format("{}: [{}] {}", source_, section,
                                key.empty() ? message : fmt::format("{}: {}", key, message)));
}

std::optional<std::string> IniDocument::string(const std::string& section, const std::string& key) const {
  const auto* e = find(section, key);
  if (!e) return std::nullopt;
  e->used = true;
  if (e->value.empty()) fail(section, key, "empty value");
  return e->value;
}

std::optional<double> IniDocument::number(const std::string& section, const std::string& key) const {
  const auto text = string(section, key);
  if (!text) return std::nullopt;
  const auto value = to_number(*text);
  if (!value) fail(section, key, fmt::format("'{}' is not a finite number", *text));
  return value;
}

std::optional<std::size_t> IniDocument::count(const std::string& section, const std::string& key) const {
  const auto text = string(section, key);
  if (!text) return std::nullopt;
  std::size_t value = 0;
  const auto* end = text->data() + text->size();
  const auto [ptr, ec] = std::from_chars(text->data(), end, value);
  if (ec != std::errc() || ptr != end) fail(section, key, fmt::format("'{}' is not a non-negative integer", *text));
  return value;
}

std::optional<std::vector<std::string>> IniDocument::list(const std::string& section, const std::string& key) const {
  const auto text = string(section, key);
  if (!text) return std::nullopt;
  std::vector<std::string> items;
  std::string_view rest = *text;
  while (true) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    if (item.empty()) fail(section, key, "empty list item");
    items.emplace_back(item);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return items;
}

std::optional<std::vector<double>> IniDocument::numbers(const std::string& section, const std::string& key) const {
  const auto items = list(section, key);
  if (!items) return std::nullopt;
  std::vector<double> values;
  for (const auto& item : *items) {
    const auto v = to_number(item);
    if (!v) fail(section, key, fmt::format("'{}' is not a finite number", item));
    values.push_back(*v);
  }
  return values;
}

void IniDocument::reject_unused() const {
  for (const auto& [section, entries] : sections_)
    for (const auto& [key, entry] : entries)
      if (!entry.used) throw ConfigError(fmt::format("{}:{}: unknown key '{}' in [{}]", source_, entry.line, key, section));
}

void IniDocument::restrict_sections(const std::vector<std::string>& allowed) const {
  for (const auto& [section, line] : section_lines_)
    if (std::find(allowed.begin(), allowed.end(), section) == allowed.end())
      throw ConfigError(fmt::format("{}:{}: unknown section [{}]", source_, line, section));
}

namespace {

template <class F>
void guarded(const IniDocument& doc, const std::string& section, const std::string& key, F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    doc.fail(section, key, e.what());
  }
}

double positive(const IniDocument& doc, const std::string& section, const std::string& key, double fallback) {
  const double v = doc.number(section, key).value_or(fallback);
  if (!(v > 0.0)) doc.fail(section, key, "must be positive");
  return v;
}

RunConfig read_run(const IniDocument& doc) {
  RunConfig c;
  Scenario& s = c.scenario;

  c.name = doc.string("run", "name").value_or("run");
  if (const auto g = doc.string("run", "geometry")) guarded(doc, "run", "geometry", [&] { s.geometry = parse_geometry(*g); });
  c.echo_threshold = positive(doc, "run", "echo_threshold", 0.2);

  if (s.geometry == Geometry::line) {
    s.packet.sigma = positive(doc, "packet", "sigma", s.packet.sigma);
    s.packet.k = doc.number("packet", "k").value_or(s.packet.k);
    s.packet.x0 = doc.number("packet", "x0").value_or(s.packet.x0);
    if (doc.has("packet", "R")) doc.fail("packet", "R", "only valid for the 2d-ring geometry");
  } else {
    s.ring.R = positive(doc, "packet", "R", s.ring.R);
    s.ring.sigma = positive(doc, "packet", "sigma", s.ring.sigma);
    s.ring.k = doc.number("packet", "k").value_or(s.ring.k);
    if (doc.has("packet", "x0")) doc.fail("packet", "x0", "only valid for the 1d geometry");
  }

  const std::string kind = doc.string("pulse", "kind").value_or("gaussian");
  const double lambda = doc.number("pulse", "lambda").value_or(0.0);
  const double t0 = doc.number("pulse", "t0").value_or(1.0);
  if (kind == "gaussian") {
    s.pulse = PulseProfile::gaussian(lambda, doc.number("pulse", "width").value_or(0.001), t0);
  } else if (kind == "instantaneous") {
    s.pulse = PulseProfile::instantaneous(lambda, t0);
    if (doc.has("pulse", "width")) doc.fail("pulse", "width", "not used by instantaneous kicks");
  } else {
    doc.fail("pulse", "kind", fmt::format("'{}' is not gaussian or instantaneous", kind));
  }
  guarded(doc, "pulse", "", [&] { s.pulse.validate(); });

  const double t_end = doc.number("evolution", "t_end").value_or(4.0);
  s.plan = EvolutionPlan::defaults_for(s.pulse, t_end);
  s.plan.dt = doc.number("evolution", "dt").value_or(s.plan.dt);
  s.plan.dt_pulse = doc.number("evolution", "dt_pulse").value_or(s.plan.dt_pulse);
  s.plan.sample_stride = doc.count("evolution", "sample_stride").value_or(1);
  s.plan.boundary_tolerance = doc.number("evolution", "boundary_tolerance").value_or(s.plan.boundary_tolerance);
  guarded(doc, "evolution", "", [&] { s.plan.validate(s.pulse); });

  const std::string mode = doc.string("grid", "mode").value_or("auto");
  if (mode == "auto") {
    s.grid = GridSpec{};
    for (const char* key : {"points", "lo", "hi"})
      if (doc.has("grid", key)) doc.fail("grid", key, "only valid with mode = explicit");
  } else if (mode == "explicit") {
    s.grid.automatic = false;
    const auto points = doc.count("grid", "points");
    const auto lo = doc.number("grid", "lo");
    const auto hi = doc.number("grid", "hi");
    if (!points || !lo || !hi) doc.fail("grid", "mode", "explicit grids need points, lo and hi");
    s.grid.points = *points;
    s.grid.extent = {*lo, *hi};
    guarded(doc, "grid", "points", [&] { make_grid(s.dim(), s.grid.extent, s.grid.points); });
  } else {
    doc.fail("grid", "mode", fmt::format("'{}' is not auto or explicit", mode));
  }

  c.output_dir = doc.string("output", "dir").value_or("");
  if (const auto items = doc.list("output", "snapshots")) {
    for (const auto& item : *items) {
      if (item == "peak") {
        c.snapshots.push_back({true, 0.0});
        continue;
      }
      const auto t = to_number(item);
      if (!t || *t < 0.0 || *t > s.plan.t_end)
        doc.fail("output", "snapshots", fmt::format("'{}' is not 'peak' or a time in [0, t_end]", item));
      if (*t > s.pulse.window_start() && *t < s.pulse.window_end())
        doc.fail("output", "snapshots", fmt::format("time {} falls inside the pulse window", item));
      c.snapshots.push_back({false, *t});
    }
  }

  // Packet must fit the explicit grid.
  if (!s.grid.automatic) guarded(doc, "grid", "points", [&] { (void)initial_state(s, resolve_grid(s).grid); });
  return c;
}

void dump_scenario(std::string& out, const RunConfig& c) {
  const Scenario& s = c.scenario;
  out += fmt::format("[run]\nname = {}\ngeometry = {}\necho_threshold = {}\n\n", c.name, to_string(s.geometry),
                     num(c.echo_threshold));
  out += "[packet]\n";
  if (s.geometry == Geometry::line)
    out += fmt::format("sigma = {}\nk = {}\nx0 = {}\n\n", num(s.packet.sigma), num(s.packet.k), num(s.packet.x0));
  else
    out += fmt::format("R = {}\nsigma = {}\nk = {}\n\n", num(s.ring.R), num(s.ring.sigma), num(s.ring.k));
  out += fmt::format("[pulse]\nkind = {}\nlambda = {}\nt0 = {}\n", to_string(s.pulse.kind), num(s.pulse.lambda),
                     num(s.pulse.t0));
  if (s.pulse.kind == PulseProfile::Kind::gaussian) out += fmt::format("width = {}\n", num(s.pulse.width));
  out += fmt::format("\n[evolution]\nt_end = {}\ndt = {}\ndt_pulse = {}\nsample_stride = {}\nboundary_tolerance = {}\n\n",
                     num(s.plan.t_end), num(s.plan.dt), num(s.plan.dt_pulse), s.plan.sample_stride,
                     num(s.plan.boundary_tolerance));
  if (s.grid.automatic)
    out += "[grid]\nmode = auto\n\n";
  else
    out += fmt::format("[grid]\nmode = explicit\npoints = {}\nlo = {}\nhi = {}\n\n", s.grid.points,
                       num(s.grid.extent.lo), num(s.grid.extent.hi));
  out += "[output]\n";
  if (!c.output_dir.empty()) out += fmt::format("dir = {}\n", c.output_dir);
  if (!c.snapshots.empty()) {
    std::vector<std::string> items;
    for (const auto& r : c.snapshots) items.push_back(r.at_peak ? "peak" : num(r.time));
    out += fmt::format("snapshots = {}\n", fmt::join(items, ", "));
  }
}

SweepAxis read_axis(const IniDocument& doc, const std::string& prefix) {
  SweepAxis axis;
  const auto name = doc.string("sweep", prefix);
  if (!name) doc.fail("sweep", prefix, "missing");
  guarded(doc, "sweep", prefix, [&] { axis.param = parse_sweep_param(*name); });
  const auto range = doc.numbers("sweep", prefix + "_range");
  if (!range || range->size() != 2) doc.fail("sweep", prefix + "_range", "expected 'min, max'");
  axis.min = (*range)[0];
  axis.max = (*range)[1];
  axis.count = doc.count("sweep", prefix + "_count").value_or(2);
  return axis;
}

}  // namespace

RunConfig parse_run_config(std::string_view text, std::string source) {
  const auto doc = IniDocument::parse(text, std::move(source));
  doc.restrict_sections({"run", "packet", "pulse", "evolution", "grid", "output"});
  auto c = read_run(doc);
  doc.reject_unused();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_file(path), path.string());
}

SweepPlan SweepConfig::plan() const {
  SweepPlan p;
  p.base = run.scenario;
  p.axis1 = axis1;
  p.axis2 = axis2;
  p.workers = workers;
  p.echo_threshold = run.echo_threshold;
  return p;
}

SweepConfig parse_sweep_config(std::string_view text, std::string source) {
  const auto doc = IniDocument::parse(text, std::move(source));
  doc.restrict_sections({"run", "packet", "pulse", "evolution", "grid", "output", "sweep"});
  if (!doc.has_section("sweep")) throw ConfigError(fmt::format("{}: missing [sweep] section", doc.source()));
  SweepConfig c;
  c.run = read_run(doc);
  c.axis1 = read_axis(doc, "axis1");
  c.axis2 = read_axis(doc, "axis2");
  c.workers = doc.count("sweep", "workers").value_or(1);
  guarded(doc, "sweep", "", [&] { c.plan().validate(); });
  doc.reject_unused();
  return c;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  return parse_sweep_config(read_file(path), path.string());
}

LabConfig parse_lab_config(std::string_view text, std::string source) {
  const auto doc = IniDocument::parse(text, std::move(source));
  doc.restrict_sections({"lab"});
  LabConfig c;
  const auto mass_u = doc.number("lab", "mass_u");
  const auto mass_kg = doc.number("lab", "mass_kg");
  if (mass_u && mass_kg) doc.fail("lab", "mass_kg", "give either mass_u or mass_kg, not both");
  if (!mass_u && !mass_kg) doc.fail("lab", "", "missing mass_u or mass_kg");
  c.context.mass = mass_kg ? *mass_kg : *mass_u * units::kAtomicMassUnit;
  const auto t0 = doc.number("lab", "t0");
  if (!t0) doc.fail("lab", "t0", "missing");
  c.context.t0 = *t0;
  c.context.transverse_length = doc.number("lab", "a_perp");
  c.context.atom_number = doc.number("lab", "atom_number");
  c.context.kick_duration = doc.number("lab", "kick_duration");
  c.lambdas = doc.numbers("lab", "lambdas").value_or(std::vector<double>{});
  guarded(doc, "lab", "", [&] { c.context.validate(); });
  doc.reject_unused();
  return c;
}

LabConfig load_lab_config(const std::filesystem::path& path) {
  return parse_lab_config(read_file(path), path.string());
}

std::string dump(const RunConfig& config) {
  std::string out;
  dump_scenario(out, config);
  return out;
}

std::string dump(const SweepConfig& config) {
  std::string out;
  dump_scenario(out, config.run);
  out += "\n[sweep]\n";
  for (const auto& [prefix, axis] : {std::pair{"axis1", &config.axis1}, std::pair{"axis2", &config.axis2}})
    out += fmt::format("{} = {}\n{}_range = {}, {}\n{}_count = {}\n", prefix, to_string(axis->param), prefix,
                       num(axis->min), num(axis->max), prefix, axis->count);
  return out;
}

std::string dump(const LabConfig& config) {
  const auto& ctx = config.context;
  std::string out = fmt::format("[lab]\nmass_kg = {}\nt0 = {}\n", num(ctx.mass), num(ctx.t0));
  if (ctx.transverse_length) out += fmt::format("a_perp = {}\n", num(*ctx.transverse_length));
  if (ctx.atom_number) out += fmt::format("atom_number = {}\n", num(*ctx.atom_number));
  if (ctx.kick_duration) out += fmt::format("kick_duration = {}\n", num(*ctx.kick_duration));
  if (!config.lambdas.empty()) {
    std::vector<std::string> items;
    for (double l : config.lambdas) items.push_back(num(l));
    out += fmt::format("lambdas = {}\n", fmt::join(items, ", "));
  }
  return out;
}

std::string config_hash(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

const char* code_version() { return QTM_VERSION; }

std::vector<std::string> artifact_header(const std::string& dump_text) {
  std::vector<std::string> lines{fmt::format("qtm_version={}", code_version())};
  std::string_view rest = dump_text;
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    lines.emplace_back(rest.substr(0, nl));
    if (nl == std::string_view::npos) break;
    rest = rest.substr(nl + 1);
  }
  return lines;
}

}  // namespace qtm
