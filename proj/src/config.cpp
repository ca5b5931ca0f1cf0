#include "sta/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sta {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct RawValue {
  std::string text;
  int line;
};

using RawTable = std::map<std::string, RawValue>;  // "section.key"

double as_number(const RawValue& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v.text, &pos);
    if (pos != v.text.size()) throw std::invalid_argument("");
    return d;
  } catch (...) {
    throw std::runtime_error("config line " + std::to_string(v.line) +
                             ": expected a number, got '" + v.text + "'");
  }
}

int as_int(const RawValue& v) {
  double d = as_number(v);
  if (d != std::floor(d))
    throw std::runtime_error("config line " + std::to_string(v.line) +
                             ": expected an integer");
  return static_cast<int>(d);
}

bool as_bool(const RawValue& v) {
  if (v.text == "true") return true;
  if (v.text == "false") return false;
  throw std::runtime_error("config line " + std::to_string(v.line) +
                           ": expected true/false");
}

std::string as_string(const RawValue& v) {
  if (v.text.size() >= 2 && v.text.front() == '"' && v.text.back() == '"')
    return v.text.substr(1, v.text.size() - 2);
  throw std::runtime_error("config line " + std::to_string(v.line) +
                           ": expected a quoted string");
}

std::vector<double> as_array(const RawValue& v) {
  if (v.text.size() < 2 || v.text.front() != '[' || v.text.back() != ']')
    throw std::runtime_error("config line " + std::to_string(v.line) +
                             ": expected [a, b, ...]");
  std::vector<double> out;
  std::string inner = v.text.substr(1, v.text.size() - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(as_number(RawValue{item, v.line}));
  }
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  RawTable raw;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = std::string::npos;
    bool in_quote = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_quote = !in_quote;
      if (line[i] == '#' && !in_quote) {
        hash = i;
        break;
      }
    }
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    std::string full = section.empty() ? key : section + "." + key;
    if (raw.count(full))
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": duplicate key '" + full + "'");
    raw[full] = RawValue{val, lineno};
  }

  ExperimentConfig c;
  auto take = [&](const std::string& key) -> std::optional<RawValue> {
    auto it = raw.find(key);
    if (it == raw.end()) return std::nullopt;
    RawValue v = it->second;
    raw.erase(it);
    return v;
  };

  if (auto v = take("schema_version")) c.schema_version = as_int(*v);
  if (c.schema_version != 1)
    throw std::runtime_error("config: unsupported schema_version " +
                             std::to_string(c.schema_version));

  if (auto v = take("units.system")) c.unit_system = as_string(*v);
  if (c.unit_system != "natural" && c.unit_system != "cgs")
    throw std::runtime_error("config: units.system must be natural or cgs");

  if (auto v = take("system.potential")) c.potential = as_string(*v);
  if (auto v = take("system.mass")) c.mass = as_number(*v);
  if (auto v = take("system.hbar")) c.hbar = as_number(*v);
  if (auto v = take("system.omega")) c.omega = as_number(*v);
  if (auto v = take("system.quartic_g")) c.quartic_g = as_number(*v);
  if (auto v = take("system.horizon")) c.horizon = as_number(*v);

  if (auto v = take("state.width")) c.width = as_number(*v);
  if (auto v = take("state.center")) c.center = as_number(*v);
  if (auto v = take("state.momentum")) c.momentum = as_number(*v);

  if (auto v = take("coarse.center")) c.interval_center = as_number(*v);
  if (auto v = take("coarse.width")) c.interval_width = as_number(*v);
  if (auto v = take("coarse.x_min")) c.partition_x_min = as_number(*v);
  if (auto v = take("coarse.x_max")) c.partition_x_max = as_number(*v);
  if (auto v = take("coarse.cells")) c.partition_cells = as_int(*v);

  if (auto v = take("grid.x_min")) c.grid_x_min = as_number(*v);
  if (auto v = take("grid.x_max")) c.grid_x_max = as_number(*v);
  if (auto v = take("grid.n")) c.grid_n = as_int(*v);

  if (auto v = take("plan.n_slices")) c.n_slices = as_int(*v);
  if (auto v = take("plan.richardson")) c.richardson = as_bool(*v);
  if (auto v = take("plan.evo_x_min")) c.evo_x_min = as_number(*v);
  if (auto v = take("plan.evo_x_max")) c.evo_x_max = as_number(*v);
  if (auto v = take("plan.evo_n")) c.evo_n = as_int(*v);

  if (auto v = take("kquad.k_max")) c.k_max = as_number(*v);
  if (auto v = take("kquad.rel_tol")) c.kq_rel_tol = as_number(*v);
  if (auto v = take("kquad.initial_panels")) c.kq_initial_panels = as_int(*v);
  if (auto v = take("kquad.max_panels")) c.kq_max_panels = as_int(*v);
  if (auto v = take("kquad.slices_at_kmax"))
    c.kq_slices_at_kmax = as_int(*v);

  if (auto v = take("sweep.hbar")) c.sweep_hbar = as_array(*v);
  if (auto v = take("sweep.delta")) c.sweep_delta = as_array(*v);

  if (auto v = take("output.prefix")) c.output_prefix = as_string(*v);

  if (!raw.empty()) {
    std::ostringstream os;
    os << "config: unknown key(s):";
    for (const auto& [k, v] : raw) os << " '" << k << "' (line " << v.line
                                      << ")";
    throw std::runtime_error(os.str());
  }
  if (c.potential != "free" && c.potential != "harmonic" &&
      c.potential != "quartic")
    throw std::runtime_error("config: system.potential must be free, "
                             "harmonic or quartic");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

SystemParams ExperimentConfig::make_params() const {
  return make_params(hbar);
}

SystemParams ExperimentConfig::make_params(double hb) const {
  double om = potential == "harmonic" ? omega : 0.0;
  return SystemParams(mass, hb, om, horizon);
}

GaussianState ExperimentConfig::make_state() const {
  return GaussianState(width, center, momentum);
}

GridSpec ExperimentConfig::make_grid() const {
  return GridSpec(grid_x_min, grid_x_max, grid_n);
}

oracle::PotentialSpec ExperimentConfig::make_potential() const {
  if (potential == "harmonic") return oracle::PotentialSpec::harmonic(omega);
  if (potential == "quartic")
    return oracle::PotentialSpec::quartic(quartic_g);
  return oracle::PotentialSpec::free_particle();
}

oracle::EvolutionPlan ExperimentConfig::make_plan() const {
  double span = grid_x_max - grid_x_min;
  GridSpec evo(evo_x_min.value_or(grid_x_min - 0.5 * span),
               evo_x_max.value_or(grid_x_max + 0.5 * span),
               evo_n.value_or(2 * grid_n));
  return oracle::EvolutionPlan{evo, n_slices, richardson};
}

oracle::KQuadSpec ExperimentConfig::make_kquad() const {
  oracle::KQuadSpec kq;
  kq.k_max = k_max;
  kq.rel_tol = kq_rel_tol;
  kq.initial_panels = kq_initial_panels;
  kq.max_panels = kq_max_panels;
  kq.slices_at_kmax = kq_slices_at_kmax;
  return kq;
}

Interval ExperimentConfig::make_interval() const {
  if (!interval_center || !interval_width)
    throw std::runtime_error("config: [coarse] needs center and width");
  return Interval(*interval_center, *interval_width);
}

Partition ExperimentConfig::make_partition() const {
  if (!partition_x_min || !partition_x_max || !partition_cells)
    throw std::runtime_error("config: [coarse] needs x_min, x_max, cells");
  return sta::make_partition(*partition_x_min, *partition_x_max,
                             *partition_cells);
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os << "schema_version = " << schema_version << "\n\n";
  os << "[units]\nsystem = \"" << unit_system << "\"\n\n";
  os << "[system]\npotential = \"" << potential << "\"\n"
     << "mass = " << fmt(mass) << "\nhbar = " << fmt(hbar) << "\nomega = "
     << fmt(omega) << "\nquartic_g = " << fmt(quartic_g) << "\nhorizon = "
     << fmt(horizon) << "\n\n";
  os << "[state]\nwidth = " << fmt(width) << "\ncenter = " << fmt(center)
     << "\nmomentum = " << fmt(momentum) << "\n\n";
  os << "[coarse]\n";
  if (interval_center) os << "center = " << fmt(*interval_center) << "\n";
  if (interval_width) os << "width = " << fmt(*interval_width) << "\n";
  if (partition_x_min) os << "x_min = " << fmt(*partition_x_min) << "\n";
  if (partition_x_max) os << "x_max = " << fmt(*partition_x_max) << "\n";
  if (partition_cells) os << "cells = " << *partition_cells << "\n";
  os << "\n[grid]\nx_min = " << fmt(grid_x_min) << "\nx_max = "
     << fmt(grid_x_max) << "\nn = " << grid_n << "\n\n";
  os << "[plan]\nn_slices = " << n_slices << "\nrichardson = "
     << (richardson ? "true" : "false") << "\n";
  if (evo_x_min) os << "evo_x_min = " << fmt(*evo_x_min) << "\n";
  if (evo_x_max) os << "evo_x_max = " << fmt(*evo_x_max) << "\n";
  if (evo_n) os << "evo_n = " << *evo_n << "\n";
  os << "\n[kquad]\nk_max = " << fmt(k_max) << "\nrel_tol = "
     << fmt(kq_rel_tol) << "\ninitial_panels = " << kq_initial_panels
     << "\nmax_panels = " << kq_max_panels << "\nslices_at_kmax = "
     << kq_slices_at_kmax << "\n\n";
  os << "[sweep]\n";
  auto arr = [&](const char* k, const std::vector<double>& v) {
    if (v.empty()) return;
    os << k << " = [";
    for (size_t i = 0; i < v.size(); ++i)
      os << (i ? ", " : "") << fmt(v[i]);
    os << "]\n";
  };
  arr("hbar", sweep_hbar);
  arr("delta", sweep_delta);
  os << "\n[output]\nprefix = \"" << output_prefix << "\"\n";
  return os.str();
}

uint64_t ExperimentConfig::hash() const {
  std::string s = serialize();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace sta
