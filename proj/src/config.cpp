#include "dwarp/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace dwarp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream stream(s);
  std::string item;
  while (std::getline(stream, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
}

} // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str());
}

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig config;
  std::stringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
    }

    if (key == "base") {
      config.base_kind = value;
    } else if (key == "base.radius") {
      config.base_radius = parse_double(key, value);
    } else if (key == "base.period0") {
      config.base_period0 = parse_double(key, value);
    } else if (key == "base.period1") {
      config.base_period1 = parse_double(key, value);
    } else if (key == "base.half_width") {
      config.base_half_width = parse_double(key, value);
    } else if (key == "rho") {
      config.rho_kind = value;
    } else if (key == "rho.value") {
      config.rho_value = parse_double(key, value);
    } else if (key == "rho.rate") {
      config.rho_rate = parse_double(key, value);
    } else if (key == "rho.coeffs") {
      config.rho_coeffs.clear();
      for (const auto& item : split(value, ',')) {
        config.rho_coeffs.push_back(parse_double(key, item));
      }
    } else if (key == "h") {
      config.h_kind = value;
    } else if (key == "h.value") {
      config.h_value = parse_double(key, value);
    } else if (key == "h.offset") {
      config.h_offset = parse_double(key, value);
    } else if (key == "h.amplitude") {
      config.h_amplitude = parse_double(key, value);
    } else if (key == "h.axis") {
      config.h_axis = static_cast<int>(parse_long(key, value));
    } else if (key == "h.rate") {
      config.h_rate = parse_double(key, value);
    } else if (key == "h.power") {
      config.h_power = parse_double(key, value);
    } else if (key == "interval") {
      const auto parts = split(value, ',');
      if (parts.size() != 2) throw ConfigError("interval: expected t_min,t_max");
      config.t_min = parse_double(key, parts[0]);
      config.t_max = parse_double(key, parts[1]);
    } else if (key == "monotone") {
      if (value != "auto" && value != "true" && value != "false") {
        throw ConfigError("monotone: expected auto, true, or false");
      }
      config.monotone = value;
    } else if (key == "grids") {
      config.grids.clear();
      for (const auto& item : split(value, ',')) {
        config.grids.push_back(static_cast<int>(parse_long(key, item)));
      }
    } else if (key == "suites") {
      config.suites = split(value, ',');
    } else if (key == "seed") {
      const long v = parse_long(key, value);
      if (v <= 0) throw ConfigError("seed: must be positive");
      config.seed = static_cast<std::uint64_t>(v);
    } else if (key == "trials") {
      config.trials = static_cast<int>(parse_long(key, value));
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "amplitude") {
      config.amplitude = parse_double(key, value);
    } else if (key == "identities.graphs") {
      config.identity_graphs = static_cast<int>(parse_long(key, value));
    } else if (key == "flow.steps") {
      config.flow_steps = static_cast<int>(parse_long(key, value));
    } else if (key == "flow.dt") {
      config.flow_dt = parse_double(key, value);
    } else if (key == "flow.amplitude") {
      config.flow_amplitude = parse_double(key, value);
    } else if (key == "parabolicity.r_max") {
      config.parabolicity_r_max = parse_double(key, value);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  config.validate();
  return config;
}

void RunConfig::validate() const {
  static const std::vector<std::string> base_kinds{"circle", "torus2", "sphere2", "plane"};
  if (std::find(base_kinds.begin(), base_kinds.end(), base_kind) == base_kinds.end()) {
    throw ConfigError("base: unknown preset '" + base_kind + "'");
  }
  static const std::vector<std::string> rho_kinds{"constant", "exp", "cosh", "poly"};
  if (std::find(rho_kinds.begin(), rho_kinds.end(), rho_kind) == rho_kinds.end()) {
    throw ConfigError("rho: unknown preset '" + rho_kind + "'");
  }
  static const std::vector<std::string> h_kinds{"constant", "cos-offset", "2+cos", "radial-exp",
                                                "radial-pow"};
  if (std::find(h_kinds.begin(), h_kinds.end(), h_kind) == h_kinds.end()) {
    throw ConfigError("h: unknown preset '" + h_kind + "'");
  }
  if (!(t_min < t_max)) throw ConfigError("interval: t_min must be below t_max");
  if (grids.empty()) throw ConfigError("grids: need at least one grid size");
  for (std::size_t k = 0; k < grids.size(); ++k) {
    if (grids[k] < 8) throw ConfigError("grids: sizes below 8 are not supported");
    if (k > 0 && grids[k] <= grids[k - 1]) {
      throw ConfigError("grids: sizes must be strictly increasing");
    }
  }
  if (suites.empty()) throw ConfigError("suites: at least one suite must be selected");
  for (const auto& suite : suites) {
    const auto& known = known_suites();
    if (std::find(known.begin(), known.end(), suite) == known.end()) {
      throw ConfigError("suites: unknown suite '" + suite + "'");
    }
  }
  if (trials <= 0) throw ConfigError("trials: must be positive");
  if (identity_graphs < 0) throw ConfigError("identities.graphs: must be nonnegative");
  if (flow_steps <= 0) throw ConfigError("flow.steps: must be positive");
  if (parabolicity_r_max < 10.0) throw ConfigError("parabolicity.r_max: must be at least 10");
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  auto num = [](double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
  };
  kv["base"] = base_kind;
  kv["base.radius"] = num(base_radius);
  kv["base.period0"] = num(base_period0);
  kv["base.period1"] = num(base_period1);
  kv["base.half_width"] = num(base_half_width);
  kv["rho"] = rho_kind;
  kv["rho.value"] = num(rho_value);
  kv["rho.rate"] = num(rho_rate);
  {
    std::ostringstream out;
    for (std::size_t k = 0; k < rho_coeffs.size(); ++k) {
      out << (k ? "," : "") << num(rho_coeffs[k]);
    }
    kv["rho.coeffs"] = out.str();
  }
  kv["h"] = h_kind;
  kv["h.value"] = num(h_value);
  kv["h.offset"] = num(h_offset);
  kv["h.amplitude"] = num(h_amplitude);
  kv["h.axis"] = std::to_string(h_axis);
  kv["h.rate"] = num(h_rate);
  kv["h.power"] = num(h_power);
  kv["interval"] = num(t_min) + "," + num(t_max);
  kv["monotone"] = monotone;
  {
    std::ostringstream out;
    for (std::size_t k = 0; k < grids.size(); ++k) out << (k ? "," : "") << grids[k];
    kv["grids"] = out.str();
  }
  {
    std::ostringstream out;
    for (std::size_t k = 0; k < suites.size(); ++k) out << (k ? "," : "") << suites[k];
    kv["suites"] = out.str();
  }
  kv["seed"] = std::to_string(seed);
  kv["trials"] = std::to_string(trials);
  kv["amplitude"] = num(amplitude);
  kv["identities.graphs"] = std::to_string(identity_graphs);
  kv["flow.steps"] = std::to_string(flow_steps);
  kv["flow.dt"] = num(flow_dt);
  kv["flow.amplitude"] = num(flow_amplitude);
  kv["parabolicity.r_max"] = num(parabolicity_r_max);

  std::ostringstream out;
  for (const auto& [key, value] : kv) out << key << " = " << value << "\n";
  return out.str();
}

std::string RunConfig::hash() const { return fnv1a_hex(canonical()); }

std::shared_ptr<const BaseManifold> build_base(const RunConfig& config) {
  if (config.base_kind == "circle") {
    return std::make_shared<BaseManifold>(BaseManifold::circle(config.base_radius));
  }
  if (config.base_kind == "torus2") {
    return std::make_shared<BaseManifold>(
        BaseManifold::flat_torus(config.base_period0, config.base_period1));
  }
  if (config.base_kind == "sphere2") {
    return std::make_shared<BaseManifold>(BaseManifold::round_sphere(config.base_radius));
  }
  return std::make_shared<BaseManifold>(BaseManifold::euclidean_plane(config.base_half_width));
}

WarpFunction build_warp(const RunConfig& config) {
  const Interval domain{config.t_min, config.t_max};
  if (config.rho_kind == "constant") return WarpFunction::constant(config.rho_value, domain);
  if (config.rho_kind == "exp") return WarpFunction::exponential(config.rho_rate, domain);
  if (config.rho_kind == "cosh") return WarpFunction::hyperbolic_cosine(config.rho_rate, domain);
  return WarpFunction::polynomial(config.rho_coeffs, domain);
}

StaticPotential build_potential(const RunConfig& config, const BaseManifold& base) {
  if (config.h_kind == "constant") return StaticPotential::constant(config.h_value);
  if (config.h_kind == "cos-offset" || config.h_kind == "2+cos") {
    return StaticPotential::cosine_offset(base, config.h_offset, config.h_amplitude,
                                          config.h_axis);
  }
  if (config.h_kind == "radial-exp") return StaticPotential::radial_exponential(config.h_rate);
  return StaticPotential::radial_power(config.h_power);
}

SpacetimePtr build_spacetime(const RunConfig& config) {
  auto base = build_base(config);
  WarpFunction warp = build_warp(config);
  StaticPotential potential = build_potential(config, *base);
  bool monotone = false;
  if (config.monotone == "true") {
    monotone = true;
  } else if (config.monotone == "auto") {
    monotone = warp.nondecreasing_on_domain();
  }
  return std::make_shared<DoublyWarpedSpacetime>(base, std::move(warp), std::move(potential),
                                                 monotone);
}

std::string list_presets_text() {
  return "base presets:\n"
         "  circle      base.radius (default 1.0)\n"
         "  torus2      base.period0, base.period1 (default 2*pi each)\n"
         "  sphere2     base.radius (default 1.0); two stereographic charts\n"
         "  plane       base.half_width (default 6.0); truncated chart with trust region\n"
         "rho presets (warp profile on the interval):\n"
         "  constant    rho.value > 0\n"
         "  exp         rho.rate      rho(t) = exp(rate t)\n"
         "  cosh        rho.rate      rho(t) = cosh(rate t)\n"
         "  poly        rho.coeffs    rho(t) = sum c_k t^k, positive on the interval\n"
         "h presets (static potential on the base):\n"
         "  constant    h.value > 0\n"
         "  2+cos       h.offset, h.amplitude, h.axis   h = offset + amplitude cos(2 pi x/L)\n"
         "              (alias: cos-offset; circle and torus bases)\n"
         "  radial-exp  h.rate        h = exp(rate |x|)        (plane base)\n"
         "  radial-pow  h.power       h = (1 + |x|^2)^power    (plane base)\n"
         "suites: identities, rigidity, flow, counterexample, parabolicity\n";
}

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> suites{"identities", "rigidity", "flow", "counterexample",
                                               "parabolicity"};
  return suites;
}

} // namespace dwarp
