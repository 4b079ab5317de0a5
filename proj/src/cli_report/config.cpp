#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dcgrid/cli_report.hpp"

namespace dcgrid::cli {

namespace {

using Target = std::variant<double*, int*, std::string*, std::vector<double>*>;

struct Field {
  const char* section;
  const char* key;
  Target target;
};

template <class Config>
std::vector<Field> fields(Config& c) {
  return {
      {"grid", "vgn", &c.grid.vgn},
      {"grid", "vstar", &c.grid.vstar},
      {"grid", "rated_power", &c.grid.rated_power},
      {"grid", "tau", &c.grid.tau},
      {"grid", "cable_r", &c.grid.cable_r},
      {"grid", "cable_l", &c.grid.cable_l},
      {"scheme", "type", &c.scheme.type},
      {"scheme", "power_kp", &c.scheme.power_kp},
      {"scheme", "power_ki", &c.scheme.power_ki},
      {"scheme", "bus_kp", &c.scheme.bus_kp},
      {"scheme", "bus_ki", &c.scheme.bus_ki},
      {"scheme", "droop_rd", &c.scheme.droop_rd},
      {"scheme", "current_kp", &c.scheme.current_kp},
      {"scheme", "current_ki", &c.scheme.current_ki},
      {"scheme", "conv_low_kp", &c.scheme.conv_low_kp},
      {"scheme", "conv_low_ki", &c.scheme.conv_low_ki},
      {"scheme", "conv_high_kp", &c.scheme.conv_high_kp},
      {"scheme", "conv_high_ki", &c.scheme.conv_high_ki},
      {"scheme", "outer_clamp_factor", &c.scheme.outer_clamp_factor},
      {"scheme", "voltage_clamp_ratio", &c.scheme.voltage_clamp_ratio},
      {"scheme", "comm_period", &c.scheme.comm_period},
      {"scheme", "comm_delay", &c.scheme.comm_delay},
      {"scheme", "demand", &c.scheme.demand},
      {"tuning", "power_crossover", &c.tuning.power_crossover},
      {"tuning", "power_margin", &c.tuning.power_margin},
      {"tuning", "voltage_crossover", &c.tuning.voltage_crossover},
      {"tuning", "voltage_margin", &c.tuning.voltage_margin},
      {"tuning", "mode", &c.tuning.mode},
      {"tuning", "converter", &c.tuning.converter},
      {"scenario", "activation_time", &c.scenario.activation_time},
      {"scenario", "duration", &c.scenario.duration},
      {"scenario", "plant_dt", &c.scenario.plant_dt},
      {"scenario", "control_dt", &c.scenario.control_dt},
      {"scenario", "load_times", &c.scenario.load_times},
      {"scenario", "load_powers", &c.scenario.load_powers},
      {"scenario", "itae_window", &c.scenario.itae_window},
      {"scenario", "settling_band", &c.scenario.settling_band},
      {"scenario", "csv_stride", &c.scenario.csv_stride},
      {"sweep", "r_min", &c.sweep.r_min},
      {"sweep", "r_max", &c.sweep.r_max},
      {"sweep", "ratio", &c.sweep.ratio},
      {"sweep", "steps", &c.sweep.steps},
      {"sweep", "regulation_ratio", &c.sweep.regulation_ratio},
      {"sweep", "rated_current", &c.sweep.rated_current},
  };
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_double(const std::string& path, const std::string& raw) {
  const std::string text = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ValidationError(fmt::format("{}: expected a number, got '{}'", path, raw));
  }
  return v;
}

int parse_int(const std::string& path, const std::string& raw) {
  const std::string text = trim(raw);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(fmt::format("{}: expected an integer, got '{}'", path, raw));
  }
  return v;
}

std::vector<double> parse_list(const std::string& path, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  std::size_t k = 0;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_double(fmt::format("{}[{}]", path, k++), item));
  }
  if (out.empty()) {
    throw ValidationError(fmt::format("{}: expected a comma-separated list of numbers", path));
  }
  return out;
}

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) {
    throw ValidationError(fmt::format("{}: {}", path, what));
  }
}

void require_pair(const std::vector<double>& v, const std::string& path) {
  require(v.size() == 2, path, fmt::format("expected 2 values (one per converter), got {}", v.size()));
}

}  // namespace

void AppConfig::validate() const {
  require(grid.vgn > 0.0, "grid.vgn", "must be positive");
  require(grid.vstar > 0.0, "grid.vstar", "must be positive");
  require_pair(grid.rated_power, "grid.rated_power");
  require_pair(grid.tau, "grid.tau");
  require_pair(grid.cable_r, "grid.cable_r");
  require_pair(grid.cable_l, "grid.cable_l");
  grid_config(*this).validate();

  static const std::set<std::string> types{"cascade", "proposed", "conventional-low", "conventional-high",
                                           "open-loop"};
  require(types.count(scheme.type) == 1, "scheme.type",
          fmt::format("unknown scheme '{}' (cascade, conventional-low, conventional-high, open-loop)", scheme.type));
  for (auto [path, v] : {std::pair{"scheme.power_ki", scheme.power_ki}, {"scheme.bus_ki", scheme.bus_ki},
                         {"scheme.current_ki", scheme.current_ki}, {"scheme.conv_low_ki", scheme.conv_low_ki},
                         {"scheme.conv_high_ki", scheme.conv_high_ki}}) {
    require(v >= 0.0, path, "integral gain must be >= 0");
  }
  require_pair(scheme.droop_rd, "scheme.droop_rd");
  for (double rd : scheme.droop_rd) {
    require(rd >= 0.0, "scheme.droop_rd", "droop resistance must be >= 0");
  }
  require(scheme.outer_clamp_factor > 0.0, "scheme.outer_clamp_factor", "must be positive");
  require(scheme.voltage_clamp_ratio > 0.0, "scheme.voltage_clamp_ratio", "must be positive");
  require(scheme.comm_period >= 0.0, "scheme.comm_period", "must be >= 0");
  require(scheme.comm_delay >= 0.0, "scheme.comm_delay", "must be >= 0");

  require(tuning.power_crossover > 0.0, "tuning.power_crossover", "must be positive");
  require(tuning.voltage_crossover > 0.0, "tuning.voltage_crossover", "must be positive");
  require(tuning.power_margin > 0.0 && tuning.power_margin < 180.0, "tuning.power_margin", "must lie in (0, 180)");
  require(tuning.voltage_margin > 0.0 && tuning.voltage_margin < 180.0, "tuning.voltage_margin",
          "must lie in (0, 180)");
  try {
    grid::parse_voltage_plant_mode(tuning.mode);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("tuning.mode: {}", e.what()));
  }
  require(tuning.converter == 1 || tuning.converter == 2, "tuning.converter", "must be 1 or 2");

  require(scenario.duration > 0.0, "scenario.duration", "must be positive");
  require(scenario.plant_dt > 0.0, "scenario.plant_dt", "must be positive");
  require(scenario.control_dt > 0.0, "scenario.control_dt", "must be positive");
  require(scenario.activation_time >= 0.0, "scenario.activation_time", "must be >= 0");
  require(scenario.load_times.size() == scenario.load_powers.size(), "scenario.load_powers",
          "must have one entry per scenario.load_times entry");
  require(scenario.itae_window > 0.0, "scenario.itae_window", "must be positive");
  require(scenario.settling_band > 0.0, "scenario.settling_band", "must be positive");
  require(scenario.csv_stride >= 1, "scenario.csv_stride", "must be >= 1");
  scenario_for(*this, scheme.type).validate();

  require(sweep.steps >= 2, "sweep.steps", "need at least 2 steps");
  require(sweep.r_min > 0.0 && sweep.r_max > sweep.r_min, "sweep.r_min", "need 0 < r_min < r_max");
  require(sweep.ratio > 0.0, "sweep.ratio", "must be positive");
  require(sweep.regulation_ratio >= 0.0, "sweep.regulation_ratio", "must be >= 0");
  require(sweep.rated_current > 0.0, "sweep.rated_current", "must be positive");
}

AppConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(fmt::format("config: {} (line {})", e.message(), e.line()));
  }
  AppConfig c;
  const auto table = fields(c);
  std::map<std::string, std::set<std::string>> known;
  for (const auto& f : table) {
    known[f.section].insert(f.key);
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ValidationError(fmt::format("{}: key outside any section", section));
    }
    if (known.count(section) == 0) {
      throw ValidationError(fmt::format("[{}]: unknown section", section));
    }
    for (const auto& [key, node] : body) {
      if (known[section].count(key) == 0) {
        throw ValidationError(fmt::format("{}.{}: unknown key", section, key));
      }
    }
  }
  for (const auto& f : table) {
    const auto node = tree.get_child_optional(pt::ptree::path_type(std::string(f.section) + "." + f.key, '.'));
    if (!node) {
      continue;
    }
    const std::string path = fmt::format("{}.{}", f.section, f.key);
    const std::string raw = node->data();
    std::visit(
        [&](auto* target) {
          using T = std::remove_pointer_t<decltype(target)>;
          if constexpr (std::is_same_v<T, double>) {
            *target = parse_double(path, raw);
          } else if constexpr (std::is_same_v<T, int>) {
            *target = parse_int(path, raw);
          } else if constexpr (std::is_same_v<T, std::string>) {
            *target = trim(raw);
          } else {
            *target = parse_list(path, raw);
          }
        },
        f.target);
  }
  c.validate();
  return c;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(fmt::format("config: cannot read '{}'", path.string()));
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const AppConfig& config) {
  AppConfig copy = config;
  std::string out;
  std::string section;
  for (const auto& f : fields(copy)) {
    if (section != f.section) {
      section = f.section;
      out += fmt::format("{}[{}]\n", out.empty() ? "" : "\n", section);
    }
    std::visit(
        [&](auto* v) {
          using T = std::remove_pointer_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::vector<double>>) {
            out += fmt::format("{} = {}\n", f.key, fmt::join(*v, ", "));
          } else {
            out += fmt::format("{} = {}\n", f.key, *v);
          }
        },
        f.target);
  }
  return out;
}

grid::GridConfig grid_config(const AppConfig& c) {
  grid::GridConfig g;
  g.nominal_bus_voltage = c.grid.vgn;
  g.voltage_reference = c.grid.vstar;
  const std::size_t n = c.grid.rated_power.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto at = [&](const std::vector<double>& v) { return i < v.size() ? v[i] : 0.0; };
    g.converters.push_back({at(c.grid.rated_power), at(c.grid.tau), {at(c.grid.cable_r), at(c.grid.cable_l)}});
  }
  return g;
}

control::CascadeScheme cascade_scheme(const AppConfig& c) {
  const auto g = grid_config(c);
  control::CascadeScheme s;
  s.weights = control::compute_weights(g);
  for (const auto& conv : g.converters) {
    s.power_pi.push_back(power_gains(c));
    s.bus_voltage_pi.push_back(bus_gains(c));
    s.outer_clamp.push_back(c.scheme.outer_clamp_factor * conv.rated_power);
  }
  s.inner_clamp = c.scheme.voltage_clamp_ratio * c.grid.vgn;
  return s;
}

control::ConventionalScheme conventional_scheme(const AppConfig& c, ConventionalGains which) {
  control::ConventionalScheme s;
  s.droop_rd = c.scheme.droop_rd;
  s.voltage_pi = which == ConventionalGains::Low ? PiGains{c.scheme.conv_low_kp, c.scheme.conv_low_ki}
                                                 : PiGains{c.scheme.conv_high_kp, c.scheme.conv_high_ki};
  s.current_pi = {c.scheme.current_kp, c.scheme.current_ki};
  s.correction_clamp = c.scheme.voltage_clamp_ratio * c.grid.vgn;
  return s;
}

sim::Scenario scenario_for(const AppConfig& c, const std::string& scheme_type) {
  sim::Scenario s;
  s.name = scheme_type;
  s.grid = grid_config(c);
  if (scheme_type == "cascade" || scheme_type == "proposed") {
    s.scheme = cascade_scheme(c);
  } else if (scheme_type == "conventional-low") {
    s.scheme = conventional_scheme(c, ConventionalGains::Low);
  } else if (scheme_type == "conventional-high") {
    s.scheme = conventional_scheme(c, ConventionalGains::High);
  } else if (scheme_type == "open-loop") {
    s.scheme = sim::OpenLoop{};
  } else {
    throw ValidationError(fmt::format("scheme.type: unknown scheme '{}'", scheme_type));
  }
  s.load.events.clear();
  for (std::size_t k = 0; k < c.scenario.load_times.size() && k < c.scenario.load_powers.size(); ++k) {
    s.load.events.push_back({c.scenario.load_times[k], c.scenario.load_powers[k]});
  }
  s.activation_time = c.scenario.activation_time;
  s.duration = c.scenario.duration;
  s.plant_dt = c.scenario.plant_dt;
  s.control_dt = c.scenario.control_dt;
  s.comm_period = c.scheme.comm_period;
  s.comm_delay = c.scheme.comm_delay;
  s.demand = c.scheme.demand;
  return s;
}

stability::ImpedanceSweep impedance_sweep(const AppConfig& c) {
  return {c.sweep.r_min, c.sweep.r_max, c.sweep.ratio, static_cast<std::size_t>(std::max(c.sweep.steps, 0))};
}

grid::VoltagePlantMode plant_mode(const AppConfig& c) { return grid::parse_voltage_plant_mode(c.tuning.mode); }

PiGains power_gains(const AppConfig& c) { return {c.scheme.power_kp, c.scheme.power_ki}; }

PiGains bus_gains(const AppConfig& c) { return {c.scheme.bus_kp, c.scheme.bus_ki}; }

}  // namespace dcgrid::cli
