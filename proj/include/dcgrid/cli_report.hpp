#pragma once

// Configuration, orchestration and result files for the dcgrid-lab tool.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dcgrid/control_schemes.hpp"
#include "dcgrid/grid_model.hpp"
#include "dcgrid/loop_tuner.hpp"
#include "dcgrid/sim_engine.hpp"
#include "dcgrid/stability_analysis.hpp"

namespace dcgrid::cli {

inline constexpr const char* kToolVersion = "0.1.0";

struct GridSection {
  double vgn = 400.0;
  double vstar = 400.0;
  std::vector<double> rated_power{2000.0, 1000.0};
  std::vector<double> tau{0.005, 0.005};
  std::vector<double> cable_r{0.5, 0.5};
  std::vector<double> cable_l{0.003, 0.003};
};

struct SchemeSection {
  std::string type = "cascade";  // cascade | conventional-low | conventional-high | open-loop
  double power_kp = 0.001;
  double power_ki = 0.130;
  double bus_kp = 142.9;
  double bus_ki = 563.8;
  std::vector<double> droop_rd{0.5, 0.5};
  double current_kp = 0.4;
  double current_ki = 52.0;
  double conv_low_kp = 0.2;
  double conv_low_ki = 1.0;
  double conv_high_kp = 1.0;
  double conv_high_ki = 20.0;
  double outer_clamp_factor = 2.0;    // × rated power
  double voltage_clamp_ratio = 0.1;   // × V_gn
  double comm_period = 1e-3;
  double comm_delay = 1e-3;
  double demand = 0.0;
};

struct TuningSection {
  double power_crossover = 100.0;
  double power_margin = 70.0;
  double voltage_crossover = 10.0;
  double voltage_margin = 70.0;
  std::string mode = "as-written";
  int converter = 1;  // 1-based
};

struct ScenarioSection {
  double activation_time = 5.0;
  double duration = 25.0;
  double plant_dt = 1e-4;
  double control_dt = 1e-3;
  std::vector<double> load_times{0.0, 20.0};
  std::vector<double> load_powers{2000.0, 6000.0};
  double itae_window = 2.0;
  double settling_band = 2.0;  // percent
  int csv_stride = 1;          // write every n-th plant step
};

struct SweepSection {
  double r_min = 0.1;
  double r_max = 2.0;
  double ratio = 0.5 / 0.003;
  int steps = 50;
  double regulation_ratio = 0.05;
  double rated_current = 10.0;
};

struct AppConfig {
  GridSection grid;
  SchemeSection scheme;
  TuningSection tuning;
  ScenarioSection scenario;
  SweepSection sweep;

  /// Throws ValidationError naming the field as "section.key".
  void validate() const;
};

/// INI text with sections [grid] [scheme] [tuning] [scenario] [sweep]; '#' and ';' comments;
/// list values comma-separated. Unknown sections or keys are errors.
AppConfig parse_config(const std::string& text);
AppConfig load_config(const std::filesystem::path& path);
/// Canonical text of every effective setting; parse_config(render_config(c)) reproduces c.
std::string render_config(const AppConfig& config);

grid::GridConfig grid_config(const AppConfig& c);
control::CascadeScheme cascade_scheme(const AppConfig& c);
enum class ConventionalGains { Low, High };
control::ConventionalScheme conventional_scheme(const AppConfig& c, ConventionalGains which);
/// Scenario for a scheme label: cascade/proposed, conventional-low, conventional-high, open-loop.
sim::Scenario scenario_for(const AppConfig& c, const std::string& scheme_type);
stability::ImpedanceSweep impedance_sweep(const AppConfig& c);
grid::VoltagePlantMode plant_mode(const AppConfig& c);
PiGains power_gains(const AppConfig& c);
PiGains bus_gains(const AppConfig& c);

struct RunManifest {
  std::string config_path;
  std::string subcommand;
  std::string output_dir;
  bool deterministic = true;
  std::string version = kToolVersion;
  std::string config_sha256;
};

std::string sha256_hex(const std::string& data);

struct ComparisonRow {
  std::string case_label;
  std::string event_label;
  double event_time = 0.0;
  double itae_v = 0.0;
  double itae_i = 0.0;
  bool settled = false;
  double settling_v = 0.0;
  bool failed = false;
  std::string failure;
};

struct OrderingCheck {
  std::string description;
  bool holds = false;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;  // events × {conventional-low, conventional-high, proposed}
  std::vector<OrderingCheck> orderings;
  bool complete = true;
};

/// Events scored by the comparison: the activation and every later load event.
std::vector<std::pair<std::string, double>> comparison_events(const AppConfig& c);
ComparisonTable compare(const AppConfig& c);

struct CommandOptions {
  std::string command;
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::string> mode;
  std::string plant = "power";
  int converter = 1;
};

/// Runs a subcommand; returns the process exit code (0 ok, 1 validation, 2 numerical).
int run_command(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace dcgrid::cli
