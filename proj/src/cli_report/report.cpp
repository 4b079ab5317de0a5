#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "dcgrid/cli_report.hpp"

namespace dcgrid::cli {

using nlohmann::ordered_json;

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) {
    hex += fmt::format("{:02x}", digest[k]);
  }
  return hex;
}

namespace {

bool verbose() {
  const char* v = std::getenv("DCGRID_LAB_VERBOSE");
  return v != nullptr && std::string(v) != "0" && std::string(v) != "";
}

void note(std::ostream& err, const std::string& msg) {
  if (verbose()) {
    err << "[dcgrid-lab] " << msg << '\n';
  }
}

ordered_json manifest_json(const RunManifest& m) {
  return {{"tool", "dcgrid-lab"},         {"version", m.version},        {"subcommand", m.subcommand},
          {"config_path", m.config_path}, {"output_dir", m.output_dir}, {"config_sha256", m.config_sha256},
          {"deterministic", m.deterministic}};
}

std::string manifest_csv(const RunManifest& m) {
  return fmt::format(
      "# tool: dcgrid-lab\n# version: {}\n# subcommand: {}\n# config_path: {}\n# output_dir: {}\n"
      "# config_sha256: {}\n# deterministic: true\n",
      m.version, m.subcommand, m.config_path, m.output_dir, m.config_sha256);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  }
  f << content;
  if (!f) {
    throw ValidationError(fmt::format("failed writing '{}'", path.string()));
  }
}

void write_json(const std::filesystem::path& path, const RunManifest& m, ordered_json body) {
  ordered_json doc;
  doc["manifest"] = manifest_json(m);
  for (auto& [k, v] : body.items()) {
    doc[k] = v;
  }
  write_file(path, doc.dump(2) + "\n");
}

/// Non-finite values become null so the JSON stays valid.
ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json gains_json(const PiGains& g) { return {{"kp", g.kp}, {"ki", g.ki}}; }

ordered_json tuned_json(const tuner::TunedController& t, const tuner::VerificationReport& v) {
  return {{"gains", gains_json(t.gains)},
          {"achieved_crossover", t.achieved_crossover},
          {"achieved_margin", t.achieved_margin},
          {"plant_phase_deg", t.plant_phase_deg},
          {"controller_phase_deg", t.controller_phase_deg},
          {"verification",
           {{"ok", v.ok}, {"crossover", v.crossover}, {"margin", v.margin}, {"crossover_delta", v.crossover_delta},
            {"margin_delta", v.margin_delta}}}};
}

std::string bode_csv(const RunManifest& m, const tf::TransferFunction& g, const std::optional<tuner::VerificationReport>& margin,
                     double margin_phase) {
  const auto grid = tf::log_space(1e-2, 1e5, 400);
  std::string out = manifest_csv(m);
  out += "kind,omega,mag_db,phase_deg,flagged\n";
  for (const auto& p : tf::freq_response(g, grid)) {
    out += fmt::format("sample,{},{},{},{}\n", p.omega, p.magnitude_db, p.phase_deg, p.flagged ? 1 : 0);
  }
  if (margin && margin->ok) {
    out += fmt::format("margin,{},{},{},0\n", margin->crossover, 0.0, margin_phase);
  }
  return out;
}

struct Context {
  AppConfig config;
  RunManifest manifest;
  std::filesystem::path out;
};

Context prepare(const CommandOptions& o, std::ostream& err) {
  Context ctx;
  ctx.config = o.config_path ? load_config(*o.config_path) : AppConfig{};
  if (o.mode) {
    grid::parse_voltage_plant_mode(*o.mode);
    ctx.config.tuning.mode = *o.mode;
  }
  ctx.config.validate();
  const std::string rendered = render_config(ctx.config);
  ctx.manifest.config_path = o.config_path ? o.config_path->string() : "<built-in defaults>";
  ctx.manifest.subcommand = o.command;
  ctx.manifest.output_dir = o.out_dir.string();
  ctx.manifest.config_sha256 = sha256_hex(rendered);
  ctx.out = o.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(ctx.out, ec);
  if (ec || !std::filesystem::is_directory(ctx.out)) {
    throw ValidationError(fmt::format("--out: cannot create directory '{}'", ctx.out.string()));
  }
  write_file(ctx.out / "effective_config.ini",
             fmt::format("# dcgrid-lab {} effective configuration\n{}", kToolVersion, rendered));
  note(err, fmt::format("config sha256 {}", ctx.manifest.config_sha256));
  return ctx;
}

// ---------------------------------------------------------------------------

int cmd_tune(const Context& ctx, std::ostream& out) {
  const auto& c = ctx.config;
  const auto g = grid_config(c);
  const std::size_t i = static_cast<std::size_t>(c.tuning.converter - 1);
  const auto mode = plant_mode(c);
  const tuner::TuningSpec pspec{c.tuning.power_crossover, c.tuning.power_margin};
  const tuner::TuningSpec vspec{c.tuning.voltage_crossover, c.tuning.voltage_margin};

  const auto pplant = grid::power_plant_tf(g, i);
  const auto power = tuner::design_pi(pplant, pspec);
  const auto pver = tuner::verify_design(pplant, power.gains, pspec);
  out << fmt::format("power loop   (converter {}): kp = {:.6g}  ki = {:.6g}  crossover {:.4f} rad/s  margin {:.3f} deg\n",
                     c.tuning.converter, power.gains.kp, power.gains.ki, power.achieved_crossover, power.achieved_margin);

  ordered_json body;
  body["converter"] = c.tuning.converter;
  body["power_loop"] = tuned_json(power, pver);
  body["power_loop"]["spec"] = {{"crossover", pspec.crossover_omega}, {"margin", pspec.phase_margin}};
  body["voltage_loop"] = {{"spec", {{"crossover", vspec.crossover_omega}, {"margin", vspec.phase_margin}}},
                          {"selected_mode", grid::to_string(mode)}};

  // The voltage loop is designed on the freshly tuned power loop; both plant modes are recorded.
  std::optional<tuner::TunedController> selected;
  std::optional<tuner::InfeasibleSpecError> selected_error;
  for (auto m : {grid::VoltagePlantMode::AsWritten, grid::VoltagePlantMode::ClosedInner}) {
    const auto vplant = grid::voltage_loop_plant_tf(g, i, power.gains, m);
    const std::string label = grid::to_string(m);
    try {
      const auto v = tuner::design_pi(vplant, vspec);
      body["voltage_loop"]["modes"][label] = tuned_json(v, tuner::verify_design(vplant, v.gains, vspec));
      out << fmt::format("voltage loop [{}]: kp = {:.6g}  ki = {:.6g}  crossover {:.4f} rad/s  margin {:.3f} deg\n",
                         label, v.gains.kp, v.gains.ki, v.achieved_crossover, v.achieved_margin);
      if (m == mode) {
        selected = v;
      }
    } catch (const tuner::InfeasibleSpecError& e) {
      body["voltage_loop"]["modes"][label] = {{"infeasible", e.what()},
                                              {"achievable_margin_low", e.margin_low()},
                                              {"achievable_margin_high", e.margin_high()}};
      out << fmt::format("voltage loop [{}]: infeasible: {}\n", label, e.what());
      if (m == mode) {
        selected_error = e;
      }
    }
  }
  write_file(ctx.out / "bode_power_loop.csv",
             bode_csv(ctx.manifest, tf::tf_series(pi_tf(power.gains), pplant), pver,
                      pver.ok ? pver.margin - 180.0 : 0.0));
  if (selected) {
    const auto vplant = grid::voltage_loop_plant_tf(g, i, power.gains, mode);
    const auto vver = tuner::verify_design(vplant, selected->gains, vspec);
    write_file(ctx.out / "bode_voltage_loop.csv",
               bode_csv(ctx.manifest, tf::tf_series(pi_tf(selected->gains), vplant), vver,
                        vver.ok ? vver.margin - 180.0 : 0.0));
  }
  write_json(ctx.out / "tune.json", ctx.manifest, body);
  if (selected_error) {
    throw *selected_error;
  }
  return 0;
}

std::string timeseries_csv(const RunManifest& m, const sim::SimResult& r, int stride) {
  std::string out = manifest_csv(m);
  out += fmt::format("# scheme: {}\n", r.scheme);
  out += "t,dP1,dP2,dVg,dV1,dV2,I1,I2,Iref1,Iref2,Vref1,Vref2,outer1,outer2,inner1,inner2,load\n";
  const auto s = static_cast<std::size_t>(stride);
  for (std::size_t k = 0; k < r.size(); k += s) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.t[k], r.p1[k], r.p2[k], r.vg[k], r.v1[k],
                       r.v2[k], r.i1[k], r.i2[k], r.iref1[k], r.iref2[k], r.vref1[k], r.vref2[k], r.outer1[k],
                       r.outer2[k], r.inner1[k], r.inner2[k], r.load[k]);
  }
  return out;
}

// Settling window for an event: up to the next event or the end of the run.
double window_end(const std::vector<std::pair<std::string, double>>& events, std::size_t k, double duration) {
  return k + 1 < events.size() ? events[k + 1].second : duration;
}

ordered_json event_metrics(const AppConfig& c, const sim::SimResult& r, std::ostream* out) {
  ordered_json rows = ordered_json::array();
  const auto events = comparison_events(c);
  const double duration = r.t.back();
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& [label, t0] = events[k];
    ordered_json row{{"event", label}, {"time", t0}};
    const double wend = std::min(t0 + c.scenario.itae_window, duration);
    if (wend - t0 < c.scenario.itae_window - 1e-9) {
      row["itae_error"] = "ITAE window exceeds the simulated horizon";
    } else {
      const auto rep = sim::itae_report(r, t0, c.scenario.itae_window);
      row["itae_v"] = rep.itae_v;
      row["itae_i"] = rep.itae_i;
      row["window_T"] = rep.window_t;
    }
    const double end = window_end(events, k, duration);
    const auto st = sim::settling_time(r.t, r.vg, 0.0, c.scenario.settling_band, t0, end);
    row["settled"] = st.settled;
    row["settling_v"] = st.settled ? ordered_json(st.time) : ordered_json(nullptr);
    // Steady values just before the window closes.
    const auto idx = std::min(r.size() - 1, static_cast<std::size_t>(std::llround(end / (r.t[1] - r.t[0]))) - 1);
    row["end_dVg"] = r.vg[idx];
    row["end_sharing_ratio"] = num(r.p1[idx] / r.p2[idx]);
    if (out != nullptr) {
      *out << fmt::format("  {:<16} t = {:>6.2f} s  settling(dVg, {}%) = {}  dVg_end = {:+.4g} V  P1/P2 = {:.4f}\n",
                          label, t0, c.scenario.settling_band,
                          st.settled ? fmt::format("{:.4f} s", st.time) : std::string("not settled"), r.vg[idx],
                          r.p1[idx] / r.p2[idx]);
    }
    rows.push_back(row);
  }
  return rows;
}

int cmd_simulate(const Context& ctx, std::ostream& out, std::ostream& err) {
  const auto& c = ctx.config;
  const auto sc = scenario_for(c, c.scheme.type);
  note(err, fmt::format("simulating {} for {} s", c.scheme.type, sc.duration));
  const auto r = sim::run(sc);
  write_file(ctx.out / "timeseries.csv", timeseries_csv(ctx.manifest, r, c.scenario.csv_stride));
  out << fmt::format("simulated {} ({} samples)\n", c.scheme.type, r.size());
  ordered_json body;
  body["scheme"] = c.scheme.type;
  body["events"] = event_metrics(c, r, &out);
  write_json(ctx.out / "itae.json", ctx.manifest, body);
  return 0;
}

int cmd_compare(const Context& ctx, std::ostream& out) {
  const auto table = compare(ctx.config);
  std::string csv = manifest_csv(ctx.manifest);
  csv += "case,event,event_time,itae_v,itae_i,settled,settling_v,status\n";
  ordered_json rows = ordered_json::array();
  out << fmt::format("{:<18} {:<16} {:>12} {:>12} {:>12}\n", "case", "event", "ITAE_V", "ITAE_I", "settling_V");
  for (const auto& row : table.rows) {
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", row.case_label, row.event_label, row.event_time, row.itae_v,
                       row.itae_i, row.settled ? 1 : 0, row.settled ? fmt::format("{}", row.settling_v) : "",
                       row.failed ? "failed" : "ok");
    rows.push_back({{"case", row.case_label},
                    {"event", row.event_label},
                    {"event_time", row.event_time},
                    {"itae_v", row.failed ? ordered_json(nullptr) : num(row.itae_v)},
                    {"itae_i", row.failed ? ordered_json(nullptr) : num(row.itae_i)},
                    {"settled", row.settled},
                    {"settling_v", row.settled ? ordered_json(row.settling_v) : ordered_json(nullptr)},
                    {"status", row.failed ? "failed: " + row.failure : "ok"}});
    out << fmt::format("{:<18} {:<16} {:>12.5g} {:>12.5g} {:>12}\n", row.case_label, row.event_label, row.itae_v,
                       row.itae_i, row.failed ? "FAILED" : (row.settled ? fmt::format("{:.4f}", row.settling_v)
                                                                        : std::string("not settled")));
  }
  ordered_json checks = ordered_json::array();
  for (const auto& o : table.orderings) {
    checks.push_back({{"ordering", o.description}, {"holds", o.holds}});
    out << fmt::format("[{}] {}\n", o.holds ? "holds" : "VIOLATED", o.description);
  }
  write_file(ctx.out / "comparison.csv", csv);
  write_json(ctx.out / "comparison.json", ctx.manifest,
             {{"complete", table.complete}, {"rows", rows}, {"orderings", checks}});
  if (!table.complete) {
    throw NumericalError("one or more comparison cases failed; see comparison.json");
  }
  return 0;
}

std::string locus_csv(const RunManifest& m, const stability::LocusResult& r) {
  std::string out = manifest_csv(m);
  out += "R1,L1,trajectory,pole_re,pole_im,stable,pairing_ambiguous\n";
  for (const auto& s : r.steps) {
    for (std::size_t j = 0; j < s.poles.size(); ++j) {
      out += fmt::format("{},{},{},{},{},{},{}\n", s.r1, s.l1, j, s.poles[j].real(), s.poles[j].imag(),
                         s.stable ? 1 : 0, s.pairing_ambiguous ? 1 : 0);
    }
  }
  return out;
}

ordered_json locus_json(const stability::LocusResult& r) {
  std::size_t unstable = 0;
  for (const auto& s : r.steps) {
    unstable += s.stable ? 0 : 1;
  }
  const auto& d = r.terminal_dominant_pole;
  return {{"all_stable", r.all_stable},
          {"unstable_steps", unstable},
          {"terminal_r1", r.steps.back().r1},
          {"terminal_dominant_pole", {{"re", d.real()}, {"im", d.imag()}, {"abs", std::abs(d)}}}};
}

int cmd_rootlocus(const Context& ctx, std::ostream& out) {
  const auto& c = ctx.config;
  const auto g = grid_config(c);
  const auto sweep = impedance_sweep(c);
  const auto mode = plant_mode(c);
  const auto power = stability::sweep_power_loop(g, power_gains(c), sweep);
  const auto voltage = stability::sweep_voltage_loop(g, power_gains(c), bus_gains(c), sweep, mode);
  write_file(ctx.out / "rootlocus_power.csv", locus_csv(ctx.manifest, power));
  write_file(ctx.out / "rootlocus_voltage.csv", locus_csv(ctx.manifest, voltage));
  const double rmax = stability::max_resistance_bound(g, c.sweep.regulation_ratio, c.sweep.rated_current);
  write_json(ctx.out / "rootlocus.json", ctx.manifest,
             {{"mode", grid::to_string(mode)},
              {"max_resistance_bound", rmax},
              {"power_loop", locus_json(power)},
              {"voltage_loop", locus_json(voltage)}});
  const auto pd = power.terminal_dominant_pole;
  const auto vd = voltage.terminal_dominant_pole;
  out << fmt::format("R1 bound from regulation: {:.4g} ohm\n", rmax);
  out << fmt::format("power loop:   {}  terminal dominant pole {:.4f}{:+.4f}i at R1 = {:.4g} ohm\n",
                     power.all_stable ? "stable at every step" : "UNSTABLE steps present", pd.real(), pd.imag(),
                     power.steps.back().r1);
  out << fmt::format("voltage loop: {}  terminal dominant pole {:.4f}{:+.4f}i (|p| = {:.4f}) at R1 = {:.4g} ohm\n",
                     voltage.all_stable ? "stable at every step" : "UNSTABLE steps present", vd.real(), vd.imag(),
                     std::abs(vd), voltage.steps.back().r1);
  return 0;
}

int cmd_bode(const Context& ctx, const CommandOptions& o, std::ostream& out) {
  const auto& c = ctx.config;
  const auto g = grid_config(c);
  if (o.converter != 1 && o.converter != 2) {
    throw ValidationError("--converter must be 1 or 2");
  }
  const std::size_t i = static_cast<std::size_t>(o.converter - 1);
  const auto mode = plant_mode(c);
  tf::TransferFunction sel;
  std::optional<tuner::VerificationReport> margin;
  if (o.plant == "power") {
    sel = grid::power_plant_tf(g, i);
  } else if (o.plant == "voltage") {
    sel = grid::voltage_loop_plant_tf(g, i, power_gains(c), mode);
  } else if (o.plant == "unity") {
    sel = tf::TransferFunction::gain(1.0);
  } else if (o.plant == "power-loop") {
    sel = tf::tf_series(pi_tf(power_gains(c)), grid::power_plant_tf(g, i));
    margin = tuner::verify_design(grid::power_plant_tf(g, i), power_gains(c),
                                  {c.tuning.power_crossover, c.tuning.power_margin});
  } else if (o.plant == "voltage-loop") {
    const auto vplant = grid::voltage_loop_plant_tf(g, i, power_gains(c), mode);
    sel = tf::tf_series(pi_tf(bus_gains(c)), vplant);
    margin = tuner::verify_design(vplant, bus_gains(c), {c.tuning.voltage_crossover, c.tuning.voltage_margin});
  } else {
    throw ValidationError(
        fmt::format("--plant: unknown selector '{}' (power, voltage, unity, power-loop, voltage-loop)", o.plant));
  }
  const double margin_phase = margin && margin->ok ? margin->margin - 180.0 : 0.0;
  write_file(ctx.out / fmt::format("bode_{}.csv", o.plant), bode_csv(ctx.manifest, sel, margin, margin_phase));
  ordered_json body{{"plant", o.plant}, {"converter", o.converter}, {"mode", grid::to_string(mode)}};
  try {
    const double wc = tf::gain_crossover(sel);
    body["gain_crossover"] = wc;
    body["phase_margin"] = 180.0 + tf::unwrapped_phase_at(sel, wc);
    out << fmt::format("{}: 0 dB crossover at {:.4f} rad/s, phase margin {:.3f} deg\n", o.plant, wc,
                       180.0 + tf::unwrapped_phase_at(sel, wc));
  } catch (const tf::NoCrossoverError& e) {
    body["gain_crossover"] = nullptr;
    body["note"] = e.what();
    out << fmt::format("{}: {}\n", o.plant, e.what());
  }
  if (sel.dc_gain() != 0.0 && std::isfinite(sel.dc_gain())) {
    try {
      body["bandwidth_3db"] = tf::bandwidth(sel);
    } catch (const NumericalError&) {
      body["bandwidth_3db"] = nullptr;
    }
  }
  if (margin) {
    body["verification"] = {{"ok", margin->ok}, {"crossover", margin->crossover}, {"margin", margin->margin}};
  }
  write_json(ctx.out / fmt::format("bode_{}.json", o.plant), ctx.manifest, body);
  return 0;
}

}  // namespace

std::vector<std::pair<std::string, double>> comparison_events(const AppConfig& c) {
  std::vector<std::pair<std::string, double>> ev{{"activation", c.scenario.activation_time}};
  for (std::size_t k = 0; k < c.scenario.load_times.size(); ++k) {
    if (c.scenario.load_times[k] > c.scenario.activation_time) {
      ev.emplace_back(fmt::format("load_step_{}", ev.size()), c.scenario.load_times[k]);
    }
  }
  return ev;
}

ComparisonTable compare(const AppConfig& c) {
  const std::vector<std::string> cases{"conventional-low", "conventional-high", "proposed"};
  std::vector<std::future<sim::SimResult>> runs;
  for (const auto& label : cases) {
    const auto sc = scenario_for(c, label);
    runs.push_back(std::async(std::launch::async, [sc] { return sim::run(sc); }));
  }
  ComparisonTable table;
  const auto events = comparison_events(c);
  std::vector<std::optional<sim::SimResult>> results;
  std::vector<std::string> failures;
  for (auto& f : runs) {
    try {
      results.emplace_back(f.get());
      failures.emplace_back();
    } catch (const std::exception& e) {
      results.emplace_back();
      failures.emplace_back(e.what());
      table.complete = false;
    }
  }
  for (std::size_t k = 0; k < events.size(); ++k) {
    for (std::size_t j = 0; j < cases.size(); ++j) {
      ComparisonRow row;
      row.case_label = cases[j];
      row.event_label = events[k].first;
      row.event_time = events[k].second;
      if (!results[j]) {
        row.failed = true;
        row.failure = failures[j];
      } else {
        const auto& r = *results[j];
        try {
          row.itae_v = sim::itae_voltage(r, row.event_time, c.scenario.itae_window);
          row.itae_i = sim::itae_current(r, row.event_time, c.scenario.itae_window);
          const auto st = sim::settling_time(r.t, r.vg, 0.0, c.scenario.settling_band, row.event_time,
                                             window_end(events, k, r.t.back()));
          row.settled = st.settled;
          row.settling_v = st.time;
        } catch (const ValidationError& e) {
          row.failed = true;
          row.failure = e.what();
          table.complete = false;
        }
      }
      table.rows.push_back(row);
    }
  }
  // Rows per event are ordered low, high, proposed.
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& lo = table.rows[k * 3];
    const auto& hi = table.rows[k * 3 + 1];
    const auto& pr = table.rows[k * 3 + 2];
    const bool ok = !lo.failed && !hi.failed && !pr.failed;
    const auto& ev = events[k].first;
    table.orderings.push_back({fmt::format("{}: ITAE_V proposed < conventional-high < conventional-low", ev),
                               ok && pr.itae_v < hi.itae_v && hi.itae_v < lo.itae_v});
    table.orderings.push_back({fmt::format("{}: ITAE_I proposed < conventional-low < conventional-high", ev),
                               ok && pr.itae_i < lo.itae_i && lo.itae_i < hi.itae_i});
    auto settle = [](const ComparisonRow& r) { return r.settled ? r.settling_v : std::numeric_limits<double>::infinity(); };
    table.orderings.push_back({fmt::format("{}: settling proposed < conventional-high < conventional-low", ev),
                               ok && pr.settled && settle(pr) < settle(hi) && settle(hi) < settle(lo)});
  }
  return table;
}

int run_command(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    static const std::set<std::string> commands{"tune", "simulate", "compare", "rootlocus", "bode"};
    if (commands.count(opts.command) == 0) {
      throw ValidationError(fmt::format("unknown subcommand '{}'", opts.command));
    }
    const auto ctx = prepare(opts, err);
    if (opts.command == "tune") {
      return cmd_tune(ctx, out);
    }
    if (opts.command == "simulate") {
      return cmd_simulate(ctx, out, err);
    }
    if (opts.command == "compare") {
      return cmd_compare(ctx, out);
    }
    if (opts.command == "rootlocus") {
      return cmd_rootlocus(ctx, out);
    }
    return cmd_bode(ctx, opts, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const sim::DivergenceError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace dcgrid::cli
