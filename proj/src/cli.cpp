#include "penduflow/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "penduflow/config.hpp"
#include "penduflow/csv.hpp"
#include "penduflow/svg.hpp"

namespace penduflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ScenarioArgs {
    std::string preset;
    std::string config;
    std::string params;
    std::string kit;
    std::vector<std::string> overrides;
};

struct OutputArgs {
    std::string out;
    std::string format = "csv";

    bool svg() const { return format == "csv+svg"; }
};

fs::path output_dir(const OutputArgs& o) {
    fs::path dir = "out";
    if (!o.out.empty()) {
        dir = o.out;
    } else if (const char* env = std::getenv("PENDUFLOW_OUT"); env != nullptr && *env != '\0') {
        dir = env;
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw std::runtime_error("out: cannot create output directory '" + dir.string() + "'");
    }
    return dir;
}

template <class Writer>
fs::path write_file(const fs::path& path, Writer&& writer) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("out: cannot write '" + path.string() + "'");
    writer(os);
    os.flush();
    if (!os) throw std::runtime_error("out: failed writing '" + path.string() + "'");
    return path;
}

fs::path write_text(const fs::path& path, const std::string& text) {
    return write_file(path, [&](std::ostream& os) { os << text; });
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error("config: malformed JSON in '" + path + "': " + e.what());
    }
}

json params_json(const PhysicalParams& p) {
    RunSettings rs;
    rs.scenario.params = p;
    return to_json(rs)["params"];
}

/// Preset (if any) → config file → --kit → --params → --set, later wins.
RunSettings resolve_settings(const ScenarioArgs& a) {
    json cfg = json::object();
    std::string preset_name = a.preset;
    std::string kit = a.kit;
    if (!a.config.empty()) {
        cfg = read_json_file(a.config);
        if (!cfg.is_object()) throw std::runtime_error("config: top level must be an object");
        if (cfg.contains("preset")) {
            if (!cfg["preset"].is_string()) throw std::runtime_error("config: key 'preset' must be a string");
            if (preset_name.empty()) preset_name = cfg["preset"].get<std::string>();
            cfg.erase("preset");
        }
        if (cfg.contains("kit")) {
            if (!cfg["kit"].is_string()) throw std::runtime_error("config: key 'kit' must be a string");
            const std::string cfg_kit = cfg["kit"].get<std::string>();
            cfg.erase("kit");
            if (kit.empty()) kit = cfg_kit;
        }
    }

    RunSettings base;
    if (!preset_name.empty()) {
        base.scenario = preset_scenario(preset_name);
    } else {
        base.scenario = {"custom", preset(MagnetKit::Large), MechState{}, {}, 10.0, 1e-3};
    }
    json doc = to_json(base);
    if (!kit.empty()) doc["params"] = params_json(preset(parse_kit(kit)));
    merge_strict(doc, cfg);
    if (!a.kit.empty()) doc["params"] = params_json(preset(parse_kit(a.kit)));
    if (!a.params.empty()) doc["params"] = params_json(load_params(a.params));
    for (const auto& o : a.overrides) apply_override(doc, o);
    return settings_from_json(doc);
}

PendulumModel model_from(const std::string& kit, const std::string& params_path) {
    if (!params_path.empty()) return PendulumModel(load_params(params_path));
    return PendulumModel(preset(parse_kit(kit.empty() ? "large" : kit)));
}

void add_scenario_options(CLI::App* cmd, ScenarioArgs& a) {
    cmd->add_option("--preset", a.preset, "Scenario preset (see `presets`)");
    cmd->add_option("--config", a.config, "JSON scenario file");
    cmd->add_option("--params", a.params, "JSON physical parameter file");
    cmd->add_option("--kit", a.kit, "Magnet kit for the parameters: large or small");
    cmd->add_option("--set", a.overrides, "Dotted override key=value, repeatable (e.g. controller.i0=0.5)");
}

void add_output_options(CLI::App* cmd, OutputArgs& o) {
    cmd->add_option("--out", o.out, "Output directory (default: $PENDUFLOW_OUT or ./out)");
    cmd->add_option("--format", o.format, "csv or csv+svg")->check(CLI::IsMember({"csv", "csv+svg"}));
}

std::vector<double> column_of(const Trajectory& tr, double Descriptors::*field) {
    std::vector<double> v;
    v.reserve(tr.size());
    for (const auto& d : tr.descriptors) v.push_back(d.*field);
    return v;
}

void report(std::ostream& out, const fs::path& path, const Trajectory& tr) {
    out << "wrote " << path.string() << " (" << tr.size() << " rows, " << termination_name(tr.termination)
        << ")\n";
}

int cmd_simulate(const ScenarioArgs& a, const OutputArgs& o, std::ostream& out) {
    const RunSettings rs = resolve_settings(a);
    const Trajectory tr = integrate_full(rs.scenario, rs.full);
    const fs::path dir = output_dir(o);
    const std::string label = rs.scenario.label.empty() ? "run" : rs.scenario.label;
    report(out, write_file(dir / (label + ".csv"), [&](std::ostream& os) { write_full_csv(os, tr); }), tr);
    write_file(dir / (label + "_descriptors.csv"), [&](std::ostream& os) { write_descriptor_csv(os, tr); });
    if (o.svg()) {
        std::vector<double> phi1, phi2;
        for (const auto& s : tr.mech) {
            phi1.push_back(s.phi1);
            phi2.push_back(s.phi2);
        }
        write_text(dir / (label + "_P.svg"),
                   line_chart({label + ": energy partition", "t [s]", "P"}, {{"P", tr.times, column_of(tr, &Descriptors::P)}}));
        write_text(dir / (label + "_Q.svg"),
                   line_chart({label + ": coherency index", "t [s]", "Q"}, {{"Q", tr.times, column_of(tr, &Descriptors::Q)}}));
        write_text(dir / (label + "_phase.svg"),
                   line_chart({label + ": phase plane", "phi1 [rad]", "phi2 [rad]"}, {{"", phi1, phi2}}));
    }
    return tr.termination == Termination::NonFinite ? 1 : 0;
}

int cmd_slowflow(const ScenarioArgs& a, const OutputArgs& o, std::ostream& out) {
    const RunSettings rs = resolve_settings(a);
    const Trajectory tr = integrate_slow(rs.scenario, rs.slow);
    const fs::path dir = output_dir(o);
    const std::string label = rs.scenario.label.empty() ? "run" : rs.scenario.label;
    report(out, write_file(dir / (label + "_slow.csv"), [&](std::ostream& os) { write_slow_csv(os, tr); }), tr);
    if (o.svg()) {
        write_text(dir / (label + "_slow_P.svg"), line_chart({label + ": energy partition (averaged)", "t [s]", "P"},
                                                             {{"P", tr.times, column_of(tr, &Descriptors::P)}}));
        write_text(dir / (label + "_slow_Q.svg"), line_chart({label + ": coherency index (averaged)", "t [s]", "Q"},
                                                             {{"Q", tr.times, column_of(tr, &Descriptors::Q)}}));
    }
    return tr.termination == Termination::NonFinite ? 1 : 0;
}

Trajectory load_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return trajectory_from_csv(read_csv(in));
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

int cmd_compare(const std::string& full_path, const std::string& slow_path, const std::vector<double>& window,
                const OutputArgs& o, std::ostream& out) {
    const Trajectory full = load_trajectory(full_path);
    const Trajectory slow = load_trajectory(slow_path);
    std::optional<std::pair<double, double>> win;
    if (window.size() == 2) win = std::pair{window[0], window[1]};
    const ComparisonReport rep = compare(full, slow, win);
    json j = {{"rms_P", rep.rms_P},
              {"rms_Q", rep.rms_Q},
              {"max_abs_P_error", rep.max_abs_P_error},
              {"localization_time_full", optional_json(rep.localization_time_full)},
              {"localization_time_slow", optional_json(rep.localization_time_slow)},
              {"t_begin", rep.t_begin},
              {"t_end", rep.t_end},
              {"diverged", rep.diverged}};
    const fs::path dir = output_dir(o);
    write_text(dir / "compare.json", j.dump(2) + "\n");
    out << j.dump(2) << '\n';
    if (o.svg()) {
        write_text(dir / "compare_P.svg",
                   line_chart({"energy partition", "t [s]", "P"},
                              {{"full", full.times, column_of(full, &Descriptors::P)},
                               {"averaged", slow.times, column_of(slow, &Descriptors::P)}}));
        write_text(dir / "compare_Q.svg",
                   line_chart({"coherency index", "t [s]", "Q"},
                              {{"full", full.times, column_of(full, &Descriptors::Q)},
                               {"averaged", slow.times, column_of(slow, &Descriptors::Q)}}));
    }
    return 0;
}

struct FieldArgs {
    std::string kit;
    std::string params;
    double energy = 30.0;
    double i1 = 0.0;
    double i2 = 0.0;
    int grid = 41;
    std::string prefactor = "as_printed";
};

int cmd_streamlines(const FieldArgs& f, const OutputArgs& o, std::ostream& out) {
    const PendulumModel m = model_from(f.kit, f.params);
    if (f.grid < 2) throw std::invalid_argument("grid: must be at least 2");
    SlowFlowOptions opts;
    opts.prefactor = f.prefactor == "energy_consistent" ? FrictionPrefactor::EnergyConsistent
                                                        : FrictionPrefactor::AsPrinted;
    StreamGrid grid;
    grid.n_delta = f.grid;
    grid.n_p = f.grid;
    const CurrentPair cur{f.i1, f.i2};
    const auto field = streamline_field(f.energy, cur, grid, m, opts);
    const auto points = stationary_points(f.energy, cur, grid, m, opts);
    const fs::path dir = output_dir(o);
    const fs::path path = write_file(dir / "streamlines.csv", [&](std::ostream& os) { write_streamline_csv(os, field); });
    write_file(dir / "streamlines_stationary.csv", [&](std::ostream& os) { write_stationary_csv(os, points); });
    out << "wrote " << path.string() << " (" << field.size() << " samples, " << points.size()
        << " stationary points)\n";
    if (o.svg()) {
        write_text(dir / "streamlines.svg", quiver_chart({"averaged flow at E = " + format_double(f.energy),
                                                          "Delta [rad]", "P"},
                                                         field, points));
    }
    return 0;
}

int cmd_stability(const FieldArgs& f, double range, const OutputArgs& o, std::ostream& out) {
    const PendulumModel m = model_from(f.kit, f.params);
    if (f.grid < 2) throw std::invalid_argument("grid: must be at least 2");
    if (!(range > 0.0)) throw std::invalid_argument("range: must be positive");
    const auto cells = stability_map(f.grid, range, m);
    const fs::path dir = output_dir(o);
    const fs::path path = write_file(dir / "stability_map.csv", [&](std::ostream& os) { write_stability_csv(os, cells); });
    out << "wrote " << path.string() << " (" << cells.size() << " cells)\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Energy-transfer simulator for magnetically controlled coupled pendulums", "penduflow"};
    app.require_subcommand(1);

    ScenarioArgs sim_args;
    OutputArgs sim_out;
    auto* simulate = app.add_subcommand("simulate", "Integrate the full nonsmooth plant");
    add_scenario_options(simulate, sim_args);
    add_output_options(simulate, sim_out);

    ScenarioArgs slow_args;
    OutputArgs slow_out;
    auto* slowflow = app.add_subcommand("slowflow", "Integrate the averaged (E, P, Delta) system");
    add_scenario_options(slowflow, slow_args);
    add_output_options(slowflow, slow_out);

    std::string full_csv;
    std::string slow_csv;
    std::vector<double> window;
    OutputArgs cmp_out;
    auto* comparecmd = app.add_subcommand("compare", "Compare two trajectory CSVs on P and Q");
    comparecmd->add_option("--full", full_csv, "Reference trajectory CSV")->required();
    comparecmd->add_option("--slow", slow_csv, "Trajectory CSV to compare against it")->required();
    comparecmd->add_option("--window", window, "Restrict to t0 t1")->expected(2);
    add_output_options(comparecmd, cmp_out);

    FieldArgs field_args;
    OutputArgs field_out;
    auto* streamlines = app.add_subcommand("streamlines", "Frozen-energy direction field on the (Delta, P) plane");
    streamlines->add_option("--kit", field_args.kit, "large or small");
    streamlines->add_option("--params", field_args.params, "JSON physical parameter file");
    streamlines->add_option("--energy", field_args.energy, "Total excitation E");
    streamlines->add_option("--i1", field_args.i1, "Coil current 1 [A]");
    streamlines->add_option("--i2", field_args.i2, "Coil current 2 [A]");
    streamlines->add_option("--grid", field_args.grid, "Samples per axis");
    streamlines->add_option("--prefactor", field_args.prefactor, "as_printed or energy_consistent")
        ->check(CLI::IsMember({"as_printed", "energy_consistent"}));
    add_output_options(streamlines, field_out);

    FieldArgs map_args;
    double range = 0.3;
    OutputArgs map_out;
    auto* stability = app.add_subcommand("stability-map", "Classify the origin over a grid of coil currents");
    stability->add_option("--kit", map_args.kit, "large or small");
    stability->add_option("--params", map_args.params, "JSON physical parameter file");
    stability->add_option("--grid", map_args.grid, "Points per current axis");
    stability->add_option("--range", range, "Currents span [-range, range] A");
    add_output_options(stability, map_out);

    auto* presets = app.add_subcommand("presets", "List scenario presets");

    std::vector<std::string> argv_store = args.empty() ? std::vector<std::string>{"penduflow"} : args;
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*simulate) return cmd_simulate(sim_args, sim_out, out);
        if (*slowflow) return cmd_slowflow(slow_args, slow_out, out);
        if (*comparecmd) return cmd_compare(full_csv, slow_csv, window, cmp_out, out);
        if (*streamlines) return cmd_streamlines(field_args, field_out, out);
        if (*stability) return cmd_stability(map_args, range, map_out, out);
        if (*presets) {
            for (const auto& n : preset_names()) out << n << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace penduflow
