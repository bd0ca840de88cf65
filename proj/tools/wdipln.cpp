// wdipln — command-line front end: spectral sweeps, the three-ring
// add/subtract matrix, the 2-2-1 logic-gate experiment, and scaling reports.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wdipln/circuit.hpp"
#include "wdipln/mlp.hpp"
#include "wdipln/netlist.hpp"
#include "wdipln/neuron.hpp"
#include "wdipln/scaling.hpp"
#include "wdipln/spectrum.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wdipln;

constexpr const char* tool_version = "wdipln 1.0.0";
constexpr double pi_const = 3.14159265358979323846;

// Exit codes: 0 success, 1 usage, 2 validation, 3 numerical failure.
enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kNumerical = 3 };

std::string default_out_dir() {
    if (const char* env = std::getenv("WDIPLN_OUT_DIR")) return env;
    return ".";
}

struct ManifestWriter {
    std::string command;
    std::vector<std::string> args;   // full resolved argv (minus program name)
    json config = json::object();
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point start =
        std::chrono::steady_clock::now();

    void write(const std::string& path) const {
        json j;
        j["command"] = command;
        j["args"] = args;
        j["config"] = config;
        j["seed"] = seed;
        j["tool_version"] = tool_version;
        j["outputs"] = outputs;
        j["duration_ms"] =
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count();
        write_file_atomic(path, j.dump(2) + "\n");
    }
};

double noise_sigma_for(const std::string& preset) {
    if (preset.empty() || preset == "off") return 0.0;
    if (preset == "light") return 0.01;
    if (preset == "heavy") return 0.05;
    throw CLI::ValidationError("--noise-preset",
                               "expected off|light|heavy, got '" + preset + "'");
}

int run(const std::vector<std::string>& args);

// ---------------------------------------------------------------------------

int cmd_sweep(const std::vector<std::string>& args, const std::string& netlist,
              double start, double stop, double step, std::string out) {
    if (out.empty()) out = default_out_dir() + "/sweep.csv";
    ManifestWriter mw{"sweep", args};
    mw.config = {{"netlist", netlist}, {"start_nm", start}, {"stop_nm", stop},
                 {"step_pm", step},    {"out", out}};
    const CircuitGraph g = load_netlist(netlist);
    const SweepResult res = sweep(g, SpectralGrid{start, stop, step});
    write_file_atomic(out, sweep_to_csv(res));
    mw.outputs = {out};
    mw.write(out + ".manifest.json");
    std::cout << "wrote " << out << " (" << res.wavelength_nm.size()
              << " points)\n";
    return kOk;
}

int cmd_eval(const std::vector<std::string>& args, const std::string& netlist,
             double wavelength, const std::string& out) {
    ManifestWriter mw{"eval", args};
    mw.config = {{"netlist", netlist}, {"wavelength_nm", wavelength}};
    const CircuitGraph g = load_netlist(netlist);
    const FieldAmplitude f = evaluate(g, wavelength);
    json j;
    j["wavelength_nm"] = wavelength;
    j["magnitude"] = std::abs(f);
    j["power_db"] = 10.0 * std::log10(std::max(power(f), 1e-300));
    j["phase_rad"] = std::arg(f);
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out.empty()) {
        write_file_atomic(out, text);
        mw.outputs = {out};
        mw.write(out + ".manifest.json");
    }
    return kOk;
}

int cmd_addsub(const std::vector<std::string>& args, std::string out,
               const std::string& noise_preset, double start, double stop,
               double step) {
    if (out.empty()) out = default_out_dir() + "/addsub";
    ManifestWriter mw{"addsub", args};
    mw.config = {{"out", out},       {"noise_preset", noise_preset},
                 {"start_nm", start}, {"stop_nm", stop},
                 {"step_pm", step}};
    const bool imbalanced = !noise_preset.empty() && noise_preset != "off";
    if (imbalanced && noise_preset != "deterministic")
        throw CLI::ValidationError("--noise-preset",
                                   "addsub supports off|deterministic");
    static const char* numerals[12] = {"i",  "ii", "iii", "iv",  "v",  "vi",
                                       "vii", "viii", "ix", "x", "xi", "xii"};
    const double phases[4][2] = {{0, 0}, {pi_const, 0}, {0, pi_const},
                                 {pi_const, pi_const}};
    json summary;
    summary["probe_nm"] = defaults::probe_nm;
    summary["panels"] = json::array();
    for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 4; ++col) {
            const int idx = row * 4 + col;
            const CircuitGraph g = build_addsub(
                addsub_row_resonances(row), phases[col][0], phases[col][1],
                imbalanced ? std::optional(addsub_imbalance_preset())
                           : std::nullopt);
            const SweepResult res = sweep(g, SpectralGrid{start, stop, step});
            char name[64];
            std::snprintf(name, sizeof name, "%s/panel_%02d_%s.csv", out.c_str(),
                          idx + 1, numerals[idx]);
            write_file_atomic(name, sweep_to_csv(res));
            mw.outputs.push_back(name);
            const FieldAmplitude f = evaluate(g, defaults::probe_nm);
            summary["panels"].push_back(
                {{"panel", numerals[idx]},
                 {"row", row},
                 {"col", col},
                 {"phase0", phases[col][0]},
                 {"phase1", phases[col][1]},
                 {"value_at_probe_db",
                  10.0 * std::log10(std::max(power(f), 1e-300))},
                 {"magnitude_at_probe", std::abs(f)},
                 {"dip_count", find_dips(res.transmission_db).size()},
                 {"file", name}});
        }
    }
    const std::string summary_path = out + "/summary.json";
    write_file_atomic(summary_path, summary.dump(2) + "\n");
    mw.outputs.push_back(summary_path);
    mw.write(out + "/manifest.json");
    std::cout << "wrote 12 panels + summary under " << out << "\n";
    return kOk;
}

int cmd_gates(const std::vector<std::string>& args, const std::string& gate,
              std::uint64_t seed, const std::string& noise_preset,
              std::string out, const std::string& format) {
    if (out.empty()) out = default_out_dir();
    ManifestWriter mw{"gates", args};
    mw.seed = seed;
    mw.config = {{"gate", gate},
                 {"seed", seed},
                 {"noise_preset", noise_preset},
                 {"out", out},
                 {"format", format}};
    const GateTask task = parse_gate(gate);
    MlpModel model;
    try {
        model = train(task, seed);
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    const double sigma = noise_sigma_for(noise_preset);
    std::optional<NoiseSpec> noise;
    if (sigma > 0.0) noise = NoiseSpec{sigma, seed};
    const ExperimentLog log = run_gate_experiment(task, model, noise, seed);
    const std::string base = out + "/gates_" + gate;
    if (format == "json" || format == "both") {
        write_file_atomic(base + ".json", experiment_to_json(log));
        mw.outputs.push_back(base + ".json");
    }
    if (format == "csv" || format == "both") {
        write_file_atomic(base + ".csv", experiment_to_csv(log));
        mw.outputs.push_back(base + ".csv");
    }
    mw.write(base + ".manifest.json");
    std::cout << "gate " << gate << ": accuracy " << log.accuracy * 100.0
              << "% (max stage error " << log.max_stage_error << ")\n";
    return kOk;
}

int cmd_scaling(const std::vector<std::string>& args, const std::string& variant,
                int n, int m, std::string out, const std::string& format) {
    if (out.empty()) out = default_out_dir();
    ManifestWriter mw{"scaling", args};
    mw.config = {{"variant", variant}, {"n", n}, {"m", m}, {"out", out},
                 {"format", format}};
    ArchitectureSpec spec;
    spec.variant = parse_variant(variant);
    spec.n = n;
    spec.m = m;
    const ScalingReport report = scaling_report(spec);
    const std::string table = report_table(report);
    std::cout << table;
    const std::string base = out + "/scaling_" + report.variant + "_N" +
                             std::to_string(n) + "_M" + std::to_string(m);
    write_file_atomic(base + ".txt", table);
    mw.outputs.push_back(base + ".txt");
    if (format != "csv") {  // JSON is the structured default
        write_file_atomic(base + ".json", report_json(report));
        mw.outputs.push_back(base + ".json");
    }
    mw.write(base + ".manifest.json");
    return kOk;
}

int cmd_replay(const std::string& manifest_path, const std::string& out_override) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open manifest '" << manifest_path << "'\n";
        return kValidation;
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        std::cerr << "error: bad manifest: " << e.what() << "\n";
        return kValidation;
    }
    if (!j.contains("args") || !j["args"].is_array()) {
        std::cerr << "error: manifest has no 'args' to replay\n";
        return kValidation;
    }
    std::vector<std::string> args = j["args"].get<std::vector<std::string>>();
    if (!out_override.empty()) {
        bool replaced = false;
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            if (args[i] == "--out") {
                args[i + 1] = out_override;
                replaced = true;
            }
        if (!replaced) {
            args.push_back("--out");
            args.push_back(out_override);
        }
    }
    return run(args);
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"WDIPLN photonic linear-neuron simulator"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Spectral sweep of a netlist");
    std::string sw_netlist, sw_out;
    double sw_start = 1524.2, sw_stop = 1526.8, sw_step = 1.0;
    sweep_cmd->add_option("netlist", sw_netlist, "JSON netlist path")
        ->required()
        ->check(CLI::ExistingFile);
    sweep_cmd->add_option("--start", sw_start, "start wavelength (nm)");
    sweep_cmd->add_option("--stop", sw_stop, "stop wavelength (nm)");
    sweep_cmd->add_option("--step", sw_step, "grid step (pm)");
    sweep_cmd->add_option("--out", sw_out, "output CSV path");

    // eval
    auto* eval_cmd =
        app.add_subcommand("eval", "Evaluate a netlist at one wavelength");
    std::string ev_netlist, ev_out;
    double ev_wavelength = defaults::probe_nm;
    eval_cmd->add_option("netlist", ev_netlist, "JSON netlist path")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--wavelength", ev_wavelength, "wavelength (nm)");
    eval_cmd->add_option("--out", ev_out, "optional JSON output path");

    // addsub
    auto* addsub_cmd = app.add_subcommand(
        "addsub", "Three-ring add/subtract matrix (12 panels)");
    std::string as_out, as_noise;
    double as_start = 1524.2, as_stop = 1526.8, as_step = 1.0;
    addsub_cmd->add_option("--out", as_out, "output directory");
    addsub_cmd->add_option("--noise-preset", as_noise,
                           "off|deterministic imbalance preset");
    addsub_cmd->add_option("--start", as_start, "start wavelength (nm)");
    addsub_cmd->add_option("--stop", as_stop, "stop wavelength (nm)");
    addsub_cmd->add_option("--step", as_step, "grid step (pm)");

    // gates
    auto* gates_cmd = app.add_subcommand(
        "gates", "Train and run a logic gate on the photonic circuit");
    std::string g_gate, g_noise, g_out, g_format = "both";
    std::uint64_t g_seed = 1;
    gates_cmd->add_option("--gate", g_gate, "and|or|xor")->required();
    gates_cmd->add_option("--seed", g_seed, "training seed");
    gates_cmd->add_option("--noise-preset", g_noise, "off|light|heavy");
    gates_cmd->add_option("--out", g_out, "output directory");
    gates_cmd->add_option("--format", g_format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    // scaling
    auto* scaling_cmd =
        app.add_subcommand("scaling", "Architecture scaling report");
    std::string s_variant = "wdipln-nominal", s_out, s_format = "json";
    int s_n = 8, s_m = 1;
    scaling_cmd->add_option("--variant", s_variant,
                            "coln|coln-thermal|wdipln-naive|wdipln-nominal");
    scaling_cmd->add_option("-N,--width", s_n, "layer width N");
    scaling_cmd->add_option("-M,--channels", s_m, "channel count M");
    scaling_cmd->add_option("--out", s_out, "output directory");
    scaling_cmd->add_option("--format", s_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    // replay
    auto* replay_cmd =
        app.add_subcommand("replay", "Re-run a command from its manifest");
    std::string r_manifest, r_out;
    replay_cmd->add_option("manifest", r_manifest, "manifest JSON path")
        ->required()
        ->check(CLI::ExistingFile);
    replay_cmd->add_option("--out", r_out, "override the output location");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (sweep_cmd->parsed())
            return cmd_sweep(args, sw_netlist, sw_start, sw_stop, sw_step, sw_out);
        if (eval_cmd->parsed())
            return cmd_eval(args, ev_netlist, ev_wavelength, ev_out);
        if (addsub_cmd->parsed())
            return cmd_addsub(args, as_out, as_noise, as_start, as_stop, as_step);
        if (gates_cmd->parsed())
            return cmd_gates(args, g_gate, g_seed, g_noise, g_out, g_format);
        if (scaling_cmd->parsed())
            return cmd_scaling(args, s_variant, s_n, s_m, s_out, s_format);
        if (replay_cmd->parsed()) return cmd_replay(r_manifest, r_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NetlistError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args);
}
