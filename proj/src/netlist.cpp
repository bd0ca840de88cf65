#include "wdipln/netlist.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace wdipln {

namespace {

using nlohmann::json;

double get_number(const json& j, const std::string& ctx, const std::string& key,
                  bool required, double fallback = 0.0) {
    if (!j.contains(key)) {
        if (required)
            throw NetlistError(ctx + ": missing required field '" + key + "'");
        return fallback;
    }
    if (!j[key].is_number())
        throw NetlistError(ctx + ": field '" + key + "' must be a number");
    return j[key].get<double>();
}

Device device_from_json(const json& j, const std::string& ctx) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw NetlistError(ctx + ": device entry needs a string 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "ring") {
        RingDevice r;
        r.r = get_number(j, ctx, "r", true);
        r.a0 = get_number(j, ctx, "a0", true);
        r.roundtrip_length_um = get_number(j, ctx, "roundtrip_length_um", true);
        r.n_eff0 = get_number(j, ctx, "n_eff0", true);
        r.n_group = get_number(j, ctx, "n_group", false, r.n_group);
        r.dn_dV = get_number(j, ctx, "dn_dV", false, r.dn_dV);
        r.da_dV = get_number(j, ctx, "da_dV", false, r.da_dV);
        r.voltage = get_number(j, ctx, "voltage", false, 0.0);
        r.lambda_ref_nm = get_number(j, ctx, "lambda_ref_nm", false,
                                     r.lambda_ref_nm);
        r.v_min = get_number(j, ctx, "v_min", false, r.v_min);
        r.v_max = get_number(j, ctx, "v_max", false, r.v_max);
        if (!(r.r >= 0.0 && r.r < 1.0))
            throw NetlistError(ctx + ": 'r' must lie in [0, 1)");
        if (!(r.a0 > 0.0 && r.a0 <= 1.0))
            throw NetlistError(ctx + ": 'a0' must lie in (0, 1]");
        return r;
    }
    if (kind == "phase_shifter") {
        PhaseShifterDevice ps;
        ps.phase = get_number(j, ctx, "phase", true);
        ps.insertion_loss_db = get_number(j, ctx, "insertion_loss_db", false, 0.0);
        if (ps.insertion_loss_db < 0.0)
            throw NetlistError(ctx + ": 'insertion_loss_db' must be >= 0");
        return ps;
    }
    if (kind == "mzm") {
        MzmDevice m;
        m.phase_difference = get_number(j, ctx, "phase_difference", true);
        m.extinction_ratio_db =
            get_number(j, ctx, "extinction_ratio_db", false,
                       std::numeric_limits<double>::infinity());
        return m;
    }
    throw NetlistError(ctx + ": unknown device kind '" + kind +
                       "' (expected ring|phase_shifter|mzm)");
}

json device_to_json(const Device& d) {
    json j;
    std::visit(
        [&](const auto& dev) {
            using T = std::decay_t<decltype(dev)>;
            if constexpr (std::is_same_v<T, RingDevice>) {
                j["kind"] = "ring";
                j["r"] = dev.r;
                j["a0"] = dev.a0;
                j["roundtrip_length_um"] = dev.roundtrip_length_um;
                j["n_eff0"] = dev.n_eff0;
                j["n_group"] = dev.n_group;
                j["dn_dV"] = dev.dn_dV;
                j["da_dV"] = dev.da_dV;
                j["voltage"] = dev.voltage;
                j["lambda_ref_nm"] = dev.lambda_ref_nm;
                j["v_min"] = dev.v_min;
                j["v_max"] = dev.v_max;
            } else if constexpr (std::is_same_v<T, PhaseShifterDevice>) {
                j["kind"] = "phase_shifter";
                j["phase"] = dev.phase;
                j["insertion_loss_db"] = dev.insertion_loss_db;
            } else {
                j["kind"] = "mzm";
                j["phase_difference"] = dev.phase_difference;
                if (std::isfinite(dev.extinction_ratio_db))
                    j["extinction_ratio_db"] = dev.extinction_ratio_db;
            }
        },
        d);
    return j;
}

Branch branch_from_json(const json& j, const std::string& ctx) {
    if (!j.is_object())
        throw NetlistError(ctx + ": branch must be an object");
    Branch b;
    if (j.contains("devices")) {
        if (!j["devices"].is_array())
            throw NetlistError(ctx + ": 'devices' must be an array");
        int i = 0;
        for (const json& dj : j["devices"])
            b.devices.push_back(
                device_from_json(dj, ctx + ".devices[" + std::to_string(i++) + "]"));
    }
    if (j.contains("imbalance")) {
        const json& im = j["imbalance"];
        b.imbalance.amplitude =
            get_number(im, ctx + ".imbalance", "amplitude", false, 1.0);
        b.imbalance.phase = get_number(im, ctx + ".imbalance", "phase", false, 0.0);
        if (b.imbalance.amplitude < 0.0)
            throw NetlistError(ctx + ".imbalance: 'amplitude' must be >= 0");
    }
    return b;
}

json branch_to_json(const Branch& b) {
    json j;
    j["devices"] = json::array();
    for (const Device& d : b.devices) j["devices"].push_back(device_to_json(d));
    j["imbalance"] = {{"amplitude", b.imbalance.amplitude},
                      {"phase", b.imbalance.phase}};
    return j;
}

}  // namespace

CircuitGraph netlist_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw NetlistError(std::string("netlist: JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw NetlistError("netlist: top level must be an object");
    if (!j.contains("branches") || !j["branches"].is_array() ||
        j["branches"].empty())
        throw NetlistError("netlist: 'branches' must be a non-empty array");
    std::vector<Branch> branches;
    int i = 0;
    for (const json& bj : j["branches"])
        branches.push_back(
            branch_from_json(bj, "branches[" + std::to_string(i++) + "]"));
    if (j.contains("fanout_n")) {
        if (!j["fanout_n"].is_number_integer())
            throw NetlistError("netlist: 'fanout_n' must be an integer");
        if (j["fanout_n"].get<std::size_t>() != branches.size())
            throw NetlistError("netlist: 'fanout_n' must equal the branch count");
    }
    std::optional<Branch> bias;
    if (j.contains("bias_branch") && !j["bias_branch"].is_null())
        bias = branch_from_json(j["bias_branch"], "bias_branch");
    const double dl = get_number(j, "netlist", "bias_delta_length_um", false, 0.0);
    const double neff = get_number(j, "netlist", "bias_path_n_eff", false, 2.36);
    try {
        return make_circuit(std::move(branches), std::move(bias), dl, neff);
    } catch (const std::invalid_argument& e) {
        throw NetlistError(std::string("netlist: ") + e.what());
    }
}

std::string netlist_to_json(const CircuitGraph& circuit) {
    json j;
    j["fanout_n"] = circuit.branches.size();
    j["branches"] = json::array();
    for (const Branch& b : circuit.branches)
        j["branches"].push_back(branch_to_json(b));
    if (circuit.bias_branch)
        j["bias_branch"] = branch_to_json(*circuit.bias_branch);
    j["bias_delta_length_um"] = circuit.bias_delta_length_um;
    j["bias_path_n_eff"] = circuit.bias_path_n_eff;
    return j.dump(2) + "\n";
}

CircuitGraph load_netlist(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NetlistError("netlist: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return netlist_from_json(buf.str());
}

std::string sweep_to_csv(const SweepResult& result) {
    std::ostringstream os;
    os.precision(17);
    os << "wavelength_nm,transmission_db,phase_rad\n";
    for (std::size_t i = 0; i < result.wavelength_nm.size(); ++i)
        os << result.wavelength_nm[i] << ',' << result.transmission_db[i] << ','
           << result.phase_rad[i] << '\n';
    return os.str();
}

NeuronConfig neuron_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw NetlistError(std::string("neuron config: JSON parse error: ") +
                           e.what());
    }
    NeuronConfig c;
    if (!j.contains("weights") || !j["weights"].is_array() ||
        !j.contains("inputs") || !j["inputs"].is_array())
        throw NetlistError("neuron config: needs 'weights' and 'inputs' arrays");
    c.weights = j["weights"].get<std::vector<double>>();
    c.inputs = j["inputs"].get<std::vector<double>>();
    if (j.contains("bias") && !j["bias"].is_null())
        c.bias = j["bias"].get<double>();
    c.probe_nm = get_number(j, "neuron config", "probe_nm", false, c.probe_nm);
    return c;
}

std::string neuron_config_to_json(const NeuronConfig& config) {
    json j;
    j["weights"] = config.weights;
    j["inputs"] = config.inputs;
    if (config.bias) j["bias"] = *config.bias;
    j["probe_nm"] = config.probe_nm;
    return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out.flush())
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

}  // namespace wdipln
