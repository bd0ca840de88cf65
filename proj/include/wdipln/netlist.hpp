#pragma once

#include <stdexcept>
#include <string>

#include "wdipln/circuit.hpp"
#include "wdipln/neuron.hpp"

namespace wdipln {

/// Schema or parse failure; the message names the offending field/position.
class NetlistError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// JSON netlist schema:
///   {
///     "fanout_n": <int, must equal branches length>,
///     "branches": [ { "devices": [<device>...],
///                     "imbalance": {"amplitude": a, "phase": p} }... ],
///     "bias_branch": { ... }            (optional),
///     "bias_delta_length_um": <number>  (optional, default 0),
///     "bias_path_n_eff": <number>       (optional, default 2.36)
///   }
/// Devices are tagged by "kind": "ring" | "phase_shifter" | "mzm" with the
/// device-module parameter fields.
CircuitGraph netlist_from_json(const std::string& text);
std::string netlist_to_json(const CircuitGraph& circuit);

CircuitGraph load_netlist(const std::string& path);

/// CSV with header `wavelength_nm,transmission_db,phase_rad`.
std::string sweep_to_csv(const SweepResult& result);

NeuronConfig neuron_config_from_json(const std::string& text);
std::string neuron_config_to_json(const NeuronConfig& config);

/// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace wdipln
