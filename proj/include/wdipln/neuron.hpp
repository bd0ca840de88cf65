#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "wdipln/circuit.hpp"
#include "wdipln/devices.hpp"

namespace wdipln {

/// Abstract signed weight/input vector to be mapped onto a circuit.  Weight
/// signs are realized exclusively by phase-shifter settings (0 or pi);
/// magnitudes exclusively by ring detuning.
struct NeuronConfig {
    std::vector<double> weights;  // signed, each in [-1, 1]
    std::vector<double> inputs;   // each in [0, 1]
    std::optional<double> bias;   // signed, |bias| <= 1
    double probe_nm = defaults::probe_nm;
};

/// Analytic oracle: (1/N) * (sum_n w_n * x_n + bias).  The 1/N prefactor is
/// the balanced fan-out/fan-in tree normalization.
double expected_mac(const NeuronConfig& config);

/// How logical input values are written onto the input rings.
///  - Continuous: numeric inversion of the ring transfer (faithful values).
///  - Binary: global two-level bias map, 1 -> V_on (ring aligned, deep
///    extinction) and 0 -> V_off (detuned, high transmission).  Note the
///    optical value is inverted relative to the logical one in this mode.
enum class InputEncodingMode { Continuous, Binary };

struct ConfiguredNeuron {
    CircuitGraph graph;
    double probe_nm = defaults::probe_nm;
    double reference_power = 1.0;  // power of the logical-"1" reference
};

/// Maps the config onto a ring-per-value circuit: each branch carries an
/// input ring, a weight ring, and a sign/compensation phase shifter; an
/// optional bias branch carries a ring encoding |bias|/N plus its shifter.
/// Throws std::domain_error when a magnitude is outside the encodable range.
ConfiguredNeuron configure(const NeuronConfig& config,
                           InputEncodingMode mode = InputEncodingMode::Continuous);

/// Detector model: sqrt(power(field) / reference_power).
double readout(FieldAmplitude field, double reference_power);

/// Evaluates the configured circuit at the probe; magnitude-only readout.
double neuron_readout(const ConfiguredNeuron& neuron);

/// Signed readout: magnitude signed by the output phase relative to the
/// all-positive reference (phase near 0 -> +, near pi -> -).
double signed_readout(const ConfiguredNeuron& neuron);

// ---------------------------------------------------------------------------
// Encoding table: a sampled inversion of the ring transfer for inspection.

struct EncodingRow {
    double target = 0.0;
    double voltage = 0.0;
    double achieved_magnitude = 0.0;
    double residual_phase = 0.0;
    double detune_v = 0.0;  // |voltage - aligned bias|
};

class EncodingTable {
public:
    EncodingTable(const RingEncoder& encoder, double aligned_voltage,
                  int samples = 101);

    const std::vector<EncodingRow>& rows() const { return rows_; }

    /// Larger target magnitude must map to larger detuning from alignment.
    bool monotone_detuning() const;

    /// CSV with header `target,voltage_v,achieved_magnitude,residual_phase_rad`.
    void export_csv(std::ostream& os) const;

private:
    std::vector<EncodingRow> rows_;
};

}  // namespace wdipln
