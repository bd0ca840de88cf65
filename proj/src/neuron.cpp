#include "wdipln/neuron.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <stdexcept>

namespace wdipln {

namespace {
constexpr double pi = std::numbers::pi;

void validate(const NeuronConfig& c) {
    if (c.weights.empty() || c.weights.size() != c.inputs.size())
        throw std::invalid_argument(
            "NeuronConfig: weights and inputs must be equal-length and "
            "non-empty");
    for (double w : c.weights)
        if (!(std::abs(w) <= 1.0))
            throw std::invalid_argument("NeuronConfig: |weight| must be <= 1");
    for (double x : c.inputs)
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("NeuronConfig: inputs must lie in [0, 1]");
    if (c.bias && !(std::abs(*c.bias) <= 1.0))
        throw std::invalid_argument("NeuronConfig: |bias| must be <= 1");
    if (!(c.probe_nm > 0.0))
        throw std::invalid_argument("NeuronConfig: probe wavelength must be "
                                    "positive");
}
}  // namespace

double expected_mac(const NeuronConfig& config) {
    validate(config);
    double s = 0.0;
    for (std::size_t i = 0; i < config.weights.size(); ++i)
        s += config.weights[i] * config.inputs[i];
    if (config.bias) s += *config.bias;
    return s / static_cast<double>(config.weights.size());
}

ConfiguredNeuron configure(const NeuronConfig& config, InputEncodingMode mode) {
    validate(config);
    const std::size_t n = config.weights.size();
    const RingDevice tmpl = make_calibrated_ring(config.probe_nm, defaults::v_on);
    const RingEncoder encoder(tmpl, config.probe_nm, +1);

    auto encode_checked = [&](double target) {
        // Logical full scale (1.0) maps onto the encoder ceiling; anything
        // meaningfully beyond the reachable range is a calibration failure.
        if (target > encoder.max_magnitude() + 1e-3)
            throw std::domain_error("configure: target magnitude outside the "
                                    "ring's encodable range");
        return encoder.encode(target);
    };

    std::vector<Branch> branches(n);
    for (std::size_t i = 0; i < n; ++i) {
        double input_residual = 0.0;
        if (mode == InputEncodingMode::Binary) {
            const double x = config.inputs[i];
            if (x != 0.0 && x != 1.0)
                throw std::invalid_argument("configure: binary mode requires "
                                            "inputs in {0, 1}");
            const RingDevice ring =
                apply_bias(tmpl, x == 1.0 ? defaults::v_on : defaults::v_off);
            input_residual = std::arg(ring_transfer(ring, config.probe_nm));
            branches[i].devices.push_back(ring);
        } else {
            const Encoding e = encode_checked(config.inputs[i]);
            input_residual = e.residual_phase;
            branches[i].devices.push_back(encoder.ring_at(e));
        }
        const Encoding ew = encode_checked(std::abs(config.weights[i]));
        branches[i].devices.push_back(encoder.ring_at(ew));
        const double target = config.weights[i] < 0.0 ? pi : 0.0;
        branches[i].devices.push_back(
            PhaseShifterDevice{target - input_residual - ew.residual_phase});
    }

    std::optional<Branch> bias;
    if (config.bias) {
        const Encoding eb =
            encode_checked(std::abs(*config.bias) / static_cast<double>(n));
        Branch b;
        b.devices.push_back(encoder.ring_at(eb));
        const double target = *config.bias < 0.0 ? pi : 0.0;
        b.devices.push_back(PhaseShifterDevice{target - eb.residual_phase});
        bias = std::move(b);
    }

    ConfiguredNeuron out;
    // The outer 2-way splitter around the bias branch attenuates the logical
    // "1" reference field to 0.5.
    out.reference_power = config.bias ? 0.25 : 1.0;
    out.probe_nm = config.probe_nm;
    out.graph = make_circuit(std::move(branches), std::move(bias));
    return out;
}

double readout(FieldAmplitude field, double reference_power) {
    if (!(reference_power > 0.0))
        throw std::invalid_argument("readout: reference power must be positive");
    return std::sqrt(power(field) / reference_power);
}

double neuron_readout(const ConfiguredNeuron& neuron) {
    return readout(evaluate(neuron.graph, neuron.probe_nm),
                   neuron.reference_power);
}

double signed_readout(const ConfiguredNeuron& neuron) {
    const FieldAmplitude f = evaluate(neuron.graph, neuron.probe_nm);
    const double mag = readout(f, neuron.reference_power);
    return std::abs(std::arg(f)) < pi / 2.0 ? mag : -mag;
}

EncodingTable::EncodingTable(const RingEncoder& encoder, double aligned_voltage,
                             int samples) {
    if (samples < 2)
        throw std::invalid_argument("EncodingTable: need at least 2 samples");
    rows_.reserve(samples);
    const double lo = encoder.min_magnitude();
    const double hi = encoder.max_magnitude();
    for (int i = 0; i < samples; ++i) {
        const double t = lo + (hi - lo) * i / (samples - 1);
        const Encoding e = encoder.encode(t);
        rows_.push_back({t, e.voltage, e.achieved_magnitude, e.residual_phase,
                         std::abs(e.voltage - aligned_voltage)});
    }
}

bool EncodingTable::monotone_detuning() const {
    for (std::size_t i = 1; i < rows_.size(); ++i)
        if (rows_[i].detune_v + 1e-12 < rows_[i - 1].detune_v) return false;
    return true;
}

void EncodingTable::export_csv(std::ostream& os) const {
    os << "target,voltage_v,achieved_magnitude,residual_phase_rad\n";
    os << std::setprecision(17);
    for (const EncodingRow& r : rows_)
        os << r.target << ',' << r.voltage << ',' << r.achieved_magnitude << ','
           << r.residual_phase << '\n';
}

}  // namespace wdipln
