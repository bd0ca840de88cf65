#include "wdipln/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace wdipln {

namespace {

constexpr double pi = std::numbers::pi;

// Bias alignment used by the WDM builders: sits mid-envelope so encoders can
// detune in either direction.
constexpr double wdm_v_align = 1.35;

FieldAmplitude branch_transfer(const Branch& branch, double wavelength_nm) {
    FieldAmplitude f{1.0, 0.0};
    for (const Device& d : branch.devices) f = device_transfer(d, wavelength_nm, f);
    return f * std::polar(branch.imbalance.amplitude, branch.imbalance.phase);
}

double sign_phase(double w) { return w < 0.0 ? pi : 0.0; }

// Uniform per-branch weight sign; one sign shifter serves all channels.
double branch_sign(const std::vector<std::vector<double>>& weights, std::size_t n) {
    double s = 0.0;
    for (const auto& row : weights) {
        if (row[n] == 0.0) continue;
        const double cur = row[n] < 0.0 ? -1.0 : 1.0;
        if (s == 0.0) s = cur;
        else if (s != cur)
            throw std::invalid_argument(
                "wdipln builder: weight signs must agree across channels within "
                "a branch (one sign shifter per branch)");
    }
    return s < 0.0 ? -1.0 : 1.0;
}

void check_wdm_shape(const std::vector<std::vector<double>>& weights,
                     std::size_t m, std::size_t n) {
    if (m == 0 || n == 0)
        throw std::invalid_argument("wdipln builder: need at least one channel "
                                    "and one branch");
    for (const auto& row : weights)
        if (row.size() != n)
            throw std::invalid_argument("wdipln builder: ragged weight matrix");
}

void check_magnitude(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument(std::string(what) +
                                    " magnitude must lie in [0, 1]");
}

// Rejects rings belonging to different channels whose realized resonances sit
// within one linewidth of each other on the same branch.
void check_collisions(const std::vector<RingDevice>& rings,
                      const std::vector<int>& channels, double probe_nm) {
    for (std::size_t i = 0; i < rings.size(); ++i) {
        for (std::size_t j = i + 1; j < rings.size(); ++j) {
            if (channels[i] == channels[j]) continue;
            if (channels[i] < 0 || channels[j] < 0) continue;  // shared ring
            const double li = rings[i].resonant_wavelength_near(probe_nm);
            const double lj = rings[j].resonant_wavelength_near(probe_nm);
            const double fwhm = std::max(rings[i].linewidth_fwhm_nm(li),
                                         rings[j].linewidth_fwhm_nm(lj));
            if (std::abs(li - lj) < fwhm)
                throw std::invalid_argument(
                    "wdipln builder: channel collision — two rings on one "
                    "branch resonate within one linewidth");
        }
    }
}

}  // namespace

FieldAmplitude device_transfer(const Device& device, double wavelength_nm,
                               FieldAmplitude in) {
    return std::visit(
        [&](const auto& d) -> FieldAmplitude {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, RingDevice>)
                return in * ring_transfer(d, wavelength_nm);
            else if constexpr (std::is_same_v<T, PhaseShifterDevice>)
                return phase_shifter_transfer(d, in);
            else
                return mzm_transfer(d, in);
        },
        device);
}

CircuitGraph make_circuit(std::vector<Branch> branches,
                          std::optional<Branch> bias_branch,
                          double bias_delta_length_um, double bias_path_n_eff) {
    if (branches.empty())
        throw std::invalid_argument("make_circuit: need at least one branch");
    auto check = [](const Branch& b) {
        if (b.imbalance.amplitude < 0.0)
            throw std::invalid_argument(
                "make_circuit: imbalance amplitude must be non-negative");
    };
    for (const Branch& b : branches) check(b);
    if (bias_branch) check(*bias_branch);
    CircuitGraph g;
    g.branches = std::move(branches);
    g.bias_branch = std::move(bias_branch);
    g.bias_delta_length_um = bias_delta_length_um;
    g.bias_path_n_eff = bias_path_n_eff;
    return g;
}

FieldAmplitude evaluate_branch(const CircuitGraph& circuit, std::size_t index,
                               double wavelength_nm) {
    if (index >= circuit.branches.size())
        throw std::out_of_range("evaluate_branch: branch index out of range");
    const double outer = circuit.bias_branch ? 0.5 : 1.0;
    const double n = static_cast<double>(circuit.branches.size());
    return outer / n * branch_transfer(circuit.branches[index], wavelength_nm);
}

FieldAmplitude evaluate_bias(const CircuitGraph& circuit, double wavelength_nm) {
    if (!circuit.bias_branch) return {0.0, 0.0};
    FieldAmplitude f = branch_transfer(*circuit.bias_branch, wavelength_nm);
    if (circuit.bias_delta_length_um != 0.0) {
        const double phi = 2.0 * pi * circuit.bias_delta_length_um * 1e3 *
                           circuit.bias_path_n_eff / wavelength_nm;
        f *= std::polar(1.0, phi);
    }
    return 0.5 * f;
}

FieldAmplitude evaluate(const CircuitGraph& circuit, double wavelength_nm) {
    FieldAmplitude inner{0.0, 0.0};
    for (const Branch& b : circuit.branches)
        inner += branch_transfer(b, wavelength_nm);
    inner /= static_cast<double>(circuit.branches.size());
    if (!circuit.bias_branch) return inner;
    return evaluate_bias(circuit, wavelength_nm) + 0.5 * inner;
}

int SpectralGrid::count() const {
    // Tolerant floor so a span that is an exact multiple of the step is not
    // truncated by floating-point rounding.
    const double ratio = (stop_nm - start_nm) / (step_pm * 1e-3);
    return static_cast<int>(std::floor(ratio * (1.0 + 1e-12) + 1e-9)) + 1;
}

double SpectralGrid::wavelength_at(int i) const {
    return start_nm + i * step_pm * 1e-3;
}

void SpectralGrid::validate() const {
    if (!(start_nm < stop_nm))
        throw std::invalid_argument("SpectralGrid: start must precede stop");
    if (!(step_pm > 0.0))
        throw std::invalid_argument("SpectralGrid: step must be positive");
}

SweepResult sweep(const CircuitGraph& circuit, const SpectralGrid& grid) {
    grid.validate();
    const int n = grid.count();
    SweepResult out;
    out.wavelength_nm.reserve(n);
    out.transmission_db.reserve(n);
    out.phase_rad.reserve(n);
    double prev = 0.0, offset = 0.0;
    for (int i = 0; i < n; ++i) {
        const double lam = grid.wavelength_at(i);
        const FieldAmplitude f = evaluate(circuit, lam);
        const double p = std::max(power(f), 1e-300);
        double ph = std::arg(f);
        if (i > 0) {
            double d = ph + offset - prev;
            while (d > pi) { offset -= 2.0 * pi; d -= 2.0 * pi; }
            while (d < -pi) { offset += 2.0 * pi; d += 2.0 * pi; }
        }
        prev = ph + offset;
        out.wavelength_nm.push_back(lam);
        out.transmission_db.push_back(10.0 * std::log10(p));
        out.phase_rad.push_back(prev);
    }
    return out;
}

CircuitGraph build_coln(const std::vector<double>& weights,
                        const std::vector<double>& inputs) {
    if (weights.empty() || weights.size() != inputs.size())
        throw std::invalid_argument("build_coln: weights/inputs must be equal-"
                                    "length and non-empty");
    std::vector<Branch> branches;
    branches.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        check_magnitude(inputs[i], "build_coln: input");
        check_magnitude(std::abs(weights[i]), "build_coln: weight");
        Branch b;
        b.devices.push_back(MzmDevice{2.0 * std::acos(std::clamp(inputs[i], 0.0, 1.0))});
        b.devices.push_back(
            MzmDevice{2.0 * std::acos(std::clamp(std::abs(weights[i]), 0.0, 1.0))});
        b.devices.push_back(PhaseShifterDevice{sign_phase(weights[i])});
        branches.push_back(std::move(b));
    }
    return make_circuit(std::move(branches));
}

double channel_wavelength(int channel, double channel_spacing_nm, double base_nm) {
    // The channel grid is uniform in inverse wavelength (optical frequency),
    // matching the large shared ring: with the linear dispersion model its
    // round-trip phase is affine in 1/lambda, so its resonance comb is exactly
    // periodic on this grid and every channel sees the same input encoding.
    const double detuning = channel * channel_spacing_nm;
    if (detuning >= base_nm)
        throw std::invalid_argument(
            "channel_wavelength: channel grid exceeds the band");
    return base_nm / (1.0 - detuning / base_nm);
}

CircuitGraph build_wdipln_naive(const std::vector<std::vector<double>>& weights,
                                const std::vector<std::vector<double>>& inputs,
                                double channel_spacing_nm) {
    const std::size_t m = weights.size();
    const std::size_t n = m ? weights[0].size() : 0;
    check_wdm_shape(weights, m, n);
    check_wdm_shape(inputs, m, n);
    if (inputs.size() != m)
        throw std::invalid_argument("build_wdipln_naive: weight/input channel "
                                    "counts differ");
    const RingDevice probe_ring = make_calibrated_ring();
    const double min_spacing = 5.0 * probe_ring.linewidth_fwhm_nm(defaults::probe_nm);
    if (m > 1 && channel_spacing_nm < min_spacing)
        throw std::invalid_argument("build_wdipln_naive: channel spacing below "
                                    "the minimum isolation spacing");
    // Detuning budget per ring: 0.4 * spacing keeps opposite-detuned rings of
    // adjacent channels at least 0.2 * spacing apart.  0 = encoder default.
    const double cap = m > 1 ? 0.4 * channel_spacing_nm : 0.0;

    std::vector<Branch> branches(n);
    for (std::size_t b = 0; b < n; ++b) {
        std::vector<RingDevice> rings;
        std::vector<int> ring_channel;
        for (std::size_t j = 0; j < m; ++j) {
            const double w = std::abs(weights[j][b]);
            const double x = inputs[j][b];
            check_magnitude(w, "build_wdipln_naive: weight");
            check_magnitude(x, "build_wdipln_naive: input");
            const double lam_j = channel_wavelength(static_cast<int>(j),
                                                    channel_spacing_nm);
            // The product w*x is split evenly across the pair with opposite
            // detuning directions so the residual phases cancel.
            const double t = std::sqrt(w * x);
            const RingDevice tmpl = make_calibrated_ring(lam_j, wdm_v_align);
            const RingEncoder enc_in(tmpl, lam_j, -1, cap);
            const RingEncoder enc_w(tmpl, lam_j, +1, cap);
            rings.push_back(enc_in.ring_at(enc_in.encode(t)));
            ring_channel.push_back(static_cast<int>(j));
            rings.push_back(enc_w.ring_at(enc_w.encode(t)));
            ring_channel.push_back(static_cast<int>(j));
        }
        check_collisions(rings, ring_channel, defaults::probe_nm);
        for (const RingDevice& r : rings) branches[b].devices.push_back(r);
        branches[b].devices.push_back(
            PhaseShifterDevice{sign_phase(branch_sign(weights, b) < 0 ? -1.0 : 1.0)});
    }
    return make_circuit(std::move(branches));
}

CircuitGraph build_wdipln_nominal(const std::vector<std::vector<double>>& weights,
                                  const std::vector<double>& inputs,
                                  double channel_spacing_nm,
                                  double large_ring_fsr_nm) {
    const std::size_t m = weights.size();
    const std::size_t n = m ? weights[0].size() : 0;
    check_wdm_shape(weights, m, n);
    if (inputs.size() != n)
        throw std::invalid_argument("build_wdipln_nominal: need one input per "
                                    "branch");
    const double fsr =
        large_ring_fsr_nm > 0.0 ? large_ring_fsr_nm : channel_spacing_nm;
    if (!(fsr > 0.0))
        throw std::invalid_argument("build_wdipln_nominal: need a channel "
                                    "spacing or an explicit large-ring FSR");
    if (m > 1 && std::abs(fsr - channel_spacing_nm) > 0.01 * channel_spacing_nm)
        throw std::invalid_argument("build_wdipln_nominal: large-ring FSR must "
                                    "match the channel spacing within 1%");
    const RingDevice probe_ring = make_calibrated_ring();
    const double min_spacing = 5.0 * probe_ring.linewidth_fwhm_nm(defaults::probe_nm);
    if (m > 1 && channel_spacing_nm < min_spacing)
        throw std::invalid_argument("build_wdipln_nominal: channel spacing "
                                    "below the minimum isolation spacing");
    const double cap = m > 1 ? 0.4 * channel_spacing_nm : 0.0;

    std::vector<Branch> branches(n);
    for (std::size_t b = 0; b < n; ++b) {
        check_magnitude(inputs[b], "build_wdipln_nominal: input");
        std::vector<RingDevice> rings;
        std::vector<int> ring_channel;
        // Alignment at the on-voltage keeps the zero-input extinction deep;
        // only blue detuning is needed here.
        const RingDevice big =
            make_large_ring(fsr, defaults::probe_nm, defaults::v_on);
        const RingEncoder enc_big(big, defaults::probe_nm, +1);
        const Encoding e_big = enc_big.encode(inputs[b]);
        rings.push_back(enc_big.ring_at(e_big));
        ring_channel.push_back(-1);  // shared across channels; no collision check
        double residual_ch0 = e_big.residual_phase;
        for (std::size_t j = 0; j < m; ++j) {
            const double w = std::abs(weights[j][b]);
            check_magnitude(w, "build_wdipln_nominal: weight");
            const double lam_j = channel_wavelength(static_cast<int>(j),
                                                    channel_spacing_nm);
            const RingDevice tmpl = make_calibrated_ring(lam_j, defaults::v_on);
            const RingEncoder enc_w(tmpl, lam_j, +1, cap);
            const Encoding e_w = enc_w.encode(w);
            rings.push_back(enc_w.ring_at(e_w));
            ring_channel.push_back(static_cast<int>(j));
            if (j == 0) residual_ch0 += e_w.residual_phase;
        }
        check_collisions(rings, ring_channel, defaults::probe_nm);
        for (const RingDevice& r : rings) branches[b].devices.push_back(r);
        // The shifter sets the sign and compensates channel 0's residual
        // phase; other channels' residuals track it closely.
        const double target = sign_phase(branch_sign(weights, b) < 0 ? -1.0 : 1.0);
        branches[b].devices.push_back(PhaseShifterDevice{target - residual_ch0});
    }
    return make_circuit(std::move(branches));
}

std::size_t ring_count(const CircuitGraph& circuit) {
    std::size_t n = 0;
    auto count = [&](const Branch& b) {
        for (const Device& d : b.devices)
            if (std::holds_alternative<RingDevice>(d)) ++n;
    };
    for (const Branch& b : circuit.branches) count(b);
    if (circuit.bias_branch) count(*circuit.bias_branch);
    return n;
}

CircuitGraph build_addsub(const std::array<double, 3>& resonance_targets_nm,
                          double phase0, double phase1,
                          const std::optional<std::array<BranchImbalance, 3>>&
                              imbalance) {
    Branch bias;
    bias.devices.push_back(make_calibrated_ring(resonance_targets_nm[0]));
    bias.devices.push_back(PhaseShifterDevice{phase0});
    Branch b1;
    b1.devices.push_back(make_calibrated_ring(resonance_targets_nm[1]));
    b1.devices.push_back(PhaseShifterDevice{phase1});
    Branch b2;
    b2.devices.push_back(make_calibrated_ring(resonance_targets_nm[2]));
    if (imbalance) {
        bias.imbalance = (*imbalance)[0];
        b1.imbalance = (*imbalance)[1];
        b2.imbalance = (*imbalance)[2];
    }
    std::vector<Branch> branches;
    branches.push_back(std::move(b1));
    branches.push_back(std::move(b2));
    return make_circuit(std::move(branches), std::move(bias));
}

std::array<double, 3> addsub_row_resonances(int row) {
    // Blue shift per volt of the calibrated ring at the probe.
    const double shift = -defaults::dn_dV * defaults::probe_nm / defaults::n_group;
    const double l0 = defaults::probe_nm;
    switch (row) {
        case 0: return {l0, l0, l0};
        case 1: return {l0 - 0.05 * shift, l0, l0};
        case 2: return {l0 - 0.08 * shift, l0 - 0.04 * shift, l0};
        default:
            throw std::invalid_argument("addsub_row_resonances: row must be 0..2");
    }
}

std::array<BranchImbalance, 3> addsub_imbalance_preset() {
    return {BranchImbalance{1.03, 0.02}, BranchImbalance{0.98, -0.015},
            BranchImbalance{1.01, 0.01}};
}

CircuitGraph randomize_imbalance(const CircuitGraph& circuit, double sigma,
                                 std::uint64_t seed) {
    if (sigma < 0.0)
        throw std::invalid_argument("randomize_imbalance: sigma must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(1.0 - sigma, 1.0 + sigma);
    std::uniform_real_distribution<double> ph(-sigma, sigma);
    CircuitGraph out = circuit;
    auto perturb = [&](Branch& b) {
        b.imbalance.amplitude *= std::max(0.0, amp(rng));
        b.imbalance.phase += ph(rng);
    };
    for (Branch& b : out.branches) perturb(b);
    if (out.bias_branch) perturb(*out.bias_branch);
    return out;
}

}  // namespace wdipln
