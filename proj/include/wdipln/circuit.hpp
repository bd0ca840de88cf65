#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "wdipln/devices.hpp"

namespace wdipln {

using Device = std::variant<RingDevice, PhaseShifterDevice, MzmDevice>;

/// Transfer of a single device applied to an incoming field.
FieldAmplitude device_transfer(const Device& device, double wavelength_nm,
                               FieldAmplitude in);

/// Static per-branch fabrication imbalance (identity by default).
struct BranchImbalance {
    double amplitude = 1.0;
    double phase = 0.0;
};

struct Branch {
    std::vector<Device> devices;  // applied in order; empty chain = identity
    BranchImbalance imbalance;
};

/// Feed-forward interferometric circuit: a balanced N-way fan-out/fan-in tree
/// over `branches`, optionally in parallel with a bias branch that bypasses
/// the tree through an outer balanced 2-way splitter/combiner.
///
///   E = 0.5 * T_bias * e^{i phi_bias} + 0.5 * (1/N) * sum_n T_n     (with bias)
///   E = (1/N) * sum_n T_n                                           (no bias)
///
/// where phi_bias(lambda) = 2*pi * bias_delta_length * n_eff / lambda models
/// the bias path-length mismatch (zero by default).
struct CircuitGraph {
    std::vector<Branch> branches;
    std::optional<Branch> bias_branch;
    double bias_delta_length_um = 0.0;
    double bias_path_n_eff = 2.36;
};

/// Validates branch structure; throws std::invalid_argument on a malformed
/// graph (no branches, or negative imbalance amplitude).
CircuitGraph make_circuit(std::vector<Branch> branches,
                          std::optional<Branch> bias_branch = std::nullopt,
                          double bias_delta_length_um = 0.0,
                          double bias_path_n_eff = 2.36);

FieldAmplitude evaluate(const CircuitGraph& circuit, double wavelength_nm);

/// Contribution of one inner branch alone (all other branches absorbing,
/// bias branch absorbing).  Summing these over all branches plus
/// evaluate_bias() reproduces evaluate() exactly.
FieldAmplitude evaluate_branch(const CircuitGraph& circuit, std::size_t index,
                               double wavelength_nm);
FieldAmplitude evaluate_bias(const CircuitGraph& circuit, double wavelength_nm);

struct SpectralGrid {
    double start_nm = 0.0;
    double stop_nm = 0.0;
    double step_pm = 1.0;

    int count() const;
    double wavelength_at(int i) const;  // nm
    void validate() const;              // throws on start >= stop or step <= 0
};

struct SweepResult {
    std::vector<double> wavelength_nm;
    std::vector<double> transmission_db;  // power, 10*log10|E|^2
    std::vector<double> phase_rad;        // unwrapped
};

SweepResult sweep(const CircuitGraph& circuit, const SpectralGrid& grid);

// ---------------------------------------------------------------------------
// Topology builders

/// MZM-based coherent linear neuron: per branch an input MZM, a weight MZM,
/// and a sign phase shifter.  evaluate() at any wavelength returns
/// (1/N) * sum_n w_n * x_n.
CircuitGraph build_coln(const std::vector<double>& weights,
                        const std::vector<double>& inputs);

/// Ring-based WDM neuron, naive variant: per branch, one input ring and one
/// weight ring per channel (2*N*M rings total) at staggered resonances.
/// Channel j is probed at channel_wavelength(j, channel_spacing_nm).
/// `weights` / `inputs` are indexed [channel][branch]; weight signs must be
/// uniform across channels within a branch (one sign shifter per branch).
CircuitGraph build_wdipln_naive(const std::vector<std::vector<double>>& weights,
                                const std::vector<std::vector<double>>& inputs,
                                double channel_spacing_nm);

/// Nominal variant: per branch one large input ring with FSR equal to the
/// channel spacing (all channels see the same input) plus one weight ring per
/// channel — N*(M+1) rings.  `inputs` is indexed [branch].  An explicit
/// large-ring FSR may be given; it must match the spacing within 1%.
CircuitGraph build_wdipln_nominal(const std::vector<std::vector<double>>& weights,
                                  const std::vector<double>& inputs,
                                  double channel_spacing_nm,
                                  double large_ring_fsr_nm = 0.0);

/// Probe wavelength of a WDM channel.  The grid is uniform in inverse
/// wavelength so that it coincides with the shared large ring's resonance
/// comb exactly; `channel_spacing_nm` is the spacing at the base wavelength.
double channel_wavelength(int channel, double channel_spacing_nm,
                          double base_nm = defaults::probe_nm);

/// Number of ring devices in a graph (all branches plus bias).
std::size_t ring_count(const CircuitGraph& circuit);

/// Three-ring add/subtract circuit: bias branch (ring R0 + phase shifter
/// phase0) in parallel with a two-branch tree (R1 + phase shifter phase1;
/// R2 bare).  Each ring's resonance is placed at its target wavelength.
CircuitGraph build_addsub(const std::array<double, 3>& resonance_targets_nm,
                          double phase0, double phase1,
                          const std::optional<std::array<BranchImbalance, 3>>&
                              imbalance = std::nullopt);

/// Resonance targets for the three canonical add/sub detuning rows
/// (row 0: all aligned; row 1: R0 pulled blue; row 2: all staggered).
std::array<double, 3> addsub_row_resonances(int row);

/// Deterministic imbalance preset (bias, branch 1, branch 2) that lands the
/// cancellation floor in the -40..-25 dB band.
std::array<BranchImbalance, 3> addsub_imbalance_preset();

/// Copy of the graph with every branch's imbalance drawn uniformly from
/// amplitude in [1-sigma, 1+sigma] and phase in [-sigma, +sigma] radians.
CircuitGraph randomize_imbalance(const CircuitGraph& circuit, double sigma,
                                 std::uint64_t seed);

}  // namespace wdipln
