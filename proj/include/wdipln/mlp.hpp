#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wdipln/neuron.hpp"

namespace wdipln {

/// Fixed 2-2-1 architecture.  Hidden pre-activations are tree-normalized the
/// same way the circuit is: z = (x1*w1 + x2*w2 + b) / 2.
struct MlpModel {
    double w11 = 0.0, w21 = 0.0;  // hidden node 1 weights
    double w12 = 0.0, w22 = 0.0;  // hidden node 2 weights
    double b1 = 0.0, b2 = 0.0;    // hidden biases
    double t1 = 0.0, t2 = 0.0;    // output weights
    double bo = 0.0;              // output bias

    std::array<double, 9> as_array() const;
    static MlpModel from_array(const std::array<double, 9>& p);
};

enum class GateTask { And, Or, Xor };

struct Datapoint {
    double x1 = 0.0, x2 = 0.0;
    double target = 0.0;  // 0 or 1
};

std::array<Datapoint, 4> truth_table(GateTask task);
std::string gate_name(GateTask task);
GateTask parse_gate(const std::string& name);

struct Hyperparams {
    int iterations = 2500;
    double learning_rate = 0.5;
    int polish_steps = 8000;
    double polish_step = 0.2;
    int max_restarts = 60;
};

/// Deployment forward pass: hidden and output nodes use the 3 dB-cutoff
/// activation with unit reference (normalized units).
struct ForwardTrace {
    double zh1 = 0.0, zh2 = 0.0;  // hidden pre-activations
    double h1 = 0.0, h2 = 0.0;    // activated hidden values
    double zo = 0.0;              // output pre-activation
    double out = 0.0;             // activated output
    int prediction = 0;           // out > 0.5
};

ForwardTrace forward(const MlpModel& model, double x1, double x2);

/// ReLU-style cutoff: passes the readout amplitude unchanged when its power
/// clears half the reference power, zero otherwise (and zero for negative
/// readouts).
double activation_3db(double readout, double reference_power);

/// Trains until the deployment forward pass classifies all four rows with
/// comfortable margins; deterministic given (task, seed, hyperparams).
/// Throws std::runtime_error when no restart converges.
MlpModel train(GateTask task, std::uint64_t seed,
               const Hyperparams& hp = Hyperparams{});

/// Plain-ReLU squared-error loss used as the trainer correctness oracle:
/// analytic gradient vs central differences; returns the max relative error
/// over the 9 parameters.
double gradient_check(const MlpModel& model, const Datapoint& dp,
                      double eps = 1e-5);

/// True when any pre-activation sits within `margin` of a ReLU kink for this
/// datapoint (such rows are excluded from gradient checking).
bool near_relu_kink(const MlpModel& model, const Datapoint& dp,
                    double margin = 1e-3);

// ---------------------------------------------------------------------------
// Configure-recycle experiment

struct NoiseSpec {
    double sigma = 0.0;          // uniform imbalance half-width
    std::uint64_t seed = 0;      // perturbation stream
};

struct StageRow {
    std::array<double, 2> inputs{};  // values fed this stage
    double raw = 0.0;                // signed readout at the probe
    double activated = 0.0;
    double software = 0.0;           // matching software-model value
    double window_mean = 0.0;        // |readout| stats over the +/-50 pm window
    double window_std = 0.0;
};

struct StageLog {
    std::string stage;               // "h1", "h2", "out"
    std::array<double, 2> weights{};
    double bias = 0.0;
    std::vector<StageRow> rows;      // 4, truth-table order
};

struct ExperimentLog {
    std::string gate;
    std::uint64_t seed = 0;
    double probe_nm = defaults::probe_nm;
    double reference_power = 1.0;    // 3 dB-cutoff reference (power)
    double noise_sigma = 0.0;
    std::vector<StageLog> stages;    // 3
    std::array<int, 4> predictions{};
    std::array<int, 4> targets{};
    double accuracy = 0.0;
    double max_stage_error = 0.0;    // worst |activated - software|
};

/// Runs the three-stage configure-recycle protocol on the photonic circuit:
/// stage 1 maps [w11, w21] + b1, stage 2 maps [w12, w22] + b2 (hidden
/// values), stage 3 maps [t1, t2] + bo and feeds the recorded (h1, h2).
ExperimentLog run_gate_experiment(GateTask task, const MlpModel& model,
                                  const std::optional<NoiseSpec>& noise =
                                      std::nullopt,
                                  std::uint64_t seed = 0);

std::string experiment_to_json(const ExperimentLog& log);
std::string experiment_to_csv(const ExperimentLog& log);

}  // namespace wdipln
