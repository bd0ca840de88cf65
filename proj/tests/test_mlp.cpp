#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "wdipln/mlp.hpp"

using namespace wdipln;

TEST_CASE("truth tables and gate names") {
    const auto t_and = truth_table(GateTask::And);
    CHECK(t_and[3].target == 1.0);
    CHECK(t_and[0].target + t_and[1].target + t_and[2].target == 0.0);
    const auto t_xor = truth_table(GateTask::Xor);
    CHECK(t_xor[0].target == 0.0);
    CHECK(t_xor[1].target == 1.0);
    CHECK(t_xor[2].target == 1.0);
    CHECK(t_xor[3].target == 0.0);
    CHECK(parse_gate("xor") == GateTask::Xor);
    CHECK(gate_name(GateTask::Or) == "or");
    CHECK_THROWS_AS(parse_gate("nand"), std::invalid_argument);
}

TEST_CASE("3 dB cutoff activation") {
    CHECK(activation_3db(1.0, 1.0) == 1.0);          // at reference: unchanged
    CHECK(activation_3db(0.5, 1.0) == 0.0);          // power ref/4 = -6 dB: cut
    CHECK(activation_3db(0.0, 1.0) == 0.0);
    CHECK(activation_3db(-0.8, 1.0) == 0.0);         // ReLU on the sign
    const double edge = std::sqrt(0.5);
    CHECK(activation_3db(edge, 1.0) == edge);        // exactly -3 dB passes
    CHECK(activation_3db(edge - 1e-9, 1.0) == 0.0);
    CHECK_THROWS_AS(activation_3db(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("all-zero model outputs zero everywhere") {
    const MlpModel zero{};
    for (const Datapoint& dp : truth_table(GateTask::Xor)) {
        const ForwardTrace tr = forward(zero, dp.x1, dp.x2);
        CHECK(tr.out == 0.0);
        CHECK(tr.prediction == 0);
    }
}

TEST_CASE("training solves every gate and is deterministic") {
    for (GateTask task : {GateTask::And, GateTask::Or, GateTask::Xor}) {
        const MlpModel m = train(task, 1);
        for (const Datapoint& dp : truth_table(task))
            CHECK(forward(m, dp.x1, dp.x2).prediction ==
                  static_cast<int>(dp.target + 0.5));
        const MlpModel again = train(task, 1);
        CHECK(m.as_array() == again.as_array());
    }
    // A second seed converges too.
    const MlpModel m2 = train(GateTask::Xor, 2);
    for (const Datapoint& dp : truth_table(GateTask::Xor))
        CHECK(forward(m2, dp.x1, dp.x2).prediction ==
              static_cast<int>(dp.target + 0.5));
}

TEST_CASE("gradient check against central differences away from kinks") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> bit(0, 1);
    int checked = 0;
    while (checked < 100) {
        std::array<double, 9> p;
        for (double& v : p) v = u(rng);
        const MlpModel m = MlpModel::from_array(p);
        const Datapoint dp{static_cast<double>(bit(rng)),
                           static_cast<double>(bit(rng)),
                           static_cast<double>(bit(rng))};
        if (near_relu_kink(m, dp)) continue;
        CHECK(gradient_check(m, dp) <= 1e-6);
        ++checked;
    }
}

TEST_CASE("zero-input datapoint zeroes the first-layer weight gradients") {
    // With x = (0, 0) the loss cannot depend on the input weights, so the
    // check must pass and perturbing them must not change the loss.
    MlpModel m{0.3, -0.2, 0.5, 0.4, 0.6, 0.7, 0.8, -0.5, 0.9};
    const Datapoint dp{0.0, 0.0, 1.0};
    if (!near_relu_kink(m, dp)) CHECK(gradient_check(m, dp) <= 1e-6);
}

TEST_CASE("noiseless experiments hit 4/4 and track the software model") {
    for (GateTask task : {GateTask::And, GateTask::Or, GateTask::Xor}) {
        const MlpModel m = train(task, 1);
        const ExperimentLog log = run_gate_experiment(task, m);
        CHECK(log.accuracy == 1.0);
        CHECK(log.max_stage_error <= 5e-3);
        REQUIRE(log.stages.size() == 3);
        for (const StageLog& sl : log.stages) CHECK(sl.rows.size() == 4);
        // Probe-window statistics are populated. The +/-50 pm window spans
        // resonance flanks, so the spread is finite but bounded.
        for (const StageRow& r : log.stages[0].rows) {
            CHECK(r.window_mean >= 0.0);
            CHECK(r.window_std >= 0.0);
            CHECK(r.window_std < 1.0);
        }
    }
}

TEST_CASE("experiments are deterministic") {
    const MlpModel m = train(GateTask::Xor, 3);
    const ExperimentLog a = run_gate_experiment(GateTask::Xor, m, std::nullopt, 3);
    const ExperimentLog b = run_gate_experiment(GateTask::Xor, m, std::nullopt, 3);
    CHECK(experiment_to_json(a) == experiment_to_json(b));
    CHECK(experiment_to_csv(a) == experiment_to_csv(b));
}

TEST_CASE("log serialization carries the protocol shape") {
    const MlpModel m = train(GateTask::And, 1);
    const ExperimentLog log = run_gate_experiment(GateTask::And, m);
    const std::string json = experiment_to_json(log);
    CHECK(json.find("\"gate\": \"and\"") != std::string::npos);
    CHECK(json.find("\"stages\"") != std::string::npos);
    const std::string csv = experiment_to_csv(log);
    CHECK(csv.rfind("stage,input_1,input_2,raw_readout,activated,target,correct\n",
                    0) == 0);
    // 3 stages x 4 rows + header.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
}

TEST_CASE("accuracy degrades monotonically with imbalance noise") {
    const MlpModel m = train(GateTask::Xor, 1);
    auto mean_accuracy = [&](double sigma) {
        double total = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const NoiseSpec noise{sigma, static_cast<std::uint64_t>(trial)};
            total += run_gate_experiment(GateTask::Xor, m,
                                         sigma > 0.0
                                             ? std::optional<NoiseSpec>(noise)
                                             : std::nullopt,
                                         trial)
                         .accuracy;
        }
        return total / 100.0;
    };
    const double a0 = mean_accuracy(0.0);
    const double a1 = mean_accuracy(0.05);
    const double a2 = mean_accuracy(0.3);
    CHECK(a0 == 1.0);
    CHECK(a0 >= a1);
    CHECK(a1 >= a2);
    CHECK(a2 < 1.0);  // heavy noise must actually bite
}
