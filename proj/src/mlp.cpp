#include "wdipln/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace wdipln {

namespace {

const double cutoff_amp = std::sqrt(0.5);  // amplitude at the -3 dB point

// Smooth surrogate of the cutoff activation used only inside the trainer:
// z * sigmoid(K * (z - cutoff)).  Differentiable everywhere, approaches the
// hard gate as K grows.
constexpr double gate_k = 8.0;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double soft_act(double z) { return z * sigmoid(gate_k * (z - cutoff_amp)); }
double soft_act_d(double z) {
    const double s = sigmoid(gate_k * (z - cutoff_amp));
    return s * (1.0 + gate_k * z * (1.0 - s));
}

std::array<double, 9> clip_params(std::array<double, 9> p) {
    for (double& v : p) v = std::clamp(v, -1.0, 1.0);
    return p;
}

// Training loss on one datapoint: squared error against a 0.95-scaled target
// plus a penalty keeping hidden values inside the encodable range.
double surrogate_loss_and_grad(const MlpModel& m, const Datapoint& dp,
                               std::array<double, 9>* grad) {
    const double zh1 = (dp.x1 * m.w11 + dp.x2 * m.w21 + m.b1) / 2.0;
    const double zh2 = (dp.x1 * m.w12 + dp.x2 * m.w22 + m.b2) / 2.0;
    const double h1 = soft_act(zh1), h2 = soft_act(zh2);
    const double zo = (h1 * m.t1 + h2 * m.t2 + m.bo) / 2.0;
    const double y = soft_act(zo);

    const double err = y - 0.95 * dp.target;
    const double ov1 = std::max(0.0, h1 - 0.95);
    const double ov2 = std::max(0.0, h2 - 0.95);
    const double loss = err * err + 20.0 * (ov1 * ov1 + ov2 * ov2);
    if (!grad) return loss;

    const double dy = 2.0 * err * soft_act_d(zo);
    const double dh1 = dy * m.t1 / 2.0 + 40.0 * ov1;
    const double dh2 = dy * m.t2 / 2.0 + 40.0 * ov2;
    const double dz1 = dh1 * soft_act_d(zh1);
    const double dz2 = dh2 * soft_act_d(zh2);
    (*grad)[0] = dz1 * dp.x1 / 2.0;  // w11
    (*grad)[1] = dz1 * dp.x2 / 2.0;  // w21
    (*grad)[2] = dz2 * dp.x1 / 2.0;  // w12
    (*grad)[3] = dz2 * dp.x2 / 2.0;  // w22
    (*grad)[4] = dz1 / 2.0;          // b1
    (*grad)[5] = dz2 / 2.0;          // b2
    (*grad)[6] = dy * h1 / 2.0;      // t1
    (*grad)[7] = dy * h2 / 2.0;      // t2
    (*grad)[8] = dy / 2.0;           // bo
    return loss;
}

// Feasibility score of the deployment forward pass: zero iff every row is
// classified with margin and all values stay clear of the cutoff knife edge
// and the encoder ceiling.
double violation(const MlpModel& m, const std::array<Datapoint, 4>& data) {
    constexpr double margin = 0.02;
    double v = 0.0;
    for (const Datapoint& dp : data) {
        const ForwardTrace tr = forward(m, dp.x1, dp.x2);
        for (double zh : {tr.zh1, tr.zh2})
            if (zh > 0.0 && std::abs(zh - cutoff_amp) < margin)
                v += margin - std::abs(zh - cutoff_amp);
        for (double h : {tr.h1, tr.h2})
            if (h > 0.98) v += h - 0.98;
        if (dp.target > 0.5)
            v += std::max(0.0, cutoff_amp + margin - tr.zo);
        else
            v += std::max(0.0, tr.zo - (cutoff_amp - margin));
    }
    return v;
}

bool all_correct(const MlpModel& m, const std::array<Datapoint, 4>& data) {
    for (const Datapoint& dp : data)
        if (forward(m, dp.x1, dp.x2).prediction != static_cast<int>(dp.target + 0.5))
            return false;
    return true;
}

// Plain-ReLU forward/gradient for the trainer correctness oracle.
double relu_loss(const MlpModel& m, const Datapoint& dp,
                 std::array<double, 9>* grad) {
    const double zh1 = (dp.x1 * m.w11 + dp.x2 * m.w21 + m.b1) / 2.0;
    const double zh2 = (dp.x1 * m.w12 + dp.x2 * m.w22 + m.b2) / 2.0;
    const double h1 = std::max(0.0, zh1), h2 = std::max(0.0, zh2);
    const double zo = (h1 * m.t1 + h2 * m.t2 + m.bo) / 2.0;
    const double y = std::max(0.0, zo);
    const double err = y - dp.target;
    if (!grad) return err * err;
    const double dy = 2.0 * err * (zo > 0.0 ? 1.0 : 0.0);
    const double dz1 = dy * m.t1 / 2.0 * (zh1 > 0.0 ? 1.0 : 0.0);
    const double dz2 = dy * m.t2 / 2.0 * (zh2 > 0.0 ? 1.0 : 0.0);
    (*grad)[0] = dz1 * dp.x1 / 2.0;
    (*grad)[1] = dz1 * dp.x2 / 2.0;
    (*grad)[2] = dz2 * dp.x1 / 2.0;
    (*grad)[3] = dz2 * dp.x2 / 2.0;
    (*grad)[4] = dz1 / 2.0;
    (*grad)[5] = dz2 / 2.0;
    (*grad)[6] = dy * h1 / 2.0;
    (*grad)[7] = dy * h2 / 2.0;
    (*grad)[8] = dy / 2.0;
    return err * err;
}

}  // namespace

std::array<double, 9> MlpModel::as_array() const {
    return {w11, w21, w12, w22, b1, b2, t1, t2, bo};
}

MlpModel MlpModel::from_array(const std::array<double, 9>& p) {
    return {p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], p[8]};
}

std::array<Datapoint, 4> truth_table(GateTask task) {
    auto tgt = [&](double a, double b) -> double {
        switch (task) {
            case GateTask::And: return a > 0.5 && b > 0.5 ? 1.0 : 0.0;
            case GateTask::Or: return a > 0.5 || b > 0.5 ? 1.0 : 0.0;
            case GateTask::Xor: return (a > 0.5) != (b > 0.5) ? 1.0 : 0.0;
        }
        return 0.0;
    };
    return {Datapoint{0, 0, tgt(0, 0)}, Datapoint{0, 1, tgt(0, 1)},
            Datapoint{1, 0, tgt(1, 0)}, Datapoint{1, 1, tgt(1, 1)}};
}

std::string gate_name(GateTask task) {
    switch (task) {
        case GateTask::And: return "and";
        case GateTask::Or: return "or";
        case GateTask::Xor: return "xor";
    }
    return "?";
}

GateTask parse_gate(const std::string& name) {
    if (name == "and") return GateTask::And;
    if (name == "or") return GateTask::Or;
    if (name == "xor") return GateTask::Xor;
    throw std::invalid_argument("unknown gate '" + name +
                                "' (expected and|or|xor)");
}

double activation_3db(double readout, double reference_power) {
    if (!(reference_power > 0.0))
        throw std::invalid_argument("activation_3db: reference power must be "
                                    "positive");
    if (readout <= 0.0) return 0.0;
    return readout * readout < reference_power / 2.0 ? 0.0 : readout;
}

ForwardTrace forward(const MlpModel& m, double x1, double x2) {
    ForwardTrace tr;
    tr.zh1 = (x1 * m.w11 + x2 * m.w21 + m.b1) / 2.0;
    tr.zh2 = (x1 * m.w12 + x2 * m.w22 + m.b2) / 2.0;
    tr.h1 = activation_3db(tr.zh1, 1.0);
    tr.h2 = activation_3db(tr.zh2, 1.0);
    tr.zo = (tr.h1 * m.t1 + tr.h2 * m.t2 + m.bo) / 2.0;
    tr.out = activation_3db(tr.zo, 1.0);
    tr.prediction = tr.out > 0.5 ? 1 : 0;
    return tr;
}

MlpModel train(GateTask task, std::uint64_t seed, const Hyperparams& hp) {
    const std::array<Datapoint, 4> data = truth_table(task);
    for (int restart = 0; restart <= hp.max_restarts; ++restart) {
        std::mt19937_64 rng(seed * 7919 + static_cast<std::uint64_t>(restart));
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::array<double, 9> p;
        for (double& v : p) v = uni(rng);

        // Full-batch gradient descent on the smooth surrogate.
        for (int it = 0; it < hp.iterations; ++it) {
            std::array<double, 9> total{};
            for (const Datapoint& dp : data) {
                std::array<double, 9> g;
                surrogate_loss_and_grad(MlpModel::from_array(p), dp, &g);
                for (int k = 0; k < 9; ++k) total[k] += g[k];
            }
            for (int k = 0; k < 9; ++k)
                p[k] -= hp.learning_rate * total[k] / 4.0;
            p = clip_params(p);
        }

        // Feasibility polish: random-direction descent on the deployment-
        // forward violation score.
        std::normal_distribution<double> normal(0.0, 1.0);
        double step = hp.polish_step;
        double best = violation(MlpModel::from_array(p), data);
        for (int it = 0; it < hp.polish_steps && best > 0.0; ++it) {
            std::array<double, 9> dir;
            double norm = 0.0;
            for (double& d : dir) { d = normal(rng); norm += d * d; }
            norm = std::sqrt(std::max(norm, 1e-12));
            std::array<double, 9> prop = p;
            for (int k = 0; k < 9; ++k) prop[k] += step * dir[k] / norm;
            prop = clip_params(prop);
            const double v = violation(MlpModel::from_array(prop), data);
            if (v <= best) { best = v; p = prop; }
            step = std::max(0.01, step * 0.999);
        }

        const MlpModel model = MlpModel::from_array(p);
        if (best == 0.0 && all_correct(model, data)) return model;
    }
    throw std::runtime_error("train: no restart converged for gate '" +
                             gate_name(task) +
                             "'; retry with a different seed");
}

bool near_relu_kink(const MlpModel& m, const Datapoint& dp, double margin) {
    const double zh1 = (dp.x1 * m.w11 + dp.x2 * m.w21 + m.b1) / 2.0;
    const double zh2 = (dp.x1 * m.w12 + dp.x2 * m.w22 + m.b2) / 2.0;
    const double h1 = std::max(0.0, zh1), h2 = std::max(0.0, zh2);
    const double zo = (h1 * m.t1 + h2 * m.t2 + m.bo) / 2.0;
    return std::abs(zh1) < margin || std::abs(zh2) < margin ||
           std::abs(zo) < margin;
}

double gradient_check(const MlpModel& model, const Datapoint& dp, double eps) {
    std::array<double, 9> analytic;
    relu_loss(model, dp, &analytic);
    std::array<double, 9> p = model.as_array();
    double worst = 0.0;
    for (int k = 0; k < 9; ++k) {
        std::array<double, 9> hi = p, lo = p;
        hi[k] += eps;
        lo[k] -= eps;
        const double numeric = (relu_loss(MlpModel::from_array(hi), dp, nullptr) -
                                relu_loss(MlpModel::from_array(lo), dp, nullptr)) /
                               (2.0 * eps);
        const double rel = std::abs(analytic[k] - numeric) /
                           std::max(1.0, std::abs(analytic[k]));
        worst = std::max(worst, rel);
    }
    return worst;
}

ExperimentLog run_gate_experiment(GateTask task, const MlpModel& model,
                                  const std::optional<NoiseSpec>& noise,
                                  std::uint64_t seed) {
    const std::array<Datapoint, 4> data = truth_table(task);
    ExperimentLog log;
    log.gate = gate_name(task);
    log.seed = seed;
    log.noise_sigma = noise ? noise->sigma : 0.0;

    // The cutoff reference is the all-ones constructive configuration.
    NeuronConfig ref_cfg;
    ref_cfg.weights = {1.0, 1.0};
    ref_cfg.inputs = {1.0, 1.0};
    const double ref_readout = neuron_readout(configure(ref_cfg));
    log.reference_power = ref_readout * ref_readout;

    const std::array<std::array<double, 2>, 3> stage_weights = {
        std::array<double, 2>{model.w11, model.w21},
        std::array<double, 2>{model.w12, model.w22},
        std::array<double, 2>{model.t1, model.t2}};
    const std::array<double, 3> stage_bias = {model.b1, model.b2, model.bo};
    const std::array<std::string, 3> stage_names = {"h1", "h2", "out"};

    std::array<std::array<double, 2>, 4> hidden{};  // recycled activations

    for (int stage = 0; stage < 3; ++stage) {
        StageLog sl;
        sl.stage = stage_names[stage];
        sl.weights = stage_weights[stage];
        sl.bias = stage_bias[stage];
        for (int row = 0; row < 4; ++row) {
            StageRow r;
            r.inputs = stage < 2
                           ? std::array<double, 2>{data[row].x1, data[row].x2}
                           : hidden[row];
            NeuronConfig cfg;
            cfg.weights = {sl.weights[0], sl.weights[1]};
            cfg.inputs = {std::clamp(r.inputs[0], 0.0, 1.0),
                          std::clamp(r.inputs[1], 0.0, 1.0)};
            cfg.bias = sl.bias;
            cfg.probe_nm = log.probe_nm;
            ConfiguredNeuron cn = configure(cfg);
            if (noise && noise->sigma > 0.0)
                cn.graph = randomize_imbalance(
                    cn.graph, noise->sigma,
                    noise->seed + 1000003u * stage + 7919u * row);
            r.raw = signed_readout(cn);
            r.activated = activation_3db(r.raw, log.reference_power);

            // Readout statistics over the +/-50 pm probe window.
            double sum = 0.0, sum2 = 0.0;
            constexpr int half = 10;  // 5 pm steps
            for (int k = -half; k <= half; ++k) {
                const double lam = log.probe_nm + k * 5e-3;
                const double v = readout(evaluate(cn.graph, lam),
                                         cn.reference_power);
                sum += v;
                sum2 += v * v;
            }
            const int cnt = 2 * half + 1;
            r.window_mean = sum / cnt;
            r.window_std = std::sqrt(
                std::max(0.0, sum2 / cnt - r.window_mean * r.window_mean));

            const ForwardTrace tr = forward(model, data[row].x1, data[row].x2);
            r.software = stage == 0 ? tr.h1 : stage == 1 ? tr.h2 : tr.out;
            log.max_stage_error = std::max(log.max_stage_error,
                                           std::abs(r.activated - r.software));
            if (stage < 2) hidden[row][stage] = r.activated;
            if (stage == 2) {
                log.predictions[row] = r.activated > 0.5 ? 1 : 0;
                log.targets[row] = static_cast<int>(data[row].target + 0.5);
            }
            sl.rows.push_back(r);
        }
        log.stages.push_back(std::move(sl));
    }

    int correct = 0;
    for (int row = 0; row < 4; ++row)
        if (log.predictions[row] == log.targets[row]) ++correct;
    log.accuracy = correct / 4.0;
    return log;
}

std::string experiment_to_json(const ExperimentLog& log) {
    nlohmann::json j;
    j["gate"] = log.gate;
    j["seed"] = log.seed;
    j["probe_nm"] = log.probe_nm;
    j["reference_power"] = log.reference_power;
    j["noise_sigma"] = log.noise_sigma;
    j["predictions"] = log.predictions;
    j["targets"] = log.targets;
    j["accuracy"] = log.accuracy;
    j["max_stage_error"] = log.max_stage_error;
    j["stages"] = nlohmann::json::array();
    for (const StageLog& sl : log.stages) {
        nlohmann::json js;
        js["stage"] = sl.stage;
        js["weights"] = sl.weights;
        js["bias"] = sl.bias;
        js["rows"] = nlohmann::json::array();
        for (const StageRow& r : sl.rows)
            js["rows"].push_back({{"inputs", r.inputs},
                                  {"raw_readout", r.raw},
                                  {"activated", r.activated},
                                  {"software", r.software},
                                  {"window_mean", r.window_mean},
                                  {"window_std", r.window_std}});
        j["stages"].push_back(std::move(js));
    }
    return j.dump(2) + "\n";
}

std::string experiment_to_csv(const ExperimentLog& log) {
    std::ostringstream os;
    os.precision(17);
    os << "stage,input_1,input_2,raw_readout,activated,target,correct\n";
    for (std::size_t s = 0; s < log.stages.size(); ++s) {
        const StageLog& sl = log.stages[s];
        for (std::size_t row = 0; row < sl.rows.size(); ++row) {
            const StageRow& r = sl.rows[row];
            os << sl.stage << ',' << r.inputs[0] << ',' << r.inputs[1] << ','
               << r.raw << ',' << r.activated << ',';
            if (sl.stage == "out")
                os << log.targets[row] << ','
                   << (log.predictions[row] == log.targets[row] ? 1 : 0);
            else
                os << ',';
            os << '\n';
        }
    }
    return os.str();
}

}  // namespace wdipln
