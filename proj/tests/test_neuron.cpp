#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "wdipln/neuron.hpp"

using namespace wdipln;

namespace {
constexpr double pi = std::numbers::pi;

double wrap_pi(double x) {
    while (x > pi) x -= 2.0 * pi;
    while (x < -pi) x += 2.0 * pi;
    return x;
}
}  // namespace

TEST_CASE("expected_mac hand arithmetic") {
    CHECK(expected_mac({{1, 1}, {1, 1}, std::nullopt}) == doctest::Approx(1.0));
    CHECK(expected_mac({{1, -1}, {1, 1}, std::nullopt}) == doctest::Approx(0.0));
    CHECK(expected_mac({{0.5, -0.25, 0.75}, {1, 1, 0.5}, std::nullopt}) ==
          doctest::Approx((0.5 - 0.25 + 0.375) / 3.0).epsilon(1e-12));
    CHECK(expected_mac({{0.5, 0.5}, {1, 1}, 0.4}) ==
          doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("neuron config validation") {
    CHECK_THROWS_AS(expected_mac({{1.0}, {1.0, 1.0}, std::nullopt}),
                    std::invalid_argument);
    CHECK_THROWS_AS(expected_mac({{1.5}, {1.0}, std::nullopt}),
                    std::invalid_argument);
    CHECK_THROWS_AS(expected_mac({{1.0}, {-0.1}, std::nullopt}),
                    std::invalid_argument);
    CHECK_THROWS_AS(expected_mac({{1.0}, {1.0}, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(expected_mac({{}, {}, std::nullopt}), std::invalid_argument);
}

TEST_CASE("readout normalizes the detected magnitude") {
    CHECK(readout({0.5, 0.0}, 0.25) == doctest::Approx(1.0));
    CHECK(readout({0.0, 0.0}, 1.0) == 0.0);
    CHECK(readout({0.5, 0.0}, 1.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(readout({1.0, 0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("encoding round-trip accuracy over the usable range") {
    const RingDevice tmpl = make_calibrated_ring();
    const RingEncoder encoder(tmpl, defaults::probe_nm, +1);
    for (double t = 0.01; t <= 0.99; t += 0.01) {
        const Encoding e = encoder.encode(t);
        const double achieved =
            std::abs(ring_transfer(encoder.ring_at(e), defaults::probe_nm));
        CHECK(std::abs(achieved - t) <= 1e-6);
    }
}

TEST_CASE("encoding table is monotone and exports CSV") {
    const RingDevice tmpl = make_calibrated_ring();
    const RingEncoder encoder(tmpl, defaults::probe_nm, +1);
    const EncodingTable table(encoder, defaults::v_on, 51);
    CHECK(table.rows().size() == 51);
    CHECK(table.monotone_detuning());
    std::ostringstream os;
    table.export_csv(os);
    CHECK(os.str().rfind("target,voltage_v,achieved_magnitude,residual_phase_rad\n",
                         0) == 0);
}

TEST_CASE("configure: canonical examples") {
    // All-ones constructive configuration reads ~1.
    CHECK(std::abs(neuron_readout(configure({{1, 1}, {1, 1}, std::nullopt})) -
                   1.0) <= 1e-3);
    // Perfect cancellation.
    CHECK(neuron_readout(configure({{1, -1}, {1, 1}, std::nullopt})) <= 1e-3);
}

TEST_CASE("binary logic encoding uses the global bias pair") {
    const ConfiguredNeuron on = configure({{1, 1}, {1.0, 0.0}, std::nullopt},
                                          InputEncodingMode::Binary);
    const auto& r0 = std::get<RingDevice>(on.graph.branches[0].devices[0]);
    const auto& r1 = std::get<RingDevice>(on.graph.branches[1].devices[0]);
    CHECK(r0.voltage == doctest::Approx(defaults::v_on));
    CHECK(r1.voltage == doctest::Approx(defaults::v_off));
    CHECK_THROWS_AS(configure({{1.0}, {0.5}, std::nullopt},
                              InputEncodingMode::Binary),
                    std::invalid_argument);
}

TEST_CASE("MAC oracle agreement over 1e3 random configurations") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> width(1, 8);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = width(rng);
        NeuronConfig cfg;
        for (int i = 0; i < n; ++i) {
            cfg.weights.push_back(2.0 * u(rng) - 1.0);
            cfg.inputs.push_back(u(rng));
        }
        if (trial % 2) cfg.bias = 2.0 * u(rng) - 1.0;
        const double got = neuron_readout(configure(cfg));
        const double want = std::abs(expected_mac(cfg));
        worst = std::max(worst, std::abs(got - want));
    }
    CHECK(worst <= 2e-3);
}

TEST_CASE("sign readout matches the expected sign away from the null") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    while (checked < 200) {
        NeuronConfig cfg;
        for (int i = 0; i < 3; ++i) {
            cfg.weights.push_back(2.0 * u(rng) - 1.0);
            cfg.inputs.push_back(u(rng));
        }
        cfg.bias = 2.0 * u(rng) - 1.0;
        const double want = expected_mac(cfg);
        if (std::abs(want) <= 0.05) continue;  // ill-conditioned near the null
        const ConfiguredNeuron cn = configure(cfg);
        const double phase = std::arg(evaluate(cn.graph, cn.probe_nm));
        const double target = want > 0.0 ? 0.0 : pi;
        CHECK(std::abs(wrap_pi(phase - target)) <= 0.1);
        CHECK(signed_readout(cn) * want > 0.0);
        ++checked;
    }
}

TEST_CASE("channel-wise accuracy with up to 4 channels") {
    const RingDevice probe = make_calibrated_ring();
    const double spacing = 24.0 * probe.linewidth_fwhm_nm(defaults::probe_nm);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.1, 0.95);
    for (int m : {2, 4}) {
        const int n = 3;
        std::vector<std::vector<double>> w(m, std::vector<double>(n));
        std::vector<std::vector<double>> x(m, std::vector<double>(n));
        std::vector<double> sign(n);
        for (int b = 0; b < n; ++b) sign[b] = (b % 2) ? -1.0 : 1.0;
        for (int j = 0; j < m; ++j)
            for (int b = 0; b < n; ++b) {
                w[j][b] = sign[b] * u(rng);
                x[j][b] = u(rng);
            }
        const CircuitGraph g = build_wdipln_naive(w, x, spacing);
        for (int j = 0; j < m; ++j) {
            double want = 0.0;
            for (int b = 0; b < n; ++b) want += w[j][b] * x[j][b];
            want = std::abs(want) / n;
            const double got =
                std::abs(evaluate(g, channel_wavelength(j, spacing)));
            CHECK(std::abs(got - want) <= 0.01 * std::max(want, 0.1));
        }
    }
}

TEST_CASE("unencodable magnitude reports a calibration failure") {
    // A tightly capped encoder cannot reach large magnitudes.
    const RingDevice tmpl = make_calibrated_ring();
    const RingEncoder tight(tmpl, defaults::probe_nm, +1, 0.05);
    CHECK(tight.max_magnitude() < 0.9);
    // encode() clamps rather than throwing; configure() is the layer that
    // signals calibration failure.
    const Encoding e = tight.encode(0.99);
    CHECK(e.achieved_magnitude <= tight.max_magnitude() + 1e-9);
    CHECK_THROWS_AS(RingEncoder(tmpl, defaults::probe_nm, 0),
                    std::invalid_argument);
}
