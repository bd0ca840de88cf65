#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "wdipln/devices.hpp"

using namespace wdipln;

namespace {

// Ring with no dispersion and no tuning, resonant exactly at `lambda_nm`
// (roundtrip length chosen as an integer number of wavelengths).
RingDevice flat_ring(double a, double r, double lambda_nm, int order = 99) {
    RingDevice ring;
    ring.r = r;
    ring.a0 = a;
    ring.n_eff0 = 2.4;
    ring.n_group = 2.4;  // n_eff == n_group: zero first-order dispersion
    ring.dn_dV = 0.0;
    ring.da_dV = 0.0;
    ring.voltage = 0.0;
    ring.lambda_ref_nm = lambda_nm;
    ring.roundtrip_length_um = order * lambda_nm / ring.n_eff0 * 1e-3;
    return ring;
}

}  // namespace

TEST_CASE("critical coupling gives zero transmission at resonance") {
    const RingDevice ring = flat_ring(0.9, 0.9, 1526.0);
    CHECK(std::abs(ring_transfer(ring, 1526.0)) <= 1e-10);
    CHECK(ring.coupling_regime() == CouplingRegime::CriticallyCoupled);
}

TEST_CASE("lossless all-pass ring is unimodular at every wavelength") {
    const RingDevice ring = flat_ring(1.0, 0.9, 1526.0);
    for (double lam = 1520.0; lam < 1532.0; lam += 0.037)
        CHECK(std::abs(std::abs(ring_transfer(ring, lam)) - 1.0) <= 1e-10);
}

TEST_CASE("under-coupled resonance magnitude matches the closed form") {
    // |E| at resonance = (r - a) / (1 - r*a) for a < r.
    const RingDevice ring = flat_ring(0.90, 0.95, 1526.0);
    const double expected = 0.05 / (1.0 - 0.95 * 0.90);
    CHECK(std::abs(ring_transfer(ring, 1526.0)) ==
          doctest::Approx(expected).epsilon(1e-9));
    CHECK(expected == doctest::Approx(0.34482758620689657));
}

TEST_CASE("coupling regime classification") {
    CHECK(classify_coupling(0.99, 0.90) == CouplingRegime::OverCoupled);
    CHECK(classify_coupling(0.90, 0.99) == CouplingRegime::UnderCoupled);
    CHECK(classify_coupling(0.95, 0.95) == CouplingRegime::CriticallyCoupled);
    CHECK(classify_coupling(0.95, 0.95 + 1e-10) ==
          CouplingRegime::CriticallyCoupled);
}

TEST_CASE("kappa is derived from r with kappa^2 + r^2 = 1") {
    RingDevice ring;
    ring.r = 0.98;
    CHECK(ring.kappa() * ring.kappa() + ring.r * ring.r ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phase winding dichotomy on canonical rings") {
    auto winding = [](double a, double r) {
        RingDevice ring = flat_ring(a, r, 1526.0);
        const double res = ring.resonant_wavelength_near(1526.0);
        const double fsr = ring.fsr_nm(res);
        return ring_phase_winding(ring, res - 0.45 * fsr, res + 0.45 * fsr);
    };
    CHECK(winding(0.99, 0.90) == 1);  // over-coupled: 2*pi wrap
    CHECK(winding(0.90, 0.99) == 0);  // under-coupled: flat phase
    CHECK(winding(1.00, 0.90) == 1);  // lossless is maximally over-coupled
}

TEST_CASE("phase winding rejects degenerate sweeps") {
    const RingDevice ring = flat_ring(0.9, 0.95, 1526.0);
    CHECK_THROWS_AS(ring_phase_winding(ring, 1520.0, 1530.0, 8),
                    std::invalid_argument);
    CHECK_THROWS_AS(ring_phase_winding(ring, 1530.0, 1520.0),
                    std::invalid_argument);
}

TEST_CASE("winding dichotomy holds over 1e3 random rings") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> coup(0.55, 0.995);
    int checked = 0;
    while (checked < 1000) {
        const double a = coup(rng), r = coup(rng);
        if (std::abs(a - r) <= 1e-3) continue;
        RingDevice ring = flat_ring(a, r, 1526.0);
        const double res = ring.resonant_wavelength_near(1526.0);
        const double fsr = ring.fsr_nm(res);
        const int w = ring_phase_winding(ring, res - 0.45 * fsr, res + 0.45 * fsr);
        CHECK(w == (a > r ? 1 : 0));
        ++checked;
    }
}

TEST_CASE("passivity over 1e4 random parameter draws") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> amp(0.0, 1.0);
    std::uniform_real_distribution<double> selfc(0.0, 0.999);
    std::uniform_real_distribution<double> lam(1400.0, 1700.0);
    std::uniform_real_distribution<double> ph(-10.0, 10.0);
    std::uniform_real_distribution<double> loss(0.0, 30.0);
    for (int i = 0; i < 10000; ++i) {
        RingDevice ring = flat_ring(amp(rng), selfc(rng), 1526.0);
        CHECK(std::abs(ring_transfer(ring, lam(rng))) <= 1.0 + 1e-12);
        const PhaseShifterDevice ps{ph(rng), loss(rng)};
        CHECK(std::abs(phase_shifter_transfer(ps, {1.0, 0.0})) <= 1.0 + 1e-12);
        const MzmDevice mzm{ph(rng)};
        CHECK(std::abs(mzm_transfer(mzm, {1.0, 0.0})) <= 1.0 + 1e-12);
    }
}

TEST_CASE("critical-coupling null down to |a - r| <= 1e-12") {
    const double r = 0.9;
    const RingDevice ring = flat_ring(r + 1e-13, r, 1526.0);
    CHECK(std::abs(ring_transfer(ring, 1526.0)) <= 1e-10);
}

TEST_CASE("field-level linearity of every transfer") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const FieldAmplitude x{u(rng), u(rng)};
        const FieldAmplitude c{u(rng), u(rng)};
        const PhaseShifterDevice ps{u(rng), std::abs(u(rng))};
        CHECK(std::abs(phase_shifter_transfer(ps, c * x) -
                       c * phase_shifter_transfer(ps, x)) <= 1e-12);
        const MzmDevice mzm{u(rng)};
        CHECK(std::abs(mzm_transfer(mzm, c * x) - c * mzm_transfer(mzm, x)) <=
              1e-12);
        // The ring transfer is a multiplicative coefficient, so field-level
        // linearity is exact by construction.
        const RingDevice ring = flat_ring(0.9, 0.95, 1526.0);
        const FieldAmplitude t = ring_transfer(ring, 1526.3);
        CHECK(std::abs(t * (c * x) - c * (t * x)) <= 1e-12);
    }
}

TEST_CASE("periodicity: transfers repeat one FSR apart") {
    const RingDevice ring = make_calibrated_ring();
    const double l1 = ring.resonant_wavelength_near(1526.0);
    const double l2 = ring.resonant_wavelength_near(l1 + ring.fsr_nm(l1));
    // Adjacent resonances sit one FSR apart to first order in dispersion
    // (FSR evaluated mid-span).
    const double fsr = ring.fsr_nm(0.5 * (l1 + l2));
    CHECK(std::abs((l2 - l1) - fsr) / fsr <= 1e-3);
    // Off-resonance magnitudes repeat after one period.
    for (double d : {0.2, 0.8, 2.1}) {
        const double m1 = std::abs(ring_transfer(ring, l1 + d));
        const double m2 = std::abs(ring_transfer(ring, l2 + d));
        CHECK(std::abs(m1 - m2) / m1 <= 1e-3);
    }
}

TEST_CASE("phase shifter examples") {
    CHECK(std::abs(phase_shifter_transfer({3.14159265358979323846, 0.0},
                                          {1.0, 0.0}) -
                   FieldAmplitude{-1.0, 0.0}) <= 1e-12);
    const FieldAmplitude x{0.3, -0.4};
    CHECK(std::abs(phase_shifter_transfer({0.0, 0.0}, x) - x) <= 1e-15);
    // 90 degrees plus 3.0103 dB of loss: power halves, so the field lands at
    // ~0.7071 on the imaginary axis.
    const FieldAmplitude y =
        phase_shifter_transfer({3.14159265358979323846 / 2.0, 3.0103}, {1.0, 0.0});
    CHECK(std::abs(y - FieldAmplitude{0.0, std::sqrt(0.5)}) <= 1e-5);
    // Power obeys the insertion loss exactly.
    CHECK(power(phase_shifter_transfer({1.0, 7.0}, {1.0, 0.0})) ==
          doctest::Approx(std::pow(10.0, -0.7)).epsilon(1e-12));
}

TEST_CASE("mzm examples") {
    const FieldAmplitude x{0.6, 0.1};
    CHECK(std::abs(mzm_transfer({0.0}, x) - x) <= 1e-15);
    CHECK(std::abs(mzm_transfer({3.14159265358979323846}, x)) <= 1e-15);
    CHECK(std::abs(mzm_transfer({3.14159265358979323846 / 2.0}, {1.0, 0.0})) ==
          doctest::Approx(std::cos(3.14159265358979323846 / 4.0)).epsilon(1e-12));
    // A finite extinction ratio floors the minimum transmission.
    const MzmDevice finite{3.14159265358979323846, 20.0};
    CHECK(std::abs(mzm_transfer(finite, {1.0, 0.0})) ==
          doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("apply_bias blue-shifts the resonance and validates the envelope") {
    const RingDevice ring = make_calibrated_ring();
    const double res_on = apply_bias(ring, 1.2).resonant_wavelength_near(1526.0);
    const double res_off = apply_bias(ring, 1.4).resonant_wavelength_near(1526.0);
    CHECK(res_off < res_on);  // higher bias, shorter wavelength
    CHECK_THROWS_AS(apply_bias(ring, -0.1), std::domain_error);
    CHECK_THROWS_AS(apply_bias(ring, 2.5), std::domain_error);
    // Unchanged bias leaves the transfer identical.
    const RingDevice same = apply_bias(ring, ring.voltage);
    for (double lam = 1524.0; lam < 1528.0; lam += 0.1)
        CHECK(ring_transfer(same, lam) == ring_transfer(ring, lam));
}

TEST_CASE("calibrated ring meets the logic-level bias points") {
    const RingDevice ring = make_calibrated_ring();
    // Resonance aligned with the probe at the on-voltage.
    const RingDevice on = apply_bias(ring, defaults::v_on);
    CHECK(std::abs(on.resonant_wavelength_near(defaults::probe_nm) -
                   defaults::probe_nm) <= 1e-9);
    // Off-voltage detunes by at least 5 linewidths.
    const RingDevice off = apply_bias(ring, defaults::v_off);
    const double detune = std::abs(off.resonant_wavelength_near(defaults::probe_nm) -
                                   defaults::probe_nm);
    CHECK(detune >= 5.0 * off.linewidth_fwhm_nm(defaults::probe_nm));
    // Both bias points are under-coupled.
    CHECK(on.coupling_regime() == CouplingRegime::UnderCoupled);
    CHECK(off.coupling_regime() == CouplingRegime::UnderCoupled);
    // Deep extinction at the aligned point.
    CHECK(std::abs(ring_transfer(on, defaults::probe_nm)) < 1e-3);
    CHECK(std::abs(ring_transfer(off, defaults::probe_nm)) > 0.9);
}

TEST_CASE("construction rejects unphysical parameters") {
    CHECK_THROWS_AS(RingDevice(1.0, 0.9, 60.0, 2.4, 4.2, -0.04, -0.008),
                    std::invalid_argument);
    CHECK_THROWS_AS(RingDevice(0.9, 0.0, 60.0, 2.4, 4.2, -0.04, -0.008),
                    std::invalid_argument);
    CHECK_THROWS_AS(RingDevice(0.9, 1.5, 60.0, 2.4, 4.2, -0.04, -0.008),
                    std::invalid_argument);
    const RingDevice ring = make_calibrated_ring();
    CHECK_THROWS_AS(ring_transfer(ring, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(ring_transfer(ring, 0.0), std::invalid_argument);
}

TEST_CASE("a(V) clamps to [0, 1]") {
    RingDevice ring = make_calibrated_ring();
    ring.a0 = 0.01;
    ring.da_dV = -0.5;
    ring.voltage = 2.0;
    CHECK(ring.round_trip_amplitude() == 0.0);
    ring.a0 = 0.99;
    ring.da_dV = 0.5;
    CHECK(ring.round_trip_amplitude() == 1.0);
}

TEST_CASE("FSR is positive and matches the group-index formula") {
    const RingDevice ring = make_calibrated_ring();
    const double fsr = ring.fsr_nm(1526.0);
    CHECK(fsr > 0.0);
    const double ng = ring.n_group + ring.dn_dV * ring.voltage;
    CHECK(fsr == doctest::Approx(1526.0 * 1526.0 /
                                 (ng * ring.roundtrip_length_um * 1e3))
                     .epsilon(1e-12));
}

TEST_CASE("tuning power estimate is informational and bounded") {
    RingDevice ring = make_calibrated_ring();
    ring.voltage = ring.v_max;
    CHECK(tuning_power_mw(ring) == doctest::Approx(12.0));
    ring.voltage = 0.0;
    CHECK(tuning_power_mw(ring) == 0.0);
}
