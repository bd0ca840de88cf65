#include "wdipln/devices.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace wdipln {

namespace {
constexpr double pi = std::numbers::pi;
}

CouplingRegime classify_coupling(double a, double r, double tol) {
    if (std::abs(a - r) <= tol) return CouplingRegime::CriticallyCoupled;
    return a > r ? CouplingRegime::OverCoupled : CouplingRegime::UnderCoupled;
}

RingDevice::RingDevice(double r_, double a0_, double length_um, double n_eff0_,
                       double n_group_, double dn_dV_, double da_dV_, double voltage_)
    : r(r_), a0(a0_), roundtrip_length_um(length_um), n_eff0(n_eff0_),
      n_group(n_group_), dn_dV(dn_dV_), da_dV(da_dV_), voltage(voltage_) {
    if (!(r >= 0.0 && r < 1.0))
        throw std::invalid_argument("RingDevice: self-coupling r must be in [0, 1)");
    if (!(a0 > 0.0 && a0 <= 1.0))
        throw std::invalid_argument("RingDevice: a0 must be in (0, 1]");
    if (!(roundtrip_length_um > 0.0))
        throw std::invalid_argument("RingDevice: roundtrip length must be positive");
    if (!(n_group > 0.0))
        throw std::invalid_argument("RingDevice: group index must be positive");
}

double RingDevice::kappa() const { return std::sqrt(std::max(0.0, 1.0 - r * r)); }

double RingDevice::round_trip_amplitude() const {
    return std::clamp(a0 + da_dV * voltage, 0.0, 1.0);
}

double RingDevice::effective_index(double wavelength_nm) const {
    const double dn_dlam = (n_eff0 - n_group) / lambda_ref_nm;
    return n_eff0 + dn_dV * voltage + dn_dlam * (wavelength_nm - lambda_ref_nm);
}

double RingDevice::round_trip_phase(double wavelength_nm) const {
    const double length_nm = roundtrip_length_um * 1e3;
    return 2.0 * pi * effective_index(wavelength_nm) * length_nm / wavelength_nm;
}

double RingDevice::fsr_nm(double wavelength_nm) const {
    // Model-consistent group index: n_eff - lambda * dn/dlambda, which the
    // linear bias term shifts uniformly.
    const double ng = n_group + dn_dV * voltage;
    return wavelength_nm * wavelength_nm / (ng * roundtrip_length_um * 1e3);
}

double RingDevice::linewidth_fwhm_nm(double wavelength_nm) const {
    const double ra = r * round_trip_amplitude();
    return fsr_nm(wavelength_nm) * (1.0 - ra) / (pi * std::sqrt(std::max(ra, 1e-12)));
}

double RingDevice::resonant_wavelength_near(double guess_nm) const {
    // Resonance: n_eff(lambda) * L = m * lambda, linear in lambda.
    const double length_nm = roundtrip_length_um * 1e3;
    const double dn_dlam = (n_eff0 - n_group) / lambda_ref_nm;
    const double n_at_ref = n_eff0 + dn_dV * voltage;
    const double m = std::round((n_at_ref + dn_dlam * (guess_nm - lambda_ref_nm)) *
                                length_nm / guess_nm);
    return length_nm * (n_at_ref - dn_dlam * lambda_ref_nm) / (m - length_nm * dn_dlam);
}

CouplingRegime RingDevice::coupling_regime() const {
    return classify_coupling(round_trip_amplitude(), r);
}

FieldAmplitude ring_transfer(const RingDevice& ring, double wavelength_nm) {
    if (!(wavelength_nm > 0.0))
        throw std::invalid_argument("ring_transfer: wavelength must be positive");
    const double theta = ring.round_trip_phase(wavelength_nm);
    const double a = ring.round_trip_amplitude();
    const double r = ring.r;
    const FieldAmplitude ei = std::polar(1.0, theta);
    return std::polar(1.0, pi + theta) * (a - r * std::conj(ei)) / (1.0 - r * a * ei);
}

int ring_phase_winding(const RingDevice& ring, double start_nm, double stop_nm,
                       int samples) {
    if (samples < 16)
        throw std::invalid_argument("ring_phase_winding: need at least 16 samples");
    if (!(start_nm > 0.0 && stop_nm > start_nm))
        throw std::invalid_argument("ring_phase_winding: degenerate sweep");
    double prev = std::arg(ring_transfer(ring, start_nm));
    double total = 0.0;
    for (int i = 1; i < samples; ++i) {
        const double lam = start_nm + (stop_nm - start_nm) * i / (samples - 1);
        double ph = std::arg(ring_transfer(ring, lam));
        double d = ph - prev;
        while (d > pi) d -= 2.0 * pi;
        while (d < -pi) d += 2.0 * pi;
        total += d;
        prev = ph;
    }
    return static_cast<int>(std::lround(std::abs(total) / (2.0 * pi)));
}

RingDevice apply_bias(const RingDevice& ring, double voltage) {
    if (voltage < ring.v_min || voltage > ring.v_max)
        throw std::domain_error("apply_bias: voltage outside operating envelope");
    RingDevice out = ring;
    out.voltage = voltage;
    return out;
}

FieldAmplitude phase_shifter_transfer(const PhaseShifterDevice& ps, FieldAmplitude in) {
    const double amp = std::pow(10.0, -ps.insertion_loss_db / 20.0);
    return in * std::polar(amp, ps.phase);
}

FieldAmplitude mzm_transfer(const MzmDevice& mzm, FieldAmplitude in) {
    double t = std::cos(mzm.phase_difference / 2.0);
    if (std::isfinite(mzm.extinction_ratio_db)) {
        const double floor = std::pow(10.0, -mzm.extinction_ratio_db / 20.0);
        if (std::abs(t) < floor) t = std::copysign(floor, t == 0.0 ? 1.0 : t);
    }
    return in * t;
}

RingDevice make_calibrated_ring(double lambda_res_nm, double v_align) {
    RingDevice ring;
    ring.r = defaults::self_coupling;
    ring.dn_dV = defaults::dn_dV;
    ring.da_dV = defaults::da_dV;
    ring.n_group = defaults::n_group;
    ring.roundtrip_length_um = defaults::roundtrip_length_um;
    ring.lambda_ref_nm = defaults::probe_nm;
    // a(v_on) lands just under r so the dip is deep but still under-coupled.
    ring.a0 = ring.r - defaults::critical_margin - defaults::da_dV * defaults::v_on;
    const double length_nm = ring.roundtrip_length_um * 1e3;
    const double m = std::round(defaults::n_nominal * length_nm / lambda_res_nm);
    // Solve n_eff(lambda_res, v_align) * L = m * lambda_res for n_eff0.
    const double x = (lambda_res_nm - ring.lambda_ref_nm) / ring.lambda_ref_nm;
    ring.n_eff0 = (m * lambda_res_nm / length_nm - ring.dn_dV * v_align +
                   ring.n_group * x) / (1.0 + x);
    ring.voltage = v_align;
    return ring;
}

RingDevice make_large_ring(double fsr_nm, double lambda_res_nm, double v_align) {
    if (!(fsr_nm > 0.0))
        throw std::invalid_argument("make_large_ring: FSR must be positive");
    RingDevice ring = make_calibrated_ring(lambda_res_nm, v_align);
    ring.roundtrip_length_um =
        lambda_res_nm * lambda_res_nm /
        ((ring.n_group + ring.dn_dV * v_align) * fsr_nm) * 1e-3;
    const double length_nm = ring.roundtrip_length_um * 1e3;
    const double m = std::round(defaults::n_nominal * length_nm / lambda_res_nm);
    const double x = (lambda_res_nm - ring.lambda_ref_nm) / ring.lambda_ref_nm;
    ring.n_eff0 = (m * lambda_res_nm / length_nm - ring.dn_dV * v_align +
                   ring.n_group * x) / (1.0 + x);
    return ring;
}

double tuning_power_mw(const RingDevice& ring) {
    // Placeholder forward-biased diode: quadratic in bias, ~12 mW at v_max.
    const double frac = std::clamp(ring.voltage / std::max(ring.v_max, 1e-12), 0.0, 1.0);
    return 12.0 * frac * frac;
}

RingEncoder::RingEncoder(RingDevice ring_template, double probe_nm, int direction,
                         double max_detune_nm)
    : ring_(ring_template), probe_nm_(probe_nm) {
    if (direction != 1 && direction != -1)
        throw std::invalid_argument("RingEncoder: direction must be +1 or -1");
    const double fsr = ring_.fsr_nm(probe_nm);
    double cap = max_detune_nm > 0.0 ? max_detune_nm : 0.45 * fsr;
    cap = std::min(cap, 0.45 * fsr);
    const double dlam_dv = -ring_.dn_dV * probe_nm /
                           (ring_.n_group + ring_.dn_dV * ring_.voltage);
    const double v_span = cap / dlam_dv;
    v_lo_ = ring_.voltage;
    v_hi_ = ring_.voltage + direction * v_span;
    if (v_hi_ < ring_.v_min || v_hi_ > ring_.v_max)
        throw std::domain_error("RingEncoder: detuning range leaves operating envelope");
    t_min_ = magnitude_at(v_lo_);
    t_max_ = magnitude_at(v_hi_);
}

double RingEncoder::magnitude_at(double voltage) const {
    RingDevice r = ring_;
    r.voltage = voltage;
    return std::abs(ring_transfer(r, probe_nm_));
}

Encoding RingEncoder::encode(double target, double tol) const {
    if (!(target >= 0.0))
        throw std::invalid_argument("RingEncoder: target magnitude must be >= 0");
    const double t = std::clamp(target, t_min_, t_max_);
    double lo = v_lo_, hi = v_hi_;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (magnitude_at(mid) < t) lo = mid;
        else hi = mid;
        if (std::abs(magnitude_at(0.5 * (lo + hi)) - t) <= tol * 1e-3) break;
    }
    Encoding e;
    e.voltage = 0.5 * (lo + hi);
    RingDevice r = ring_;
    r.voltage = e.voltage;
    const FieldAmplitude f = ring_transfer(r, probe_nm_);
    e.achieved_magnitude = std::abs(f);
    e.residual_phase = std::arg(f);
    return e;
}

RingDevice RingEncoder::ring_at(const Encoding& e) const {
    RingDevice r = ring_;
    r.voltage = e.voltage;
    return r;
}

}  // namespace wdipln
