#pragma once

#include <complex>
#include <cstdint>
#include <limits>

namespace wdipln {

/// Complex optical field amplitude (unitless; power = |E|^2).
using FieldAmplitude = std::complex<double>;

inline double power(FieldAmplitude f) { return std::norm(f); }

enum class CouplingRegime { OverCoupled, CriticallyCoupled, UnderCoupled };

CouplingRegime classify_coupling(double a, double r, double tol = 1e-9);

/// All-pass micro-ring resonator with a linearized voltage tuning model:
///   n_eff(V, lambda) = n_eff0 + dn_dV*V + dn/dlambda * (lambda - lambda_ref)
///   a(V) = clamp(a0 + da_dV*V, 0, 1)
/// First-order dispersion is folded in through the group index so that the
/// resonance spacing comes out as lambda^2 / (n_group * L).
struct RingDevice {
    double r = 0.98;                 // self-coupling coefficient, 0 <= r < 1
    double a0 = 1.0;                 // round-trip amplitude at zero bias
    double roundtrip_length_um = 62.83185307179586;
    double n_eff0 = 2.4;             // effective index at zero bias
    double n_group = 4.2;
    double dn_dV = -0.04;            // index shift per volt (negative: blue shift)
    double da_dV = -0.008;           // round-trip amplitude change per volt
    double voltage = 0.0;            // applied bias, V
    double lambda_ref_nm = 1526.0;   // dispersion expansion point
    double v_min = 0.0;              // operating envelope
    double v_max = 2.0;

    RingDevice() = default;
    RingDevice(double r_, double a0_, double length_um, double n_eff0_,
               double n_group_, double dn_dV_, double da_dV_, double voltage_ = 0.0);

    double kappa() const;                       // cross coupling, kappa^2 + r^2 = 1
    double round_trip_amplitude() const;        // a(V), clamped to [0, 1]
    double effective_index(double wavelength_nm) const;
    double round_trip_phase(double wavelength_nm) const;  // theta
    double fsr_nm(double wavelength_nm) const;
    double linewidth_fwhm_nm(double wavelength_nm) const;
    /// Resonant wavelength closest to the guess at the current bias.
    double resonant_wavelength_near(double guess_nm) const;
    CouplingRegime coupling_regime() const;
};

/// Transfer function of the all-pass ring:
///   E = e^{i(pi + theta)} (a - r e^{-i theta}) / (1 - r a e^{i theta})
FieldAmplitude ring_transfer(const RingDevice& ring, double wavelength_nm);

/// Winding number of arg(E) over a sweep spanning one full resonance:
/// 1 for over-coupled rings (2*pi phase wrap), 0 for under-coupled.
int ring_phase_winding(const RingDevice& ring, double start_nm, double stop_nm,
                       int samples = 512);

/// Copy of `ring` with the bias updated; rejects voltages outside [v_min, v_max].
RingDevice apply_bias(const RingDevice& ring, double voltage);

struct PhaseShifterDevice {
    double phase = 0.0;              // radians
    double insertion_loss_db = 0.0;  // >= 0
};

FieldAmplitude phase_shifter_transfer(const PhaseShifterDevice& ps, FieldAmplitude in);

struct MzmDevice {
    double phase_difference = 0.0;                                    // radians
    double extinction_ratio_db = std::numeric_limits<double>::infinity();
};

/// Ideal cosine transfer, magnitude floored by the extinction ratio.
FieldAmplitude mzm_transfer(const MzmDevice& mzm, FieldAmplitude in);

// ---------------------------------------------------------------------------
// Default calibration used throughout: a PIN-style ring whose resonance sits
// exactly on the probe wavelength at v_align and blue-shifts with bias.

namespace defaults {
inline constexpr double probe_nm = 1526.0;
inline constexpr double v_on = 1.2;
inline constexpr double v_off = 1.4;
inline constexpr double self_coupling = 0.98;
inline constexpr double dn_dV = -0.04;
inline constexpr double da_dV = -0.008;
inline constexpr double n_group = 4.2;
inline constexpr double n_nominal = 2.36;
inline constexpr double roundtrip_length_um = 62.83185307179586;  // 20*pi
inline constexpr double critical_margin = 1e-5;  // keeps a(v_on) just under r
}  // namespace defaults

/// Ring whose resonance aligns with `lambda_res_nm` when biased at `v_align`.
RingDevice make_calibrated_ring(double lambda_res_nm = defaults::probe_nm,
                                double v_align = defaults::v_on);

/// Large multi-channel ring whose FSR equals `fsr_nm` at the probe wavelength,
/// resonance aligned at `v_align`.
RingDevice make_large_ring(double fsr_nm, double lambda_res_nm = defaults::probe_nm,
                           double v_align = defaults::v_on);

/// Electrical power estimate of the diode at the ring's bias point.  The diode
/// I-V model is a documented placeholder scaled so full tuning draws ~12 mW.
double tuning_power_mw(const RingDevice& ring);

// ---------------------------------------------------------------------------
// Amplitude encoder: inverts |ring_transfer| at a probe wavelength by
// bisection on the bias voltage.

struct Encoding {
    double voltage = 0.0;
    double achieved_magnitude = 0.0;
    double residual_phase = 0.0;  // arg of the transfer at the probe
};

class RingEncoder {
public:
    /// Encodes targets by detuning away from `v_align` in `direction`
    /// (+1: higher bias / blue detuning, -1: lower bias / red detuning),
    /// limited to `max_detune_nm` of resonance shift.
    RingEncoder(RingDevice ring_template, double probe_nm, int direction = +1,
                double max_detune_nm = 0.0);

    /// Smallest / largest encodable magnitude at the probe.
    double min_magnitude() const { return t_min_; }
    double max_magnitude() const { return t_max_; }

    /// Finds the bias realizing |transfer| = target (clamped to the reachable
    /// range) to within `tol` in magnitude.
    Encoding encode(double target, double tol = 1e-6) const;

    /// Ring configured at the encoding's bias.
    RingDevice ring_at(const Encoding& e) const;

    const RingDevice& ring_template() const { return ring_; }
    double probe_nm() const { return probe_nm_; }

private:
    double magnitude_at(double voltage) const;

    RingDevice ring_;
    double probe_nm_;
    double v_lo_, v_hi_;  // search interval (v_lo_ = aligned end)
    double t_min_, t_max_;
};

}  // namespace wdipln
