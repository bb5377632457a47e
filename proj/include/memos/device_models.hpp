#pragma once

#include <algorithm>
#include <cmath>

namespace memos {

// ============================================================================
// Memristor device models
// ============================================================================

/// Threshold-adaptive memristor. The internal state x moves between x_on and
/// x_off; resistance interpolates linearly from r_on (at x_on) to r_off
/// (at x_off). State motion has current thresholds i_on/i_off and a
/// double-exponential window that suppresses drift far from each anchor.
struct TeamParams {
    double r_on = 100.0;        // resistance at x = x_on (ohm)
    double r_off = 100e3;       // resistance at x = x_off (ohm)
    double k_on = -1e-3;        // state velocity scale, negative-current branch (m/s)
    double k_off = 1e-3;        // state velocity scale, positive-current branch (m/s)
    double alpha_on = 5.0;      // branch nonlinearity exponent, >= 1
    double alpha_off = 5.0;
    double i_on = -5e-6;        // negative current threshold (A)
    double i_off = 5e-6;        // positive current threshold (A)
    double x_on = 3e-9;         // state bound where R = r_on (m)
    double x_off = 0.0;         // state bound where R = r_off (m)
    double w_c = 3e-9;          // window decay length (m)
    double a_on = 2.3e-9;       // accepted and stored; the window uses w_c only (m)
    double a_off = 1.2e-9;

    double x_min() const { return std::min(x_on, x_off); }
    double x_max() const { return std::max(x_on, x_off); }
    double clamp_x(double x) const { return std::clamp(x, x_min(), x_max()); }

    /// Throws std::invalid_argument when an invariant is violated.
    void check() const;
};

struct TeamState {
    double x = 0.0;  // internal state variable (m), kept inside [x_min, x_max]
};

enum class WindowSide { on, off };

/// exp(-exp(|x - anchor| / w_c)) with anchor x_on or x_off. Range (0, 1/e].
double team_window(const TeamParams& p, double x, WindowSide side);

/// Piecewise state velocity dx/dt for device current i (A). Zero inside the
/// dead zone [i_on, i_off], branch boundaries included. Throws on non-finite i.
double team_dxdt(const TeamParams& p, const TeamState& s, double i);

/// Linear interpolation r_on..r_off over the state interval.
double team_resistance(const TeamParams& p, const TeamState& s);

/// HP-style linear ion drift device: doped region of width w inside a film of
/// thickness d, modelled as two series resistors.
struct LinearDriftParams {
    double d = 10e-9;      // film thickness (m)
    double mu_v = 1e-14;   // dopant mobility (m^2 / V s)
    double r_on = 100.0;   // fully doped resistance (ohm)
    double r_off = 100e3;  // fully undoped resistance (ohm)

    void check() const;
    double clamp_w(double w) const { return std::clamp(w, 0.0, d); }
};

struct LinearDriftState {
    double w = 0.0;  // doped region width (m), 0 <= w <= d
};

/// Series-resistor memristance: r_on * w/d + r_off * (1 - w/d).
double lid_resistance(const LinearDriftParams& p, const LinearDriftState& s);

struct LidMemristance {
    double ohms = 0.0;
    bool clamped = false;  // set when charge pushed the value outside [0, r_off]
};

/// Charge form M(q) = r_off * (1 - mu_v * r_on * q / d^2), valid for
/// r_on << r_off. Out-of-range results are clamped and flagged.
LidMemristance lid_memristance(const LinearDriftParams& p, double q);

/// dw/dt = mu_v * (r_on / d) * i.
double lid_dwdt(const LinearDriftParams& p, double i);

/// Threshold-model parameter set that reproduces linear ion drift dynamics:
/// alpha = 1, thresholds shrunk to +/- fit_threshold_epsilon, state bounds
/// x_on = d and x_off = 0, velocity scales chosen so dx/dt matches lid_dwdt
/// through the window. State maps as x = w (see lid_state_to_team).
TeamParams fit_team_from_lid(const LinearDriftParams& p);

/// State translation for devices produced by fit_team_from_lid.
double lid_state_to_team(const LinearDriftParams& p, double w);

inline constexpr double fit_threshold_epsilon = 1e-12;  // A

/// Terminal orientation. Forward means positive current entering the first
/// terminal drives the device toward r_off.
enum class Polarity { forward, reverse };

inline Polarity flipped(Polarity p) {
    return p == Polarity::forward ? Polarity::reverse : Polarity::forward;
}

/// Sign mapping terminal current (first -> second terminal) to the current
/// fed into the TEAM state equation, honouring the forward-polarity rule.
double team_orientation_sign(const TeamParams& p, Polarity pol);

/// Same mapping for the linear drift equations (positive device current
/// grows w, i.e. drives toward r_on).
double lid_orientation_sign(Polarity pol);

// ============================================================================
// MOSFET (square-law level-1, body tied to source)
// ============================================================================

struct MosfetParams {
    enum class Kind { nmos, pmos };
    Kind kind = Kind::nmos;
    double v_th = 0.45;       // threshold voltage, negative for pmos (V)
    double k_prime = 300e-6;  // transconductance factor times W/L (A/V^2)
    double lambda = 0.05;     // channel length modulation (1/V)
    double c_gs = 1e-15;      // gate-source capacitance (F)
    double c_gd = 0.25e-15;   // gate-drain capacitance (F)
    double g_off = 1e-12;     // cutoff leakage conductance (S)

    void check() const;
};

/// Drain current for gate-source / drain-source voltages. P-channel devices
/// are handled by sign symmetry; returned current is the physical current
/// into the drain terminal.
double mosfet_ids(const MosfetParams& p, double v_gs, double v_ds);

struct MosfetLin {
    double ids = 0.0;  // drain current at the linearization point (A)
    double gm = 0.0;   // d ids / d v_gs (S)
    double gds = 0.0;  // d ids / d v_ds (S)
};

/// Current and partial derivatives used by the Newton stamps. Handles
/// vds < 0 by exchanging drain/source roles.
MosfetLin mosfet_linearize(const MosfetParams& p, double v_g, double v_d, double v_s);

// ============================================================================
// Canonical parameter sets
// ============================================================================

/// Device characterization set: 100 ohm / 100 kohm, +/-5 uA thresholds,
/// alpha = 5, k = +/-1e-3 m/s, 3 nm state range.
TeamParams reference_team_params();

/// Same set with the velocity scale raised so gates switch on the ns scale
/// used by the cell library stimuli.
TeamParams logic_team_params();

MosfetParams default_nmos();
MosfetParams default_pmos();

/// Skewed thresholds for the first stage of level-restoring buffers; the
/// switching point drops to ~0.46 V so degraded divider highs resolve.
MosfetParams restore_nmos();
MosfetParams restore_pmos();

inline constexpr double default_vcc = 1.8;  // V

}  // namespace memos
