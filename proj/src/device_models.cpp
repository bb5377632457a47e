#include "memos/device_models.hpp"

#include <stdexcept>
#include <string>

namespace memos {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void TeamParams::check() const {
    require(r_on > 0.0 && r_off > 0.0, "memristor resistances must be positive");
    require(r_on < r_off, "r_on must be below r_off");
    require(i_on < 0.0 && i_off > 0.0, "current thresholds must straddle zero (i_on < 0 < i_off)");
    require(k_on < 0.0 && k_off > 0.0, "velocity scales must straddle zero (k_on < 0 < k_off)");
    require(alpha_on >= 1.0 && alpha_off >= 1.0, "alpha exponents must be >= 1");
    require(x_on != x_off, "state interval is empty (x_on == x_off)");
    require(w_c > 0.0, "window decay length must be positive");
}

double team_window(const TeamParams& p, double x, WindowSide side) {
    double anchor = side == WindowSide::on ? p.x_on : p.x_off;
    return std::exp(-std::exp(std::abs(x - anchor) / p.w_c));
}

double team_dxdt(const TeamParams& p, const TeamState& s, double i) {
    if (!std::isfinite(i)) throw std::invalid_argument("memristor current is not finite");
    if (i > p.i_off) {
        return p.k_off * std::pow(i / p.i_off - 1.0, p.alpha_off) * team_window(p, s.x, WindowSide::off);
    }
    if (i < p.i_on) {
        return p.k_on * std::pow(i / p.i_on - 1.0, p.alpha_on) * team_window(p, s.x, WindowSide::on);
    }
    return 0.0;  // dead zone, boundaries included
}

double team_resistance(const TeamParams& p, const TeamState& s) {
    double x = p.clamp_x(s.x);
    return p.r_on + (p.r_off - p.r_on) * (x - p.x_on) / (p.x_off - p.x_on);
}

void LinearDriftParams::check() const {
    require(d > 0.0, "film thickness must be positive");
    require(mu_v > 0.0, "ion mobility must be positive");
    require(r_on > 0.0 && r_on < r_off, "need 0 < r_on < r_off");
}

double lid_resistance(const LinearDriftParams& p, const LinearDriftState& s) {
    double w = p.clamp_w(s.w);
    return p.r_on * (w / p.d) + p.r_off * (1.0 - w / p.d);
}

LidMemristance lid_memristance(const LinearDriftParams& p, double q) {
    double m = p.r_off * (1.0 - p.mu_v * p.r_on * q / (p.d * p.d));
    if (m < 0.0) return {0.0, true};
    if (m > p.r_off) return {p.r_off, true};
    return {m, false};
}

double lid_dwdt(const LinearDriftParams& p, double i) {
    return p.mu_v * (p.r_on / p.d) * i;
}

TeamParams fit_team_from_lid(const LinearDriftParams& p) {
    p.check();
    TeamParams fit;
    fit.r_on = p.r_on;
    fit.r_off = p.r_off;
    fit.alpha_on = 1.0;
    fit.alpha_off = 1.0;
    fit.i_on = -fit_threshold_epsilon;
    fit.i_off = fit_threshold_epsilon;
    // Velocity scale chosen so k * (i / i_threshold) * window equals the drift
    // rate mu_v r_on i / d. The wide window below is flat at 1/e, hence the
    // factor e in k.
    double scale = std::exp(1.0) * p.mu_v * (p.r_on / p.d);
    fit.k_on = scale * fit.i_on;
    fit.k_off = scale * fit.i_off;
    fit.x_on = p.d;
    fit.x_off = 0.0;
    fit.w_c = 1e9 * p.d;  // flat window over the whole state range
    fit.a_on = 0.0;
    fit.a_off = 0.0;
    return fit;
}

double lid_state_to_team(const LinearDriftParams& p, double w) {
    return p.clamp_w(w);
}

double team_orientation_sign(const TeamParams& p, Polarity pol) {
    double toward_off = p.x_off > p.x_on ? 1.0 : -1.0;
    return pol == Polarity::forward ? toward_off : -toward_off;
}

double lid_orientation_sign(Polarity pol) {
    // positive device current grows w (toward r_on); forward must head to r_off
    return pol == Polarity::forward ? -1.0 : 1.0;
}

void MosfetParams::check() const {
    require(k_prime > 0.0, "k_prime must be positive");
    require(lambda >= 0.0, "lambda must be nonnegative");
    require(c_gs >= 0.0 && c_gd >= 0.0, "capacitances must be nonnegative");
    if (kind == Kind::nmos) {
        require(v_th >= 0.0, "nmos threshold must be nonnegative");
    } else {
        require(v_th <= 0.0, "pmos threshold must be nonpositive");
    }
}

namespace {

// n-channel square law in the transformed frame (vgs, vds >= 0 region).
MosfetLin square_law(const MosfetParams& p, double vgs, double vds, double vth) {
    MosfetLin out;
    double vov = vgs - vth;
    if (vov <= 0.0) {
        return out;  // cutoff
    }
    double cl = 1.0 + p.lambda * vds;
    if (vds < vov) {
        // triode; the lambda factor keeps the current continuous at vds = vov
        out.ids = p.k_prime * (vov * vds - 0.5 * vds * vds) * cl;
        out.gm = p.k_prime * vds * cl;
        out.gds = p.k_prime * (vov - vds) * cl + p.k_prime * (vov * vds - 0.5 * vds * vds) * p.lambda;
    } else {
        out.ids = 0.5 * p.k_prime * vov * vov * cl;
        out.gm = p.k_prime * vov * cl;
        out.gds = 0.5 * p.k_prime * vov * vov * p.lambda;
    }
    return out;
}

}  // namespace

double mosfet_ids(const MosfetParams& p, double v_gs, double v_ds) {
    if (p.kind == MosfetParams::Kind::nmos) {
        return square_law(p, v_gs, v_ds, p.v_th).ids;
    }
    return -square_law(p, -v_gs, -v_ds, -p.v_th).ids;
}

MosfetLin mosfet_linearize(const MosfetParams& p, double v_g, double v_d, double v_s) {
    double sign = p.kind == MosfetParams::Kind::nmos ? 1.0 : -1.0;
    double vgs = sign * (v_g - v_s);
    double vds = sign * (v_d - v_s);
    double vth = sign * p.v_th;

    MosfetLin lin;
    if (vds >= 0.0) {
        lin = square_law(p, vgs, vds, vth);
    } else {
        // symmetric device: evaluate with drain and source exchanged, then
        // map current and derivatives back to the caller's terminal frame:
        //   ids = -ids'(vgs - vds, -vds)
        //   d ids / d vgs = -gm'
        //   d ids / d vds = gm' + gds'
        MosfetLin sw = square_law(p, vgs - vds, -vds, vth);
        lin.ids = -sw.ids;
        lin.gm = -sw.gm;
        lin.gds = sw.gm + sw.gds;
    }

    // The p-channel transform flips the current sign but leaves the
    // conductances unchanged (the two sign factors cancel).
    lin.ids *= sign;

    lin.ids += p.g_off * (v_d - v_s);
    lin.gds += p.g_off;
    return lin;
}

TeamParams reference_team_params() {
    return TeamParams{};
}

TeamParams logic_team_params() {
    TeamParams p;
    p.k_on = -2e4;
    p.k_off = 2e4;
    return p;
}

MosfetParams default_nmos() {
    return MosfetParams{};
}

MosfetParams default_pmos() {
    MosfetParams p;
    p.kind = MosfetParams::Kind::pmos;
    p.v_th = -0.45;
    p.k_prime = 100e-6;
    return p;
}

MosfetParams restore_nmos() {
    MosfetParams p = default_nmos();
    p.v_th = 0.2;
    return p;
}

MosfetParams restore_pmos() {
    MosfetParams p = default_pmos();
    p.v_th = -0.9;
    return p;
}

}  // namespace memos
