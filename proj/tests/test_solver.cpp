#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "memos/solver.hpp"
#include "oracles.hpp"

using namespace memos;

namespace {

// memristor AND/OR dividers with the cell-library kinetics so they settle
// within a nanosecond
std::string divider_netlist(const char* polarity, double va, double vb) {
    std::ostringstream os;
    os << "MR0 a y TEAM kon=-2e4 koff=2e4 polarity=" << polarity << "\n"
       << "MR1 b y TEAM kon=-2e4 koff=2e4 polarity=" << polarity << "\n"
       << "VA a 0 DC " << va << "\n"
       << "VB b 0 DC " << vb << "\n"
       << ".port in A a\n.port in B b\n.port out Y y\n";
    return os.str();
}

}  // namespace

TEST_CASE("dc operating point of a symmetric resistor divider") {
    Circuit c = parse_netlist(
        "V1 top 0 DC 1.8\n"
        "R1 top mid 1k\n"
        "R2 mid 0 1k\n");
    auto v = dc_operating_point(c);
    CHECK(v.at("mid") == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(v.at("top") == doctest::Approx(1.8).epsilon(1e-12));
}

TEST_CASE("dc operating point of the complementary memristor divider") {
    // MR0 frozen at r_off, MR1 at r_on: y = 1.8 * 100 / 100100
    Circuit c = parse_netlist(divider_netlist("fwd", 1.8, 0.0));
    auto v = dc_operating_point(c, {}, {{"MR0", 0.0}, {"MR1", 3e-9}});
    CHECK(v.at("y") == doctest::Approx(1.798201798e-3).epsilon(1e-6));
}

TEST_CASE("dc operating point with all sources at zero is identically zero") {
    Circuit c = parse_netlist(divider_netlist("fwd", 0.0, 0.0));
    for (auto& [name, volts] : dc_operating_point(c)) {
        CHECK(std::abs(volts) < 1e-12);
    }
}

TEST_CASE("dc operating point solves the cmos inverter") {
    const char* inv =
        "M1 y in vdd PMOS\n"
        "M2 y in 0 NMOS\n"
        "Vin in 0 DC 0\n"
        ".vcc vdd 1.8\n";
    Circuit c = parse_netlist(inv);
    auto v = dc_operating_point(c);
    CHECK(v.at("y") == doctest::Approx(1.8).epsilon(1e-3));

    Circuit c2 = parse_netlist(
        "M1 y in vdd PMOS\nM2 y in 0 NMOS\nVin in 0 DC 1.8\n.vcc vdd 1.8\n");
    auto v2 = dc_operating_point(c2);
    CHECK(std::abs(v2.at("y")) < 1e-3);
}

TEST_CASE("dc operating point reports divergence on an inconsistent source loop") {
    Circuit c = parse_netlist(
        "V1 a 0 DC 1.8\n"
        "V2 a b DC 0\n"
        "V3 b 0 DC 1.0\n"
        "R1 a 0 1k\n");
    CHECK_THROWS_AS((void)dc_operating_point(c), SolverError);
}

TEST_CASE("transient AND gate with both inputs high: output high, no supply current") {
    Circuit c = parse_netlist(divider_netlist("fwd", 1.8, 1.8));
    SolverConfig cfg;
    cfg.dt = 1e-12;
    cfg.t_stop = 1e-9;
    SimResult r = transient(c, cfg);
    REQUIRE_FALSE(r.diverged);
    CHECK(r.signal("y").back() == doctest::Approx(1.8).epsilon(1e-6));
    for (double i : r.signal("I(VA)")) CHECK(std::abs(i) < 1e-9);
    for (double i : r.signal("I(VB)")) CHECK(std::abs(i) < 1e-9);
}

TEST_CASE("transient AND gate with complementary inputs settles to the divider floor") {
    Circuit c = parse_netlist(divider_netlist("fwd", 1.8, 0.0));
    SolverConfig cfg;
    cfg.dt = 1e-12;
    cfg.t_stop = 1e-9;
    SimResult r = transient(c, cfg);
    REQUIRE_FALSE(r.diverged);
    double y = r.signal("y").back();
    CHECK(std::abs(y) < 0.01 * 1.8);
    CHECK(std::abs(y) < 2.0e-3);
    // the grounded-side device ends fully on, the driven-side one stays off
    CHECK(r.signal("R(MR1)").back() == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(r.signal("R(MR0)").back() == doctest::Approx(100e3).epsilon(1e-9));
    CHECK(r.final_states.at("MR1") == doctest::Approx(3e-9));
}

TEST_CASE("transient OR gate with complementary inputs pulls the output to the rail") {
    Circuit c = parse_netlist(divider_netlist("rev", 1.8, 0.0));
    SolverConfig cfg;
    cfg.dt = 1e-12;
    cfg.t_stop = 1e-9;
    SimResult r = transient(c, cfg);
    REQUIRE_FALSE(r.diverged);
    CHECK(r.signal("y").back() >= 0.99 * 1.8);
}

TEST_CASE("transient runs are deterministic") {
    Circuit c = parse_netlist(divider_netlist("fwd", 1.8, 0.0));
    SolverConfig cfg;
    cfg.dt = 1e-12;
    cfg.t_stop = 0.5e-9;
    SimResult a = transient(c, cfg);
    SimResult b = transient(c, cfg);
    REQUIRE(a.signals.size() == b.signals.size());
    for (auto& [name, values] : a.signals) {
        const auto& other = b.signal(name);
        REQUIRE(values.size() == other.size());
        for (std::size_t k = 0; k < values.size(); ++k) CHECK(values[k] == other[k]);
    }
}

TEST_CASE("halving dt changes resolved waveforms by less than one percent RMS") {
    // current-limited single-device cell: state motion resolved at both steps
    Circuit c = parse_netlist(
        "Vd in 0 SIN(2.0 1e3)\n"
        "R1 in m 200k\n"
        "MR1 m 0 TEAM polarity=rev\n"
        ".port in IN in\n.port out M m\n");
    SolverConfig coarse;
    coarse.dt = 1e-3 / 1000.0;
    coarse.t_stop = 1e-3;
    SolverConfig fine = coarse;
    fine.dt = coarse.dt / 2.0;
    SimResult rc = transient(c, coarse);
    SimResult rf = transient(c, fine);
    for (const char* sig : {"m", "in", "R(MR1)"}) {
        std::vector<double> sub;
        const auto& f = rf.signal(sig);
        for (std::size_t k = 0; k < f.size(); k += 2) sub.push_back(f[k]);
        const auto& co = rc.signal(sig);
        REQUIRE(sub.size() == co.size());
        double num = 0, den = 0;
        for (std::size_t k = 0; k < sub.size(); ++k) {
            num += (sub[k] - co[k]) * (sub[k] - co[k]);
            den += sub[k] * sub[k];
        }
        if (den > 0) CHECK(std::sqrt(num / den) < 0.01);
    }
}

TEST_CASE("halving dt preserves the settled levels of a switching divider") {
    // threshold slams do not converge pointwise mid-transition, but the
    // settled output and final device states must be step-size independent
    Circuit c = parse_netlist(divider_netlist("fwd", 1.8, 0.0));
    SolverConfig coarse;
    coarse.dt = 2e-13;
    coarse.t_stop = 1e-9;
    SolverConfig fine = coarse;
    fine.dt = 1e-13;
    SimResult rc = transient(c, coarse);
    SimResult rf = transient(c, fine);
    CHECK(rc.signal("y").back() == doctest::Approx(rf.signal("y").back()).epsilon(1e-9));
    CHECK(rc.final_states.at("MR0") == doctest::Approx(rf.final_states.at("MR0")));
    CHECK(rc.final_states.at("MR1") == doctest::Approx(rf.final_states.at("MR1")));
}

TEST_CASE("kcl holds at the divider node at every accepted step") {
    Circuit c = parse_netlist(divider_netlist("fwd", 1.8, 0.0));
    SolverConfig cfg;
    cfg.dt = 1e-12;
    cfg.t_stop = 1e-9;
    SimResult r = transient(c, cfg);
    const auto& va = r.signal("a");
    const auto& vb = r.signal("b");
    const auto& vy = r.signal("y");
    const auto& r0 = r.signal("R(MR0)");
    const auto& r1 = r.signal("R(MR1)");
    for (std::size_t k = 1; k < vy.size(); ++k) {
        // the step from t_{k-1} used the resistances recorded at k-1
        double i0 = (va[k] - vy[k]) / r0[k - 1];
        double i1 = (vb[k] - vy[k]) / r1[k - 1];
        double residual = i0 + i1;  // gmin shunt currents stay under the allowance below
        double g_node = 1.0 / r0[k - 1] + 1.0 / r1[k - 1];
        CHECK(std::abs(residual) < 10.0 * 1e-6 * g_node + 1e-11);
    }
}

TEST_CASE("memristor passivity: instantaneous v*i is nonnegative") {
    Circuit c = parse_netlist(divider_netlist("fwd", 1.8, 0.0));
    SolverConfig cfg;
    cfg.dt = 1e-12;
    cfg.t_stop = 1e-9;
    SimResult r = transient(c, cfg);
    const auto& va = r.signal("a");
    const auto& vy = r.signal("y");
    const auto& r0 = r.signal("R(MR0)");
    for (std::size_t k = 1; k < vy.size(); ++k) {
        double v = va[k] - vy[k];
        double i = v / r0[k - 1];
        CHECK(v * i >= 0.0);
        CHECK(r0[k - 1] > 0.0);
    }
}

TEST_CASE("single memristor transient matches the fine-step scalar oracle") {
    // team device on a current-limited sine drive (series resistance well
    // above r_off keeps the state motion resolved at this step size)
    Circuit c = parse_netlist(
        "Vd in 0 SIN(2.0 1e3)\n"
        "R1 in m 200k\n"
        "MR1 m 0 TEAM polarity=rev\n");
    SolverConfig cfg;
    cfg.dt = 1e-3 / 2000.0;  // 2000 points per period
    cfg.t_stop = 1e-3;
    SimResult r = transient(c, cfg);
    REQUIRE_FALSE(r.diverged);

    MemristorElement dev;
    dev.model = MemristorElement::Model::team;
    dev.team = reference_team_params();
    dev.polarity = Polarity::reverse;
    dev.initial_state = dev.team.x_off;
    auto states = oracle::series_memristor_states(
        dev, 200e3, [](double t) { return 2.0 * std::sin(2.0 * std::numbers::pi * 1e3 * t); },
        cfg.dt, static_cast<int>(std::lround(cfg.t_stop / cfg.dt)), 100);

    std::vector<double> r_oracle(states.size());
    for (std::size_t k = 0; k < states.size(); ++k)
        r_oracle[k] = dev.resistance(states[k]);
    const auto& r_sim = r.signal("R(MR1)");
    REQUIRE(r_sim.size() == r_oracle.size());
    CHECK(oracle::relative_rms(r_sim, r_oracle) < 0.005);

    // the node voltage must agree as well
    std::vector<double> v_oracle(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) {
        double t = k * cfg.dt;
        double rs = dev.resistance(states[k]);
        v_oracle[k] = 2.0 * std::sin(2.0 * std::numbers::pi * 1e3 * t) * rs / (200e3 + rs);
    }
    CHECK(oracle::relative_rms(r.signal("m"), v_oracle) < 0.005);
}

TEST_CASE("transient returns a partial result when the system is singular") {
    Circuit c = parse_netlist(
        "V1 a 0 DC 1.8\n"
        "V2 a b DC 0\n"
        "V3 b 0 DC 1.0\n"
        "R1 a 0 1k\n");
    SolverConfig cfg;
    cfg.dt = 1e-12;
    cfg.t_stop = 1e-11;
    SimResult r = transient(c, cfg);
    CHECK(r.diverged);
    CHECK_FALSE(r.divergence_message.empty());
}

TEST_CASE("iv sweep of a threshold-locked device is a straight line through the origin") {
    MemristorElement dev;
    dev.team = reference_team_params();
    dev.team.i_on = -1.0;  // thresholds no sweep current can reach
    dev.team.i_off = 1.0;
    dev.initial_state = 1.5e-9;  // mid-range: R = 50050
    SolverConfig cfg;
    cfg.t_stop = 2e-3;
    cfg.dt = 1e-3 / 512;
    IvTrace trace = iv_sweep(dev, SourceSpec::make_sine(1.0, 1e3), cfg);
    CHECK(trace.periods == 2);
    REQUIRE(trace.v.size() == trace.i.size());
    for (std::size_t k = 0; k < trace.v.size(); ++k) {
        CHECK(trace.i[k] == doctest::Approx(trace.v[k] / 50050.0).epsilon(1e-9));
    }
}

TEST_CASE("iv sweep of the reference device is pinched at the origin") {
    MemristorElement dev;
    dev.team = reference_team_params();
    dev.initial_state = dev.team.x_off;
    SolverConfig cfg;
    cfg.t_stop = 2e-2;  // one period at 50 Hz... two periods
    cfg.dt = 1.0;       // adjusted internally to the period
    IvTrace trace = iv_sweep(dev, SourceSpec::make_sine(1.0, 100.0), cfg);
    double full_scale = 0.0;
    for (double i : trace.i) full_scale = std::max(full_scale, std::abs(i));
    REQUIRE(full_scale > 0.0);
    for (std::size_t k = 1; k < trace.v.size(); ++k) {
        if (trace.v[k - 1] == 0.0) continue;
        if (trace.v[k - 1] * trace.v[k] <= 0.0) {
            double f = trace.v[k - 1] / (trace.v[k - 1] - trace.v[k]);
            double i0 = trace.i[k - 1] + f * (trace.i[k] - trace.i[k - 1]);
            CHECK(std::abs(i0) <= 0.01 * full_scale);
        }
    }
}

TEST_CASE("iv sweep rejects a non-sine drive") {
    MemristorElement dev;
    dev.team = reference_team_params();
    SolverConfig cfg;
    CHECK_THROWS_AS((void)iv_sweep(dev, SourceSpec::make_dc(1.0), cfg), SolverError);
}

TEST_CASE("csv export format") {
    Circuit c = parse_netlist(divider_netlist("fwd", 1.8, 0.0));
    SolverConfig cfg;
    cfg.dt = 1e-12;
    cfg.t_stop = 3e-12;
    SimResult r = transient(c, cfg);
    std::ostringstream os;
    write_csv(os, r, {"a", "y"});
    std::string text = os.str();
    CHECK(text.rfind("time_s,a,y\n", 0) == 0);
    CHECK(text.find("0.00000000e+00,1.80000000e+00,") != std::string::npos);
    // header + 4 samples (t = 0 .. 3 ps)
    int lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 5);
}
