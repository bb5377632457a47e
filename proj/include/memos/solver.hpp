#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "memos/netlist.hpp"

namespace memos {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverConfig {
    double dt = 1e-13;    // fixed step (s)
    double t_stop = 1e-9; // s
    double newton_tol = 1e-6;  // node voltage convergence (V)
    int newton_max_iter = 50;
    enum class Integration { backward_euler, trapezoidal };
    Integration state_integration = Integration::backward_euler;
    double gmin = 1e-12;  // conductance floor: node-to-ground and across memristors (S)
    bool record_resistances = true;

    void check() const;
};

struct Waveform {
    std::string label;
    std::vector<double> times;   // uniform grid
    std::vector<double> values;

    std::size_t size() const { return times.size(); }
    double value_at(double t) const;  // nearest sample
};

struct SimResult {
    std::vector<double> times;
    // node voltages by node name, source branch currents as "I(<name>)"
    // (positive into the + terminal, SPICE convention), memristor resistances
    // as "R(<name>)"
    std::map<std::string, std::vector<double>> signals;
    std::map<std::string, double> final_states;  // memristor name -> state value
    bool diverged = false;
    std::string divergence_message;

    bool has_signal(const std::string& name) const { return signals.count(name) != 0; }
    const std::vector<double>& signal(const std::string& name) const;
    Waveform waveform(const std::string& name) const;
};

/// Newton solve of the nonlinear MNA system with memristor states held at
/// their initial values (optionally overridden per element name). Returns
/// node-name -> voltage. Throws SolverError naming the worst node when the
/// iteration does not converge.
std::map<std::string, double> dc_operating_point(
    const Circuit& c, const SolverConfig& cfg = {},
    const std::map<std::string, double>& state_overrides = {});

/// Fixed-step transient: per step the memristor resistances are frozen at the
/// current state, the MNA system is solved by Newton iteration, then states
/// advance by the configured implicit rule and are clamped to the device
/// range. On divergence the result carries every step before the failure and
/// the diverged flag. state_overrides seeds memristor states by element name.
SimResult transient(const Circuit& c, const SolverConfig& cfg,
                    const std::map<std::string, double>& state_overrides = {});

struct IvTrace {
    std::vector<double> v;
    std::vector<double> i;
    int samples_per_period = 0;
    int periods = 0;
};

/// Drives a single memristor with a sine source and returns its I-V
/// trajectory over an integer number of periods (from cfg.t_stop, at least
/// one). cfg.dt is adjusted to divide the period exactly.
IvTrace iv_sweep(const MemristorElement& device, const SourceSpec& drive,
                 const SolverConfig& cfg);

/// CSV export, header "time_s,<signal>...", scientific notation with
/// 9 significant digits.
void write_csv(std::ostream& os, const SimResult& r, const std::vector<std::string>& signals);

}  // namespace memos
