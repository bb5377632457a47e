#pragma once

#include <span>

#include "memos/solver.hpp"

namespace memos {

struct MeasureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LogicThresholds {
    double v_high_min = 0.9 * default_vcc;
    double v_low_max = 0.1 * default_vcc;

    static LogicThresholds for_vcc(double vcc) { return {0.9 * vcc, 0.1 * vcc}; }
    void check() const;
};

enum class Logic { low, high, undefined };

inline char logic_char(Logic l) {
    return l == Logic::low ? '0' : l == Logic::high ? '1' : 'X';
}

/// Time from the last lo-level crossing to the first subsequent hi-level
/// crossing of a rising transition; levels are fractions of the waveform's
/// own swing, crossings linearly interpolated. Throws MeasureError("no edge")
/// when no qualifying transition exists.
double rise_time(const Waveform& w, double lo_frac = 0.1, double hi_frac = 0.9);

/// Mirror of rise_time for the falling transition.
double fall_time(const Waveform& w, double hi_frac = 0.9, double lo_frac = 0.1);

/// Worst-case delay from each input mid-swing crossing to the first output
/// mid-swing crossing at or after it.
double prop_delay(const Waveform& input, const Waveform& output, double frac = 0.5);

/// Mean of v(t)*i(t) over samples in [t_begin, t_end]. Grids must match.
double avg_power(const Waveform& v, const Waveform& i, double t_begin, double t_end);

Logic read_logic(const Waveform& w, double t, const LogicThresholds& th);

/// Absolute shoelace area of the closed (v, i) polygon.
double loop_area(std::span<const double> v, std::span<const double> i);

struct TruthRow {
    std::vector<int> inputs;
    std::vector<Logic> outputs;
    bool flagged = false;  // some output was in the undefined band

    bool all_defined() const { return !flagged; }
};

struct TruthTableOptions {
    LogicThresholds thresholds{};
    double vcc = default_vcc;
    double settle = 1e-9;      // simulated time per vector
    bool reset_state = true;   // fresh device states per vector (default); when
                               // false the final states carry into the next one
    SolverConfig solver{};     // solver settings; t_stop is taken from settle
};

/// Drives DC levels on the input ports, simulates for the settle time and
/// classifies each output at the end. One row per supplied vector.
std::vector<TruthRow> truth_table(const Circuit& c, const std::vector<std::string>& inputs,
                                  const std::vector<std::string>& outputs,
                                  const std::vector<std::vector<int>>& vectors,
                                  const TruthTableOptions& opt = {});

/// Exhaustive variant over all 2^n input vectors, first input most significant.
std::vector<TruthRow> truth_table(const Circuit& c, const std::vector<std::string>& inputs,
                                  const std::vector<std::string>& outputs,
                                  const TruthTableOptions& opt = {});

}  // namespace memos
