#include "memos/measure.hpp"

#include <algorithm>
#include <cmath>

namespace memos {

void LogicThresholds::check() const {
    if (!(v_low_max < v_high_min))
        throw std::invalid_argument("logic thresholds: v_low_max must be below v_high_min");
}

namespace {

constexpr double kMinSwing = 1e-9;  // V; below this a waveform has no edges

struct Crossing {
    double t;
    bool rising;
};

std::vector<Crossing> level_crossings(const Waveform& w, double level) {
    std::vector<Crossing> out;
    for (std::size_t k = 1; k < w.values.size(); ++k) {
        double a = w.values[k - 1], b = w.values[k];
        if (a == b) continue;
        bool up = a < level && b >= level;
        bool down = a > level && b <= level;
        if (!up && !down) continue;
        double f = (level - a) / (b - a);
        out.push_back({w.times[k - 1] + f * (w.times[k] - w.times[k - 1]), up});
    }
    return out;
}

struct Swing {
    double lo, hi;
};

Swing swing_of(const Waveform& w) {
    if (w.values.size() < 2) throw MeasureError("no edge: waveform too short");
    auto [mn, mx] = std::minmax_element(w.values.begin(), w.values.end());
    if (*mx - *mn < kMinSwing) throw MeasureError("no edge: waveform has no swing");
    return {*mn, *mx};
}

}  // namespace

double rise_time(const Waveform& w, double lo_frac, double hi_frac) {
    Swing s = swing_of(w);
    double lo = s.lo + lo_frac * (s.hi - s.lo);
    double hi = s.lo + hi_frac * (s.hi - s.lo);
    auto hi_x = level_crossings(w, hi);
    auto lo_x = level_crossings(w, lo);
    for (const Crossing& h : hi_x) {
        if (!h.rising) continue;
        double t_lo = -1.0;
        for (const Crossing& l : lo_x) {
            if (l.rising && l.t <= h.t) t_lo = l.t;
        }
        if (t_lo >= 0.0) return h.t - t_lo;
    }
    throw MeasureError("no edge: no rising transition found");
}

double fall_time(const Waveform& w, double hi_frac, double lo_frac) {
    Swing s = swing_of(w);
    double lo = s.lo + lo_frac * (s.hi - s.lo);
    double hi = s.lo + hi_frac * (s.hi - s.lo);
    auto lo_x = level_crossings(w, lo);
    auto hi_x = level_crossings(w, hi);
    for (const Crossing& l : lo_x) {
        if (l.rising) continue;
        double t_hi = -1.0;
        for (const Crossing& h : hi_x) {
            if (!h.rising && h.t <= l.t) t_hi = h.t;
        }
        if (t_hi >= 0.0) return l.t - t_hi;
    }
    throw MeasureError("no edge: no falling transition found");
}

double prop_delay(const Waveform& input, const Waveform& output, double frac) {
    Swing si = swing_of(input);
    Swing so = swing_of(output);
    auto in_x = level_crossings(input, si.lo + frac * (si.hi - si.lo));
    auto out_x = level_crossings(output, so.lo + frac * (so.hi - so.lo));
    if (in_x.empty()) throw MeasureError("no edge on the input waveform");
    if (out_x.empty()) throw MeasureError("no edge on the output waveform");
    double worst = -1.0;
    for (const Crossing& in : in_x) {
        for (const Crossing& out : out_x) {
            if (out.t >= in.t) {
                worst = std::max(worst, out.t - in.t);
                break;
            }
        }
    }
    if (worst < 0.0) throw MeasureError("no output edge follows an input edge");
    return worst;
}

double avg_power(const Waveform& v, const Waveform& i, double t_begin, double t_end) {
    if (v.times.size() != i.times.size()) throw MeasureError("waveform grids differ in length");
    for (std::size_t k = 0; k < v.times.size(); ++k) {
        if (v.times[k] != i.times[k]) throw MeasureError("waveform grids are not aligned");
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < v.times.size(); ++k) {
        if (v.times[k] < t_begin || v.times[k] > t_end) continue;
        sum += v.values[k] * i.values[k];
        ++n;
    }
    if (n == 0) throw MeasureError("power window contains no samples");
    return sum / static_cast<double>(n);
}

Logic read_logic(const Waveform& w, double t, const LogicThresholds& th) {
    th.check();
    double v = w.value_at(t);
    if (v >= th.v_high_min) return Logic::high;
    if (v <= th.v_low_max) return Logic::low;
    return Logic::undefined;
}

double loop_area(std::span<const double> v, std::span<const double> i) {
    if (v.size() != i.size()) throw MeasureError("loop trajectory arrays differ in length");
    if (v.size() < 3) return 0.0;
    double twice = 0.0;
    std::size_t n = v.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t j = (k + 1) % n;
        twice += v[k] * i[j] - v[j] * i[k];
    }
    return 0.5 * std::abs(twice);
}

std::vector<TruthRow> truth_table(const Circuit& c, const std::vector<std::string>& inputs,
                                  const std::vector<std::string>& outputs,
                                  const std::vector<std::vector<int>>& vectors,
                                  const TruthTableOptions& opt) {
    opt.thresholds.check();
    std::vector<NodeIndex> in_nodes, out_nodes;
    for (const std::string& name : inputs) {
        const Port* p = c.find_port(name);
        if (!p) throw MeasureError("unknown input port '" + name + "'");
        in_nodes.push_back(p->node);
    }
    for (const std::string& name : outputs) {
        const Port* p = c.find_port(name);
        if (!p) throw MeasureError("unknown output port '" + name + "'");
        out_nodes.push_back(p->node);
    }

    std::map<std::string, double> carried;
    std::vector<TruthRow> rows;
    for (const auto& vec : vectors) {
        if (vec.size() != inputs.size())
            throw MeasureError("vector width does not match the input list");
        Circuit driven = c;
        for (std::size_t k = 0; k < in_nodes.size(); ++k) {
            driven.add(Element{"V__tt" + std::to_string(k),
                               VsourceElement{SourceSpec::make_dc(vec[k] ? opt.vcc : 0.0),
                                              in_nodes[k], ground_node}});
        }
        SolverConfig scfg = opt.solver;
        scfg.t_stop = opt.settle;
        SimResult r = transient(driven, scfg, opt.reset_state ? std::map<std::string, double>{}
                                                              : carried);
        if (r.diverged) throw MeasureError("truth table simulation diverged: " +
                                           r.divergence_message);
        if (!opt.reset_state) carried = r.final_states;

        TruthRow row;
        row.inputs = vec;
        for (NodeIndex n : out_nodes) {
            const auto& sig = r.signal(c.node_name(n));
            double v = sig.back();
            Logic l = v >= opt.thresholds.v_high_min
                          ? Logic::high
                          : (v <= opt.thresholds.v_low_max ? Logic::low : Logic::undefined);
            row.outputs.push_back(l);
            if (l == Logic::undefined) row.flagged = true;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<TruthRow> truth_table(const Circuit& c, const std::vector<std::string>& inputs,
                                  const std::vector<std::string>& outputs,
                                  const TruthTableOptions& opt) {
    if (inputs.size() > 20) throw MeasureError("exhaustive truth table limited to 20 inputs");
    std::vector<std::vector<int>> vectors;
    std::size_t n = inputs.size();
    for (std::size_t code = 0; code < (static_cast<std::size_t>(1) << n); ++code) {
        std::vector<int> vec(n);
        for (std::size_t k = 0; k < n; ++k)
            vec[k] = static_cast<int>((code >> (n - 1 - k)) & 1u);
        vectors.push_back(std::move(vec));
    }
    return truth_table(c, inputs, outputs, vectors, opt);
}

}  // namespace memos
