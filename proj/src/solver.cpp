#include "memos/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace memos {

void SolverConfig::check() const {
    if (!(dt > 0.0)) throw std::invalid_argument("solver dt must be positive");
    if (!(t_stop >= dt)) throw std::invalid_argument("solver t_stop must be at least dt");
    if (!(newton_tol > 0.0)) throw std::invalid_argument("newton_tol must be positive");
    if (newton_max_iter < 1) throw std::invalid_argument("newton_max_iter must be at least 1");
    if (!(gmin >= 0.0)) throw std::invalid_argument("gmin must be nonnegative");
}

double Waveform::value_at(double t) const {
    if (times.empty()) throw SolverError("empty waveform");
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    double dt = times[1] - times[0];
    std::size_t k = static_cast<std::size_t>(std::llround((t - times.front()) / dt));
    k = std::min(k, times.size() - 1);
    return values[k];
}

const std::vector<double>& SimResult::signal(const std::string& name) const {
    auto it = signals.find(name);
    if (it == signals.end()) throw SolverError("no signal named '" + name + "'");
    return it->second;
}

Waveform SimResult::waveform(const std::string& name) const {
    return Waveform{name, times, signal(name)};
}

// ----------------------------------------------------------------------------
// state integration helpers
// ----------------------------------------------------------------------------

namespace {

double clamp_state(const MemristorElement& m, double x) {
    return std::clamp(x, m.state_min(), m.state_max());
}

// Backward-Euler step of the team state: solves x = x_old + dt*f(x, i) by
// bisection along the motion direction, clamping at the range bound when the
// velocity never decays enough to stop inside it.
double team_state_be(const TeamParams& p, double x_old, double i_dev, double dt) {
    auto f = [&](double x) { return team_dxdt(p, TeamState{x}, i_dev); };
    double f0 = f(x_old);
    if (f0 == 0.0) return x_old;
    double lo, hi;
    if (f0 > 0.0) {
        hi = p.x_max();
        if (hi - x_old - dt * f(hi) <= 0.0) return hi;
        lo = x_old;
    } else {
        lo = p.x_min();
        if (lo - x_old - dt * f(lo) >= 0.0) return lo;
        hi = x_old;
    }
    // invariant: g(lo) < 0 <= g(hi) with g(x) = x - x_old - dt * f(x)
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double g = mid - x_old - dt * f(mid);
        if (g < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Trapezoidal step: x = x_old + dt/2 * (f_prev + f(x, i_new)) with f_prev a
// frozen number from the previous step.
double team_state_trap(const TeamParams& p, double x_old, double f_prev, double i_dev,
                       double dt) {
    auto h = [&](double x) { return 0.5 * (f_prev + team_dxdt(p, TeamState{x}, i_dev)); };
    double h0 = h(x_old);
    if (h0 == 0.0) return x_old;
    double lo, hi;
    if (h0 > 0.0) {
        hi = p.x_max();
        if (hi - x_old - dt * h(hi) <= 0.0) return hi;
        lo = x_old;
    } else {
        lo = p.x_min();
        if (lo - x_old - dt * h(lo) >= 0.0) return lo;
        hi = x_old;
    }
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double g = mid - x_old - dt * h(mid);
        if (g < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// ----------------------------------------------------------------------------
// engine
// ----------------------------------------------------------------------------

struct MemristorWork {
    const MemristorElement* m = nullptr;
    std::string name;
    int a = -1, b = -1;
    double orient = 1.0;
    double state = 0.0;
    double r = 0.0;
    double i_dev_prev = 0.0;
};

struct MosfetWork {
    const MosfetParams* p = nullptr;
    int d = -1, g = -1, s = -1;
};

struct SourceWork {
    std::string label;
    SourceSpec spec;
    int a = -1, b = -1;
    int branch = 0;  // column/row offset past the node block
};

struct ResistorWork {
    int a = -1, b = -1;
    double g = 0.0;
};

class Engine {
public:
    Engine(const Circuit& c, const SolverConfig& cfg,
           const std::map<std::string, double>& state_overrides)
        : circuit_(c), cfg_(cfg) {
        nn_ = c.node_count() - 1;
        for (const Element& e : c.elements()) {
            if (auto* m = std::get_if<MemristorElement>(&e.body)) {
                MemristorWork w;
                w.m = m;
                w.name = e.name;
                w.a = m->n_plus - 1;
                w.b = m->n_minus - 1;
                w.orient = m->orientation_sign();
                auto it = state_overrides.find(e.name);
                w.state = clamp_state(*m, it != state_overrides.end() ? it->second
                                                                      : m->initial_state);
                w.r = m->resistance(w.state);
                memristors_.push_back(w);
            } else if (auto* mf = std::get_if<MosfetElement>(&e.body)) {
                mosfets_.push_back(
                    MosfetWork{&mf->params, mf->drain - 1, mf->gate - 1, mf->source - 1});
            } else if (auto* v = std::get_if<VsourceElement>(&e.body)) {
                SourceWork w;
                w.label = e.name;
                w.spec = v->spec;
                w.a = v->n_plus - 1;
                w.b = v->n_minus - 1;
                w.branch = static_cast<int>(sources_.size());
                sources_.push_back(w);
            } else {
                auto& r = std::get<ResistorElement>(e.body);
                resistors_.push_back(ResistorWork{r.n_plus - 1, r.n_minus - 1, 1.0 / r.ohms});
            }
        }
        if (c.rail()) {
            SourceWork w;
            w.label = ".vcc";
            w.spec = SourceSpec::make_dc(c.rail()->volts);
            w.a = c.rail()->node - 1;
            w.b = -1;
            w.branch = static_cast<int>(sources_.size());
            sources_.push_back(w);
        }
        n_ = nn_ + static_cast<int>(sources_.size());
        A_.resize(n_, n_);
        b_.resize(n_);
        v_ = Eigen::VectorXd::Zero(n_);
    }

    int system_size() const { return n_; }
    bool linear() const { return mosfets_.empty(); }
    const std::vector<MemristorWork>& memristors() const { return memristors_; }
    const std::vector<SourceWork>& sources() const { return sources_; }
    Eigen::VectorXd& state_vector() { return v_; }

    void assemble(const Eigen::VectorXd& guess, const Eigen::VectorXd& prev, double t,
                  bool with_caps, double dt, double source_scale) {
        A_.setZero();
        b_.setZero();
        for (int i = 0; i < nn_; ++i) A_(i, i) += cfg_.gmin;

        auto stamp_g = [&](int a, int b, double g) {
            if (a >= 0) A_(a, a) += g;
            if (b >= 0) A_(b, b) += g;
            if (a >= 0 && b >= 0) {
                A_(a, b) -= g;
                A_(b, a) -= g;
            }
        };
        auto volt = [&](const Eigen::VectorXd& x, int row) { return row >= 0 ? x(row) : 0.0; };

        for (const ResistorWork& r : resistors_) stamp_g(r.a, r.b, r.g);
        for (const MemristorWork& m : memristors_) stamp_g(m.a, m.b, 1.0 / m.r + cfg_.gmin);

        for (const SourceWork& s : sources_) {
            int k = nn_ + s.branch;
            if (s.a >= 0) {
                A_(s.a, k) += 1.0;
                A_(k, s.a) += 1.0;
            }
            if (s.b >= 0) {
                A_(s.b, k) -= 1.0;
                A_(k, s.b) -= 1.0;
            }
            b_(k) = s.spec.value(t) * source_scale;
        }

        for (const MosfetWork& m : mosfets_) {
            double vg = volt(guess, m.g), vd = volt(guess, m.d), vs = volt(guess, m.s);
            MosfetLin lin = mosfet_linearize(*m.p, vg, vd, vs);
            double i_eq = lin.ids - lin.gm * vg - lin.gds * vd + (lin.gm + lin.gds) * vs;
            if (m.d >= 0) {
                if (m.g >= 0) A_(m.d, m.g) += lin.gm;
                A_(m.d, m.d) += lin.gds;
                if (m.s >= 0) A_(m.d, m.s) -= lin.gm + lin.gds;
                b_(m.d) -= i_eq;
            }
            if (m.s >= 0) {
                if (m.g >= 0) A_(m.s, m.g) -= lin.gm;
                if (m.d >= 0) A_(m.s, m.d) -= lin.gds;
                A_(m.s, m.s) += lin.gm + lin.gds;
                b_(m.s) += i_eq;
            }
            if (with_caps) {
                stamp_cap(m.g, m.s, m.p->c_gs / dt, prev);
                stamp_cap(m.g, m.d, m.p->c_gd / dt, prev);
            }
        }
    }

    // Newton loop at time t; returns false and fills error_ on failure.
    bool solve_point(double t, bool with_caps, double dt, double source_scale) {
        Eigen::VectorXd guess = v_;
        Eigen::VectorXd prev = v_;
        int iters = linear() ? 1 : cfg_.newton_max_iter;
        for (int it = 0; it < iters; ++it) {
            assemble(guess, prev, t, with_caps, dt, source_scale);
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(A_);
            Eigen::VectorXd next = lu.solve(b_);
            if (!next.allFinite()) {
                error_ = "singular system" + worst_node_suffix(guess);
                return false;
            }
            if (linear()) {
                // final answer for a linear system; reject inconsistent or
                // unbounded solutions (conflicting ideal sources)
                double resid = (A_ * next - b_).cwiseAbs().maxCoeff();
                double scale = std::max(1.0, b_.cwiseAbs().maxCoeff());
                if (next.cwiseAbs().maxCoeff() > 1e9 || resid > 1e-6 * scale) {
                    error_ = "singular system" + worst_node_suffix(guess);
                    return false;
                }
                v_ = next;
                return true;
            }
            double delta = 0.0;
            int worst = -1;
            for (int i = 0; i < nn_; ++i) {
                double d = std::abs(next(i) - guess(i));
                if (d > delta) {
                    delta = d;
                    worst = i;
                }
            }
            if (delta < cfg_.newton_tol) {
                v_ = next;
                return true;
            }
            worst_ = worst;
            // damped update: limit the node-voltage step per iteration
            for (int i = 0; i < nn_; ++i) {
                double step = std::clamp(next(i) - guess(i), -2.0, 2.0);
                guess(i) += step;
            }
            for (int i = nn_; i < n_; ++i) guess(i) = next(i);
        }
        error_ = "newton iteration did not converge" + worst_node_suffix(v_);
        return false;
    }

    // DC with source stepping fallback.
    bool solve_dc(double t) {
        Eigen::VectorXd save = v_;
        if (solve_point(t, false, 1.0, 1.0)) return true;
        v_ = Eigen::VectorXd::Zero(n_);
        for (int step = 1; step <= 10; ++step) {
            if (!solve_point(t, false, 1.0, 0.1 * step)) {
                v_ = save;
                return false;
            }
        }
        return true;
    }

    void advance_states(double dt) {
        for (MemristorWork& w : memristors_) {
            double va = w.a >= 0 ? v_(w.a) : 0.0;
            double vb = w.b >= 0 ? v_(w.b) : 0.0;
            double i_dev = w.orient * (va - vb) / w.r;
            double next;
            if (w.m->model == MemristorElement::Model::team) {
                if (cfg_.state_integration == SolverConfig::Integration::trapezoidal) {
                    double f_prev = team_dxdt(w.m->team, TeamState{w.state}, w.i_dev_prev);
                    next = team_state_trap(w.m->team, w.state, f_prev, i_dev, dt);
                } else {
                    next = team_state_be(w.m->team, w.state, i_dev, dt);
                }
            } else {
                double rate_new = lid_dwdt(w.m->lid, i_dev);
                if (cfg_.state_integration == SolverConfig::Integration::trapezoidal) {
                    double rate_prev = lid_dwdt(w.m->lid, w.i_dev_prev);
                    next = w.state + 0.5 * dt * (rate_prev + rate_new);
                } else {
                    next = w.state + dt * rate_new;
                }
            }
            w.state = clamp_state(*w.m, next);
            w.r = w.m->resistance(w.state);
            w.i_dev_prev = i_dev;
        }
    }

    void prime_prev_currents() {
        for (MemristorWork& w : memristors_) {
            double va = w.a >= 0 ? v_(w.a) : 0.0;
            double vb = w.b >= 0 ? v_(w.b) : 0.0;
            w.i_dev_prev = w.orient * (va - vb) / w.r;
        }
    }

    const std::string& error() const { return error_; }

    std::string worst_node_suffix(const Eigen::VectorXd&) const {
        if (worst_ >= 0 && worst_ < nn_)
            return " near node '" + circuit_.node_name(worst_ + 1) + "'";
        return "";
    }

private:
    void stamp_cap(int a, int b, double gc, const Eigen::VectorXd& prev) {
        if (gc <= 0.0) return;
        double hist = 0.0;
        if (a >= 0) hist += prev(a);
        if (b >= 0) hist -= prev(b);
        if (a >= 0) {
            A_(a, a) += gc;
            if (b >= 0) A_(a, b) -= gc;
            b_(a) += gc * hist;
        }
        if (b >= 0) {
            A_(b, b) += gc;
            if (a >= 0) A_(b, a) -= gc;
            b_(b) -= gc * hist;
        }
    }

    const Circuit& circuit_;
    SolverConfig cfg_;
    int nn_ = 0;
    int n_ = 0;
    std::vector<MemristorWork> memristors_;
    std::vector<MosfetWork> mosfets_;
    std::vector<SourceWork> sources_;
    std::vector<ResistorWork> resistors_;
    Eigen::MatrixXd A_;
    Eigen::VectorXd b_;
    Eigen::VectorXd v_;
    std::string error_;
    int worst_ = -1;
};

void require_simulatable(const Circuit& c) {
    auto report = validate(c);
    if (!report.empty()) {
        std::string msg = "circuit failed validation: " + report.front().what;
        if (report.size() > 1)
            msg += " (+" + std::to_string(report.size() - 1) + " more)";
        throw SolverError(msg);
    }
}

}  // namespace

// ----------------------------------------------------------------------------
// public entry points
// ----------------------------------------------------------------------------

std::map<std::string, double> dc_operating_point(
    const Circuit& c, const SolverConfig& cfg,
    const std::map<std::string, double>& state_overrides) {
    cfg.check();
    require_simulatable(c);
    Engine eng(c, cfg, state_overrides);
    if (!eng.solve_dc(0.0)) throw SolverError("dc operating point: " + eng.error());
    std::map<std::string, double> out;
    out["0"] = 0.0;
    for (int n = 1; n < c.node_count(); ++n) out[c.node_name(n)] = eng.state_vector()(n - 1);
    return out;
}

SimResult transient(const Circuit& c, const SolverConfig& cfg,
                    const std::map<std::string, double>& state_overrides) {
    cfg.check();
    require_simulatable(c);
    Engine eng(c, cfg, state_overrides);
    SimResult out;

    std::vector<std::pair<std::string, int>> node_rows;
    for (int n = 1; n < c.node_count(); ++n) node_rows.push_back({c.node_name(n), n - 1});

    auto record = [&](double t) {
        out.times.push_back(t);
        const Eigen::VectorXd& v = eng.state_vector();
        for (auto& [name, row] : node_rows) out.signals[name].push_back(v(row));
        int nn = static_cast<int>(node_rows.size());
        for (const SourceWork& s : eng.sources())
            out.signals["I(" + s.label + ")"].push_back(v(nn + s.branch));
        if (cfg.record_resistances)
            for (const MemristorWork& m : eng.memristors())
                out.signals["R(" + m.name + ")"].push_back(m.r);
    };

    if (!eng.solve_dc(0.0)) {
        out.diverged = true;
        out.divergence_message = "divergence at t=0: " + eng.error();
        return out;
    }
    eng.prime_prev_currents();
    record(0.0);

    long steps = std::max<long>(1, std::lround(cfg.t_stop / cfg.dt));
    for (long k = 1; k <= steps; ++k) {
        double t = static_cast<double>(k) * cfg.dt;
        if (!eng.solve_point(t, true, cfg.dt, 1.0)) {
            out.diverged = true;
            out.divergence_message =
                "divergence at step " + std::to_string(k) + " (t=" + format_double(t) +
                "): " + eng.error();
            break;
        }
        eng.advance_states(cfg.dt);
        record(t);
    }
    for (const MemristorWork& m : eng.memristors()) out.final_states[m.name] = m.state;
    return out;
}

IvTrace iv_sweep(const MemristorElement& device, const SourceSpec& drive,
                 const SolverConfig& cfg) {
    if (drive.kind != SourceSpec::Kind::sine)
        throw SolverError("iv_sweep requires a sine drive");
    drive.check();
    if (device.model == MemristorElement::Model::team) device.team.check();
    else device.lid.check();

    double period = 1.0 / drive.frequency;
    int periods = std::max(1, static_cast<int>(std::lround(cfg.t_stop * drive.frequency)));
    int spp = cfg.dt > 0.0 ? static_cast<int>(std::lround(period / cfg.dt)) : 0;
    spp = std::max(spp, 64);

    Circuit c;
    NodeIndex p = c.add_node("p");
    MemristorElement dut = device;
    dut.n_plus = p;
    dut.n_minus = ground_node;
    c.add(Element{"MRDUT", dut});
    c.add(Element{"VSWEEP", VsourceElement{drive, p, ground_node}});

    SolverConfig run = cfg;
    run.dt = period / spp;
    run.t_stop = periods * period;
    run.record_resistances = true;
    SimResult r = transient(c, run);
    if (r.diverged) throw SolverError("iv_sweep: " + r.divergence_message);

    const auto& v = r.signal("p");
    const auto& res = r.signal("R(MRDUT)");
    IvTrace trace;
    trace.samples_per_period = spp;
    trace.periods = periods;
    trace.v = v;
    trace.i.resize(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        // the step ending at sample k used the resistance recorded at k-1
        double rk = res[k == 0 ? 0 : k - 1];
        trace.i[k] = v[k] / rk;
    }
    return trace;
}

void write_csv(std::ostream& os, const SimResult& r, const std::vector<std::string>& signals) {
    os << "time_s";
    for (const std::string& s : signals) os << ',' << s;
    os << '\n';
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.8e", v);
        os << buf;
    };
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        put(r.times[k]);
        for (const std::string& s : signals) {
            os << ',';
            put(r.signal(s)[k]);
        }
        os << '\n';
    }
}

}  // namespace memos
