#include "memos/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

namespace memos {

// ----------------------------------------------------------------------------
// SourceSpec
// ----------------------------------------------------------------------------

SourceSpec SourceSpec::make_dc(double v) {
    SourceSpec s;
    s.kind = Kind::dc;
    s.dc = v;
    return s;
}

SourceSpec SourceSpec::make_pulse(double v_low, double v_high, double delay, double rise,
                                  double fall, double width, double period) {
    SourceSpec s;
    s.kind = Kind::pulse;
    s.v_low = v_low;
    s.v_high = v_high;
    s.delay = delay;
    s.rise = rise;
    s.fall = fall;
    s.width = width;
    s.period = period;
    return s;
}

SourceSpec SourceSpec::make_sine(double amplitude, double frequency) {
    SourceSpec s;
    s.kind = Kind::sine;
    s.amplitude = amplitude;
    s.frequency = frequency;
    return s;
}

void SourceSpec::check() const {
    if (kind == Kind::pulse) {
        if (rise <= 0 || fall <= 0 || width <= 0 || period <= 0)
            throw NetlistError("pulse rise/fall/width/period must be positive");
        if (period < rise + width + fall)
            throw NetlistError("pulse period shorter than rise + width + fall");
    } else if (kind == Kind::sine) {
        if (frequency <= 0) throw NetlistError("sine frequency must be positive");
    }
}

double SourceSpec::value(double t) const {
    switch (kind) {
        case Kind::dc:
            return dc;
        case Kind::sine:
            return amplitude * std::sin(2.0 * std::numbers::pi * frequency * t);
        case Kind::pulse: {
            if (t < delay) return v_low;
            double tt = std::fmod(t - delay, period);
            if (tt < rise) return v_low + (v_high - v_low) * (tt / rise);
            tt -= rise;
            if (tt < width) return v_high;
            tt -= width;
            if (tt < fall) return v_high + (v_low - v_high) * (tt / fall);
            return v_low;
        }
    }
    return 0.0;
}

// ----------------------------------------------------------------------------
// Elements
// ----------------------------------------------------------------------------

double MemristorElement::resistance(double state) const {
    if (model == Model::team) return team_resistance(team, TeamState{state});
    return lid_resistance(lid, LinearDriftState{state});
}

double MemristorElement::orientation_sign() const {
    if (model == Model::team) return team_orientation_sign(team, polarity);
    return lid_orientation_sign(polarity);
}

double MemristorElement::state_min() const {
    return model == Model::team ? team.x_min() : 0.0;
}

double MemristorElement::state_max() const {
    return model == Model::team ? team.x_max() : lid.d;
}

std::vector<NodeIndex> Element::terminals() const {
    if (auto* m = std::get_if<MemristorElement>(&body)) return {m->n_plus, m->n_minus};
    if (auto* m = std::get_if<MosfetElement>(&body)) return {m->drain, m->gate, m->source};
    if (auto* v = std::get_if<VsourceElement>(&body)) return {v->n_plus, v->n_minus};
    auto& r = std::get<ResistorElement>(body);
    return {r.n_plus, r.n_minus};
}

// ----------------------------------------------------------------------------
// Circuit
// ----------------------------------------------------------------------------

namespace {

bool is_ground_name(const std::string& name) {
    if (name == "0") return true;
    if (name.size() != 3) return false;
    return std::tolower(name[0]) == 'g' && std::tolower(name[1]) == 'n' &&
           std::tolower(name[2]) == 'd';
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

Circuit::Circuit() {
    node_names_.push_back("0");
    node_index_["0"] = ground_node;
}

NodeIndex Circuit::add_node(const std::string& name) {
    if (is_ground_name(name)) return ground_node;
    auto it = node_index_.find(name);
    if (it != node_index_.end()) return it->second;
    NodeIndex idx = static_cast<NodeIndex>(node_names_.size());
    node_names_.push_back(name);
    node_index_[name] = idx;
    return idx;
}

NodeIndex Circuit::find_node(const std::string& name) const {
    if (is_ground_name(name)) return ground_node;
    auto it = node_index_.find(name);
    return it == node_index_.end() ? -1 : it->second;
}

const std::string& Circuit::node_name(NodeIndex n) const {
    return node_names_.at(static_cast<std::size_t>(n));
}

void Circuit::add(Element e) {
    if (e.name.empty()) throw NetlistError("element name must not be empty");
    if (element_index_.count(e.name))
        throw NetlistError("duplicate element name '" + e.name + "'");
    for (NodeIndex n : e.terminals()) {
        if (n < 0 || n >= node_count())
            throw NetlistError("element '" + e.name + "' references an unknown node");
    }
    element_index_[e.name] = elements_.size();
    elements_.push_back(std::move(e));
}

const Element* Circuit::find_element(const std::string& name) const {
    auto it = element_index_.find(name);
    return it == element_index_.end() ? nullptr : &elements_[it->second];
}

Element* Circuit::find_element(const std::string& name) {
    auto it = element_index_.find(name);
    return it == element_index_.end() ? nullptr : &elements_[it->second];
}

void Circuit::set_port(const std::string& name, NodeIndex node, PortDir dir) {
    if (node < 0 || node >= node_count()) throw NetlistError("port references an unknown node");
    for (const Port& p : ports_) {
        if (p.name == name) throw NetlistError("duplicate port '" + name + "'");
    }
    ports_.push_back(Port{name, node, dir});
}

const Port* Circuit::find_port(const std::string& name) const {
    for (const Port& p : ports_)
        if (p.name == name) return &p;
    return nullptr;
}

void Circuit::set_rail(NodeIndex node, double volts) {
    if (node <= 0 || node >= node_count()) throw NetlistError("rail references an unknown node");
    if (rail_ && (rail_->node != node || rail_->volts != volts))
        throw NetlistError("conflicting supply rail definitions");
    rail_ = Rail{node, volts};
}

bool Circuit::operator==(const Circuit& other) const {
    // name-based comparison; robust against node index permutations
    return serialize(*this) == serialize(other);
}

// ----------------------------------------------------------------------------
// Number formatting / parsing
// ----------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_value(const std::string& token) {
    if (token.empty()) throw std::invalid_argument("empty numeric value");
    const char* begin = token.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw std::invalid_argument("malformed numeric value '" + token + "'");
    std::string suffix(end);
    if (suffix.empty()) return v;
    if (suffix.size() == 1) {
        switch (std::tolower(static_cast<unsigned char>(suffix[0]))) {
            case 'k': return v * 1e3;
            case 'm': return v * 1e-3;
            case 'u': return v * 1e-6;
            case 'n': return v * 1e-9;
            case 'p': return v * 1e-12;
            default: break;
        }
    }
    throw std::invalid_argument("unknown value suffix '" + suffix + "'");
}

// ----------------------------------------------------------------------------
// Parser
// ----------------------------------------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

struct KeyValue {
    std::string key;
    std::string value;
};

KeyValue split_kv(const std::string& tok, int line) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= tok.size())
        throw ParseError("expected key=value, got '" + tok + "'", line);
    std::string key = tok.substr(0, eq);
    for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return {key, tok.substr(eq + 1)};
}

double number(const std::string& tok, int line) {
    try {
        return parse_value(tok);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line);
    }
}

Polarity parse_polarity(const std::string& v, int line) {
    std::string u = upper(v);
    if (u == "FWD" || u == "FORWARD") return Polarity::forward;
    if (u == "REV" || u == "REVERSE") return Polarity::reverse;
    throw ParseError("polarity must be fwd or rev, got '" + v + "'", line);
}

// extracts the numbers inside "NAME(a b c)" allowing commas as separators
std::vector<double> paren_args(const std::string& text, int line) {
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ParseError("malformed source spec '" + text + "'", line);
    std::string inner = text.substr(open + 1, close - open - 1);
    for (char& c : inner)
        if (c == ',') c = ' ';
    std::vector<double> out;
    for (const std::string& tok : split_ws(inner)) out.push_back(number(tok, line));
    return out;
}

MemristorElement parse_memristor(const std::vector<std::string>& tok, Circuit& c, int line) {
    if (tok.size() < 4)
        throw ParseError("memristor card needs: MRx n+ n- (TEAM|LID) [key=value...]", line);
    MemristorElement m;
    m.n_plus = c.add_node(tok[1]);
    m.n_minus = c.add_node(tok[2]);
    std::string model = upper(tok[3]);
    std::optional<double> x0;
    if (model == "TEAM") {
        m.model = MemristorElement::Model::team;
        m.team = reference_team_params();
        for (std::size_t i = 4; i < tok.size(); ++i) {
            auto [key, value] = split_kv(tok[i], line);
            if (key == "polarity") { m.polarity = parse_polarity(value, line); continue; }
            if (key == "x0") { x0 = number(value, line); continue; }
            double v = number(value, line);
            if (key == "ron") m.team.r_on = v;
            else if (key == "roff") m.team.r_off = v;
            else if (key == "kon") m.team.k_on = v;
            else if (key == "koff") m.team.k_off = v;
            else if (key == "alphaon") m.team.alpha_on = v;
            else if (key == "alphaoff") m.team.alpha_off = v;
            else if (key == "ion") m.team.i_on = v;
            else if (key == "ioff") m.team.i_off = v;
            else if (key == "xon") m.team.x_on = v;
            else if (key == "xoff") m.team.x_off = v;
            else if (key == "wc") m.team.w_c = v;
            else if (key == "aon") m.team.a_on = v;
            else if (key == "aoff") m.team.a_off = v;
            else throw ParseError("unknown TEAM parameter '" + key + "'", line);
        }
        try {
            m.team.check();
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line);
        }
        m.initial_state = x0.value_or(m.team.x_off);
    } else if (model == "LID") {
        m.model = MemristorElement::Model::lid;
        m.lid = LinearDriftParams{};
        for (std::size_t i = 4; i < tok.size(); ++i) {
            auto [key, value] = split_kv(tok[i], line);
            if (key == "polarity") { m.polarity = parse_polarity(value, line); continue; }
            if (key == "w0") { x0 = number(value, line); continue; }
            double v = number(value, line);
            if (key == "d") m.lid.d = v;
            else if (key == "mu") m.lid.mu_v = v;
            else if (key == "ron") m.lid.r_on = v;
            else if (key == "roff") m.lid.r_off = v;
            else throw ParseError("unknown LID parameter '" + key + "'", line);
        }
        try {
            m.lid.check();
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line);
        }
        m.initial_state = x0.value_or(0.0);  // undoped: r_off
    } else {
        throw ParseError("unknown memristor model '" + tok[3] + "'", line);
    }
    if (m.initial_state < m.state_min() || m.initial_state > m.state_max())
        throw ParseError("initial state outside the device state range", line);
    return m;
}

MosfetElement parse_mosfet(const std::vector<std::string>& tok, Circuit& c, int line) {
    if (tok.size() < 5)
        throw ParseError("mosfet card needs: Mx d g s (NMOS|PMOS) [key=value...]", line);
    MosfetElement m;
    m.drain = c.add_node(tok[1]);
    m.gate = c.add_node(tok[2]);
    m.source = c.add_node(tok[3]);
    std::string kind = upper(tok[4]);
    if (kind == "NMOS") m.params = default_nmos();
    else if (kind == "PMOS") m.params = default_pmos();
    else throw ParseError("unknown mosfet kind '" + tok[4] + "'", line);
    for (std::size_t i = 5; i < tok.size(); ++i) {
        auto [key, value] = split_kv(tok[i], line);
        double v = number(value, line);
        if (key == "vth") m.params.v_th = v;
        else if (key == "kp") m.params.k_prime = v;
        else if (key == "lambda") m.params.lambda = v;
        else if (key == "cgs") m.params.c_gs = v;
        else if (key == "cgd") m.params.c_gd = v;
        else throw ParseError("unknown mosfet parameter '" + key + "'", line);
    }
    try {
        m.params.check();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), line);
    }
    return m;
}

VsourceElement parse_vsource(const std::vector<std::string>& tok, Circuit& c, int line) {
    if (tok.size() < 4)
        throw ParseError("source card needs: Vx n+ n- (DC v|PULSE(...)|SIN(...))", line);
    VsourceElement v;
    v.n_plus = c.add_node(tok[1]);
    v.n_minus = c.add_node(tok[2]);
    std::string rest;
    for (std::size_t i = 3; i < tok.size(); ++i) {
        if (i > 3) rest += " ";
        rest += tok[i];
    }
    std::string head = upper(rest.substr(0, rest.find_first_of(" (")));
    if (head == "DC") {
        auto parts = split_ws(rest);
        if (parts.size() != 2) throw ParseError("DC source needs exactly one value", line);
        v.spec = SourceSpec::make_dc(number(parts[1], line));
    } else if (head == "PULSE") {
        auto args = paren_args(rest, line);
        if (args.size() != 7)
            throw ParseError("PULSE needs (v_low v_high delay rise fall width period)", line);
        v.spec = SourceSpec::make_pulse(args[0], args[1], args[2], args[3], args[4], args[5],
                                        args[6]);
    } else if (head == "SIN") {
        auto args = paren_args(rest, line);
        if (args.size() != 2) throw ParseError("SIN needs (amplitude frequency)", line);
        v.spec = SourceSpec::make_sine(args[0], args[1]);
    } else {
        throw ParseError("unknown source spec '" + rest + "'", line);
    }
    try {
        v.spec.check();
    } catch (const NetlistError& e) {
        throw ParseError(e.what(), line);
    }
    return v;
}

}  // namespace

Circuit parse_netlist(const std::string& text) {
    Circuit c;
    struct PendingPort {
        PortDir dir;
        std::string name;
        std::string node;
        int line;
    };
    struct PendingRail {
        std::string node;
        double volts;
        int line;
    };
    std::vector<PendingPort> ports;
    std::vector<PendingRail> rails;

    std::istringstream stream(text);
    std::string raw;
    int line = 0;
    while (std::getline(stream, raw)) {
        ++line;
        auto first = raw.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (raw[first] == '*') continue;
        if (raw.compare(first, 2, "//") == 0) continue;
        std::vector<std::string> tok = split_ws(raw);

        std::string head = upper(tok[0]);
        try {
            if (head == ".PORT") {
                if (tok.size() != 4) throw ParseError(".port needs: .port in|out NAME node", line);
                std::string dir = upper(tok[1]);
                if (dir != "IN" && dir != "OUT")
                    throw ParseError(".port direction must be in or out", line);
                ports.push_back({dir == "IN" ? PortDir::input : PortDir::output, tok[2], tok[3],
                                 line});
            } else if (head == ".VCC") {
                if (tok.size() != 3) throw ParseError(".vcc needs: .vcc node value", line);
                rails.push_back({tok[1], number(tok[2], line), line});
            } else if (head.rfind("MR", 0) == 0) {
                c.add(Element{tok[0], parse_memristor(tok, c, line)});
            } else if (head[0] == 'M') {
                c.add(Element{tok[0], parse_mosfet(tok, c, line)});
            } else if (head[0] == 'V') {
                c.add(Element{tok[0], parse_vsource(tok, c, line)});
            } else if (head[0] == 'R') {
                if (tok.size() != 4) throw ParseError("resistor card needs: Rx n+ n- value", line);
                double ohms = number(tok[3], line);
                if (ohms <= 0) throw ParseError("resistance must be positive", line);
                c.add(Element{tok[0], ResistorElement{ohms, c.add_node(tok[1]),
                                                      c.add_node(tok[2])}});
            } else {
                throw ParseError("unknown element card '" + tok[0] + "'", line);
            }
        } catch (const NetlistError& e) {
            throw ParseError(e.what(), line);
        }
    }

    if (c.elements().empty()) throw ParseError("empty netlist: no element cards", std::max(line, 1));

    for (const auto& r : rails) {
        NodeIndex n = c.find_node(r.node);
        if (n < 0) throw ParseError(".vcc references unknown node '" + r.node + "'", r.line);
        try {
            c.set_rail(n, r.volts);
        } catch (const NetlistError& e) {
            throw ParseError(e.what(), r.line);
        }
    }
    for (const auto& p : ports) {
        NodeIndex n = c.find_node(p.node);
        if (n < 0) throw ParseError(".port references unknown node '" + p.node + "'", p.line);
        try {
            c.set_port(p.name, n, p.dir);
        } catch (const NetlistError& e) {
            throw ParseError(e.what(), p.line);
        }
    }
    return c;
}

// ----------------------------------------------------------------------------
// Serializer
// ----------------------------------------------------------------------------

namespace {

void write_element(std::ostream& os, const Circuit& c, const Element& e) {
    const auto name = [&](NodeIndex n) -> const std::string& { return c.node_name(n); };
    if (auto* m = std::get_if<MemristorElement>(&e.body)) {
        os << e.name << ' ' << name(m->n_plus) << ' ' << name(m->n_minus);
        const char* pol = m->polarity == Polarity::forward ? "fwd" : "rev";
        if (m->model == MemristorElement::Model::team) {
            const TeamParams& p = m->team;
            os << " TEAM ron=" << format_double(p.r_on) << " roff=" << format_double(p.r_off)
               << " kon=" << format_double(p.k_on) << " koff=" << format_double(p.k_off)
               << " alphaon=" << format_double(p.alpha_on)
               << " alphaoff=" << format_double(p.alpha_off) << " ion=" << format_double(p.i_on)
               << " ioff=" << format_double(p.i_off) << " xon=" << format_double(p.x_on)
               << " xoff=" << format_double(p.x_off) << " wc=" << format_double(p.w_c)
               << " aon=" << format_double(p.a_on) << " aoff=" << format_double(p.a_off)
               << " polarity=" << pol << " x0=" << format_double(m->initial_state);
        } else {
            const LinearDriftParams& p = m->lid;
            os << " LID d=" << format_double(p.d) << " mu=" << format_double(p.mu_v)
               << " ron=" << format_double(p.r_on) << " roff=" << format_double(p.r_off)
               << " polarity=" << pol << " w0=" << format_double(m->initial_state);
        }
    } else if (auto* mf = std::get_if<MosfetElement>(&e.body)) {
        const MosfetParams& p = mf->params;
        os << e.name << ' ' << name(mf->drain) << ' ' << name(mf->gate) << ' '
           << name(mf->source) << ' '
           << (p.kind == MosfetParams::Kind::nmos ? "NMOS" : "PMOS")
           << " vth=" << format_double(p.v_th) << " kp=" << format_double(p.k_prime)
           << " lambda=" << format_double(p.lambda) << " cgs=" << format_double(p.c_gs)
           << " cgd=" << format_double(p.c_gd);
    } else if (auto* v = std::get_if<VsourceElement>(&e.body)) {
        os << e.name << ' ' << name(v->n_plus) << ' ' << name(v->n_minus) << ' ';
        const SourceSpec& s = v->spec;
        switch (s.kind) {
            case SourceSpec::Kind::dc:
                os << "DC " << format_double(s.dc);
                break;
            case SourceSpec::Kind::pulse:
                os << "PULSE(" << format_double(s.v_low) << ' ' << format_double(s.v_high) << ' '
                   << format_double(s.delay) << ' ' << format_double(s.rise) << ' '
                   << format_double(s.fall) << ' ' << format_double(s.width) << ' '
                   << format_double(s.period) << ')';
                break;
            case SourceSpec::Kind::sine:
                os << "SIN(" << format_double(s.amplitude) << ' ' << format_double(s.frequency)
                   << ')';
                break;
        }
    } else {
        const auto& r = std::get<ResistorElement>(e.body);
        os << e.name << ' ' << name(r.n_plus) << ' ' << name(r.n_minus) << ' '
           << format_double(r.ohms);
    }
    os << '\n';
}

}  // namespace

std::string serialize(const Circuit& c) {
    std::ostringstream os;
    if (c.rail()) {
        os << ".vcc " << c.node_name(c.rail()->node) << ' ' << format_double(c.rail()->volts)
           << '\n';
    }
    for (const Element& e : c.elements()) write_element(os, c, e);
    for (const Port& p : c.ports()) {
        os << ".port " << (p.dir == PortDir::input ? "in" : "out") << ' ' << p.name << ' '
           << c.node_name(p.node) << '\n';
    }
    return os.str();
}

// ----------------------------------------------------------------------------
// Validation
// ----------------------------------------------------------------------------

std::vector<Violation> validate(const Circuit& c) {
    std::vector<Violation> out;
    if (c.elements().empty()) {
        out.push_back({"circuit has no elements"});
        return out;
    }

    bool ground_used = false;
    bool has_drive = c.rail().has_value();
    for (const Element& e : c.elements()) {
        if (std::holds_alternative<VsourceElement>(e.body)) has_drive = true;
        for (NodeIndex n : e.terminals())
            if (n == ground_node) ground_used = true;
    }
    // port-only subcircuits may float; anything carrying its own drive needs
    // a ground reference
    if (has_drive && !ground_used) out.push_back({"no ground node"});

    // adjacency over element terminals
    std::vector<std::vector<NodeIndex>> adj(static_cast<std::size_t>(c.node_count()));
    for (const Element& e : c.elements()) {
        auto t = e.terminals();
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = i + 1; j < t.size(); ++j) {
                adj[static_cast<std::size_t>(t[i])].push_back(t[j]);
                adj[static_cast<std::size_t>(t[j])].push_back(t[i]);
            }
    }

    // driven seeds: source terminals, the rail, declared input ports
    std::vector<char> seen(static_cast<std::size_t>(c.node_count()), 0);
    std::vector<NodeIndex> queue;
    auto seed = [&](NodeIndex n) {
        if (!seen[static_cast<std::size_t>(n)]) {
            seen[static_cast<std::size_t>(n)] = 1;
            queue.push_back(n);
        }
    };
    for (const Element& e : c.elements()) {
        if (auto* v = std::get_if<VsourceElement>(&e.body)) {
            seed(v->n_plus);
            seed(v->n_minus);
        }
    }
    if (c.rail()) seed(c.rail()->node);
    for (const Port& p : c.ports())
        if (p.dir == PortDir::input) seed(p.node);
    while (!queue.empty()) {
        NodeIndex n = queue.back();
        queue.pop_back();
        for (NodeIndex next : adj[static_cast<std::size_t>(n)]) seed(next);
    }
    for (NodeIndex n = 1; n < c.node_count(); ++n) {
        if (!seen[static_cast<std::size_t>(n)])
            out.push_back({"undriven node '" + c.node_name(n) + "'"});
    }

    // ideal source conflicts
    std::vector<std::pair<std::pair<NodeIndex, NodeIndex>, const Element*>> sources;
    for (const Element& e : c.elements()) {
        if (auto* v = std::get_if<VsourceElement>(&e.body)) {
            if (v->n_plus == v->n_minus)
                out.push_back({"source '" + e.name + "' is short-circuited"});
            auto key = std::minmax(v->n_plus, v->n_minus);
            for (auto& [other_key, other] : sources) {
                if (other_key == std::pair<NodeIndex, NodeIndex>(key.first, key.second)) {
                    out.push_back({"parallel ideal sources '" + other->name + "' and '" + e.name +
                                   "'"});
                }
            }
            sources.push_back({{key.first, key.second}, &e});
        }
    }
    return out;
}

// ----------------------------------------------------------------------------
// Merge
// ----------------------------------------------------------------------------

namespace {

std::string mangle_name(const std::string& name, const std::string& prefix) {
    if (prefix.empty()) return name;
    std::size_t split = upper(name).rfind("MR", 0) == 0 ? 2 : 1;
    return name.substr(0, split) + prefix + "_" + name.substr(split);
}

void remap_element(Element& e, const std::vector<NodeIndex>& remap) {
    auto fix = [&](NodeIndex& n) { n = remap[static_cast<std::size_t>(n)]; };
    if (auto* m = std::get_if<MemristorElement>(&e.body)) {
        fix(m->n_plus);
        fix(m->n_minus);
    } else if (auto* m = std::get_if<MosfetElement>(&e.body)) {
        fix(m->drain);
        fix(m->gate);
        fix(m->source);
    } else if (auto* v = std::get_if<VsourceElement>(&e.body)) {
        fix(v->n_plus);
        fix(v->n_minus);
    } else {
        auto& r = std::get<ResistorElement>(e.body);
        fix(r.n_plus);
        fix(r.n_minus);
    }
}

}  // namespace

Circuit merge(const Circuit& into, const Circuit& sub, const std::string& prefix,
              const std::map<std::string, std::string>& binding) {
    for (const auto& [port, target] : binding) {
        if (!sub.find_port(port))
            throw NetlistError("merge: binding references unknown port '" + port + "'");
    }

    Circuit out = into;
    std::vector<NodeIndex> remap(static_cast<std::size_t>(sub.node_count()), -1);
    remap[ground_node] = ground_node;

    for (const Port& p : sub.ports()) {
        auto it = binding.find(p.name);
        if (it == binding.end())
            throw NetlistError("merge: port '" + p.name + "' is not bound");
        remap[static_cast<std::size_t>(p.node)] = out.add_node(it->second);
    }

    if (sub.rail()) {
        NodeIndex rn = sub.rail()->node;
        if (remap[static_cast<std::size_t>(rn)] < 0) {
            // rails unify by bare node name
            remap[static_cast<std::size_t>(rn)] = out.add_node(sub.node_name(rn));
        }
        NodeIndex mapped = remap[static_cast<std::size_t>(rn)];
        if (out.rail()) {
            if (out.rail()->node != mapped || out.rail()->volts != sub.rail()->volts)
                throw NetlistError("merge: supply rails disagree");
        } else {
            out.set_rail(mapped, sub.rail()->volts);
        }
    }

    for (NodeIndex n = 1; n < sub.node_count(); ++n) {
        if (remap[static_cast<std::size_t>(n)] < 0) {
            std::string name =
                prefix.empty() ? sub.node_name(n) : prefix + "." + sub.node_name(n);
            remap[static_cast<std::size_t>(n)] = out.add_node(name);
        }
    }

    for (const Element& e : sub.elements()) {
        Element copy = e;
        copy.name = mangle_name(e.name, prefix);
        remap_element(copy, remap);
        out.add(std::move(copy));
    }
    return out;
}

}  // namespace memos
