#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "memos/device_models.hpp"

namespace memos {

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int column_ = 1)
        : std::runtime_error("line " + std::to_string(line_) + ":" + std::to_string(column_) +
                             ": " + msg),
          line(line_),
          column(column_) {}
};

struct NetlistError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using NodeIndex = int;
inline constexpr NodeIndex ground_node = 0;

// ----------------------------------------------------------------------------

struct SourceSpec {
    enum class Kind { dc, pulse, sine };
    Kind kind = Kind::dc;
    double dc = 0.0;
    // pulse
    double v_low = 0.0;
    double v_high = 0.0;
    double delay = 0.0;
    double rise = 1e-12;   // s
    double fall = 1e-12;   // s
    double width = 1e-9;   // s, time spent at v_high
    double period = 2e-9;  // s
    // sine
    double amplitude = 0.0;
    double frequency = 0.0;  // Hz

    static SourceSpec make_dc(double v);
    static SourceSpec make_pulse(double v_low, double v_high, double delay, double rise,
                                 double fall, double width, double period);
    static SourceSpec make_sine(double amplitude, double frequency);

    double value(double t) const;
    void check() const;
    bool operator==(const SourceSpec&) const = default;
};

struct MemristorElement {
    enum class Model { team, lid };
    Model model = Model::team;
    TeamParams team{};
    LinearDriftParams lid{};
    Polarity polarity = Polarity::forward;
    double initial_state = 0.0;  // x for team, w for lid; defaults to the r_off end
    NodeIndex n_plus = 0;
    NodeIndex n_minus = 0;

    double resistance(double state) const;
    double orientation_sign() const;
    double state_min() const;
    double state_max() const;
    bool operator==(const MemristorElement&) const = default;
};

struct MosfetElement {
    MosfetParams params{};
    NodeIndex drain = 0;
    NodeIndex gate = 0;
    NodeIndex source = 0;  // body tied to source
    bool operator==(const MosfetElement&) const = default;
};

struct VsourceElement {
    SourceSpec spec{};
    NodeIndex n_plus = 0;
    NodeIndex n_minus = 0;
    bool operator==(const VsourceElement&) const = default;
};

struct ResistorElement {
    double ohms = 0.0;
    NodeIndex n_plus = 0;
    NodeIndex n_minus = 0;
    bool operator==(const ResistorElement&) const = default;
};

struct Element {
    std::string name;
    std::variant<MemristorElement, MosfetElement, VsourceElement, ResistorElement> body;

    std::vector<NodeIndex> terminals() const;
    bool operator==(const Element&) const = default;
};

enum class PortDir { input, output };

struct Port {
    std::string name;
    NodeIndex node = 0;
    PortDir dir = PortDir::input;
    bool operator==(const Port&) const = default;
};

struct Rail {
    NodeIndex node = 0;
    double volts = 0.0;
    bool operator==(const Rail&) const = default;
};

struct Violation {
    std::string what;
};

// ----------------------------------------------------------------------------

/// Immutable-after-construction element/node graph. Node 0 is always ground
/// ("0"; "gnd" and "GND" are aliases).
class Circuit {
public:
    Circuit();

    NodeIndex add_node(const std::string& name);
    NodeIndex find_node(const std::string& name) const;  // -1 when absent
    const std::string& node_name(NodeIndex n) const;
    int node_count() const { return static_cast<int>(node_names_.size()); }

    void add(Element e);
    const std::vector<Element>& elements() const { return elements_; }
    const Element* find_element(const std::string& name) const;
    Element* find_element(const std::string& name);

    void set_port(const std::string& name, NodeIndex node, PortDir dir);
    const std::vector<Port>& ports() const { return ports_; }
    const Port* find_port(const std::string& name) const;

    void set_rail(NodeIndex node, double volts);
    const std::optional<Rail>& rail() const { return rail_; }

    bool operator==(const Circuit& other) const;

private:
    std::vector<std::string> node_names_;
    std::map<std::string, NodeIndex> node_index_;
    std::vector<Element> elements_;
    std::map<std::string, std::size_t> element_index_;
    std::vector<Port> ports_;
    std::optional<Rail> rail_;
};

/// Parses the SPICE-flavoured card format documented in the README. Throws
/// ParseError with line/column on malformed input; an input with no element
/// cards is an error.
Circuit parse_netlist(const std::string& text);

/// Canonical text form; parse(serialize(c)) == c.
std::string serialize(const Circuit& c);

/// Structural checks: ground present, no undriven nodes, no conflicting
/// parallel ideal sources. Empty report means simulatable.
std::vector<Violation> validate(const Circuit& c);

/// Copies `sub` into `into`. Sub ports are attached per `binding` (port name
/// -> node name in the result, created when absent); remaining sub nodes are
/// added under "<prefix>." names; element names gain the prefix after their
/// type letters. Rails unify by name and must agree in value.
Circuit merge(const Circuit& into, const Circuit& sub, const std::string& prefix,
              const std::map<std::string, std::string>& binding);

/// Number formatting used by serialize (shortest exact form).
std::string format_double(double v);

/// Parses a number with optional k/m/u/n/p suffix. Throws std::invalid_argument.
double parse_value(const std::string& token);

}  // namespace memos
