#include "memos/stdcells.hpp"

#include <cctype>
#include <set>
#include <stdexcept>

namespace memos {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// --------------------------------------------------------------------------
// primitives
// --------------------------------------------------------------------------

Circuit inverter_prim(const CellOptions& o) {
    Circuit c;
    NodeIndex a = c.add_node("a");
    NodeIndex y = c.add_node("y");
    NodeIndex vdd = c.add_node("vdd");
    c.set_rail(vdd, o.vcc);
    c.add(Element{"M1", MosfetElement{o.pmos, y, a, vdd}});
    c.add(Element{"M2", MosfetElement{o.nmos, y, a, ground_node}});
    c.set_port("A", a, PortDir::input);
    c.set_port("Y", y, PortDir::output);
    return c;
}

// Level-restoring buffer: the first stage is skewed low so the degraded
// highs of cascaded dividers still read as logic one.
Circuit buffer_prim(const CellOptions& o) {
    Circuit c;
    NodeIndex a = c.add_node("a");
    NodeIndex m = c.add_node("m");
    NodeIndex vdd = c.add_node("vdd");
    c.set_rail(vdd, o.vcc);
    c.add(Element{"M1", MosfetElement{o.buf_pmos, m, a, vdd}});
    c.add(Element{"M2", MosfetElement{o.buf_nmos, m, a, ground_node}});
    c = merge(c, inverter_prim(o), "i2", {{"A", "m"}, {"Y", "y"}});
    c.set_port("A", a, PortDir::input);
    c.set_port("Y", c.find_node("y"), PortDir::output);
    return c;
}

// memristor voltage divider: forward polarity computes AND, reverse OR
Circuit divider_prim(Polarity pol, int fanin, const CellOptions& o) {
    if (fanin < 2) throw std::invalid_argument("divider fanin must be at least 2");
    Circuit c;
    NodeIndex y = c.add_node("y");
    for (int k = 0; k < fanin; ++k) {
        std::string port = fanin == 2 ? (k == 0 ? "A" : "B") : "IN" + std::to_string(k);
        NodeIndex in = c.add_node(lower(port));
        MemristorElement m;
        m.model = MemristorElement::Model::team;
        m.team = o.team;
        m.polarity = pol;
        m.initial_state = o.team.x_off;
        m.n_plus = in;
        m.n_minus = y;
        c.add(Element{"MR" + std::to_string(k), m});
        c.set_port(port, in, PortDir::input);
    }
    c.set_port("Y", y, PortDir::output);
    return c;
}

Circuit memos_and(const CellOptions& o) { return divider_prim(Polarity::forward, o.fanin, o); }
Circuit memos_or(const CellOptions& o) { return divider_prim(Polarity::reverse, o.fanin, o); }

Circuit two_input(const CellOptions& o, Polarity pol) {
    CellOptions two = o;
    two.fanin = 2;
    return divider_prim(pol, 2, two);
}

Circuit memos_nand(const CellOptions& o, Polarity pol) {
    Circuit c;
    c.add_node("a");
    c.add_node("b");
    c = merge(c, two_input(o, pol), "d", {{"A", "a"}, {"B", "b"}, {"Y", "w"}});
    c = merge(c, inverter_prim(o), "i", {{"A", "w"}, {"Y", "y"}});
    c.set_port("A", c.find_node("a"), PortDir::input);
    c.set_port("B", c.find_node("b"), PortDir::input);
    c.set_port("Y", c.find_node("y"), PortDir::output);
    return c;
}

// Sum-of-products with input inverters: Y = (A and not B) or (not A and B).
// MR0/MR1 and MR4/MR5 are the two AND dividers, MR2/MR3 the output OR.
// XNOR uses the even-parity minterms instead.
Circuit memos_parity(const CellOptions& o, bool odd, bool with_buffer) {
    Circuit c;
    c.add_node("a");
    c.add_node("b");
    c = merge(c, inverter_prim(o), "ia", {{"A", "a"}, {"Y", "a_n"}});
    c = merge(c, inverter_prim(o), "ib", {{"A", "b"}, {"Y", "b_n"}});
    const char* and1_b = odd ? "b_n" : "b";
    const char* and2_b = odd ? "b" : "b_n";
    c = merge(c, two_input(o, Polarity::forward), "a1", {{"A", "a"}, {"B", and1_b}, {"Y", "t1"}});
    c = merge(c, two_input(o, Polarity::forward), "a2",
              {{"A", "a_n"}, {"B", and2_b}, {"Y", "t2"}});
    const char* out = with_buffer ? "y_raw" : "y";
    c = merge(c, two_input(o, Polarity::reverse), "o1", {{"A", "t1"}, {"B", "t2"}, {"Y", out}});
    if (with_buffer) c = merge(c, buffer_prim(o), "lb", {{"A", "y_raw"}, {"Y", "y"}});
    c.set_port("A", c.find_node("a"), PortDir::input);
    c.set_port("B", c.find_node("b"), PortDir::input);
    c.set_port("Y", c.find_node("y"), PortDir::output);
    return c;
}

// XOR for SUM plus an AND divider for Cout. The standalone half adder cell
// buffers its SUM; the full adder instead composes two bufless cores and
// restores both of its outputs, which also keeps the carry chain stiff.
Circuit memos_half_adder(const CellOptions& o, bool buffered_sum) {
    Circuit c;
    c.add_node("a");
    c.add_node("b");
    c = merge(c, memos_parity(o, true, buffered_sum), "x", {{"A", "a"}, {"B", "b"}, {"Y", "sum"}});
    c = merge(c, two_input(o, Polarity::forward), "ca", {{"A", "a"}, {"B", "b"}, {"Y", "cout"}});
    c.set_port("A", c.find_node("a"), PortDir::input);
    c.set_port("B", c.find_node("b"), PortDir::input);
    c.set_port("SUM", c.find_node("sum"), PortDir::output);
    c.set_port("Cout", c.find_node("cout"), PortDir::output);
    return c;
}

Circuit memos_full_adder(const CellOptions& o) {
    Circuit c;
    c.add_node("a");
    c.add_node("b");
    c.add_node("cin");
    Circuit core = memos_half_adder(o, false);
    c = merge(c, core, "ha1", {{"A", "a"}, {"B", "b"}, {"SUM", "s1"}, {"Cout", "c1"}});
    c = merge(c, core, "ha2", {{"A", "s1"}, {"B", "cin"}, {"SUM", "s2"}, {"Cout", "c2"}});
    c = merge(c, two_input(o, Polarity::reverse), "orc", {{"A", "c1"}, {"B", "c2"}, {"Y", "cr"}});
    c = merge(c, buffer_prim(o), "sb", {{"A", "s2"}, {"Y", "sum"}});
    c = merge(c, buffer_prim(o), "cb", {{"A", "cr"}, {"Y", "cout"}});
    c.set_port("A", c.find_node("a"), PortDir::input);
    c.set_port("B", c.find_node("b"), PortDir::input);
    c.set_port("Cin", c.find_node("cin"), PortDir::input);
    c.set_port("SUM", c.find_node("sum"), PortDir::output);
    c.set_port("Cout", c.find_node("cout"), PortDir::output);
    return c;
}

// --------------------------------------------------------------------------
// cmos primitives
// --------------------------------------------------------------------------

Circuit cmos_nand2(const CellOptions& o) {
    Circuit c;
    NodeIndex a = c.add_node("a"), b = c.add_node("b"), y = c.add_node("y");
    NodeIndex mid = c.add_node("m"), vdd = c.add_node("vdd");
    c.set_rail(vdd, o.vcc);
    c.add(Element{"M1", MosfetElement{o.pmos, y, a, vdd}});
    c.add(Element{"M2", MosfetElement{o.pmos, y, b, vdd}});
    c.add(Element{"M3", MosfetElement{o.nmos, y, a, mid}});
    c.add(Element{"M4", MosfetElement{o.nmos, mid, b, ground_node}});
    c.set_port("A", a, PortDir::input);
    c.set_port("B", b, PortDir::input);
    c.set_port("Y", y, PortDir::output);
    return c;
}

Circuit cmos_nor2(const CellOptions& o) {
    Circuit c;
    NodeIndex a = c.add_node("a"), b = c.add_node("b"), y = c.add_node("y");
    NodeIndex mid = c.add_node("m"), vdd = c.add_node("vdd");
    c.set_rail(vdd, o.vcc);
    c.add(Element{"M1", MosfetElement{o.pmos, mid, a, vdd}});
    c.add(Element{"M2", MosfetElement{o.pmos, y, b, mid}});
    c.add(Element{"M3", MosfetElement{o.nmos, y, a, ground_node}});
    c.add(Element{"M4", MosfetElement{o.nmos, y, b, ground_node}});
    c.set_port("A", a, PortDir::input);
    c.set_port("B", b, PortDir::input);
    c.set_port("Y", y, PortDir::output);
    return c;
}

Circuit cmos_and2(const CellOptions& o) {
    Circuit c;
    c.add_node("a");
    c.add_node("b");
    c = merge(c, cmos_nand2(o), "n", {{"A", "a"}, {"B", "b"}, {"Y", "w"}});
    c = merge(c, inverter_prim(o), "i", {{"A", "w"}, {"Y", "y"}});
    c.set_port("A", c.find_node("a"), PortDir::input);
    c.set_port("B", c.find_node("b"), PortDir::input);
    c.set_port("Y", c.find_node("y"), PortDir::output);
    return c;
}

Circuit cmos_or2(const CellOptions& o) {
    Circuit c;
    c.add_node("a");
    c.add_node("b");
    c = merge(c, cmos_nor2(o), "n", {{"A", "a"}, {"B", "b"}, {"Y", "w"}});
    c = merge(c, inverter_prim(o), "i", {{"A", "w"}, {"Y", "y"}});
    c.set_port("A", c.find_node("a"), PortDir::input);
    c.set_port("B", c.find_node("b"), PortDir::input);
    c.set_port("Y", c.find_node("y"), PortDir::output);
    return c;
}

// Y = not(A*B + C*D)
Circuit cmos_aoi22(const CellOptions& o) {
    Circuit c;
    NodeIndex a = c.add_node("a"), b = c.add_node("b");
    NodeIndex d = c.add_node("c"), e = c.add_node("d");
    NodeIndex y = c.add_node("y");
    NodeIndex m1 = c.add_node("m1"), m2 = c.add_node("m2"), m3 = c.add_node("m3");
    NodeIndex vdd = c.add_node("vdd");
    c.set_rail(vdd, o.vcc);
    c.add(Element{"M1", MosfetElement{o.nmos, y, a, m1}});
    c.add(Element{"M2", MosfetElement{o.nmos, m1, b, ground_node}});
    c.add(Element{"M3", MosfetElement{o.nmos, y, d, m2}});
    c.add(Element{"M4", MosfetElement{o.nmos, m2, e, ground_node}});
    c.add(Element{"M5", MosfetElement{o.pmos, m3, a, vdd}});
    c.add(Element{"M6", MosfetElement{o.pmos, m3, b, vdd}});
    c.add(Element{"M7", MosfetElement{o.pmos, y, d, m3}});
    c.add(Element{"M8", MosfetElement{o.pmos, y, e, m3}});
    c.set_port("A", a, PortDir::input);
    c.set_port("B", b, PortDir::input);
    c.set_port("C", d, PortDir::input);
    c.set_port("D", e, PortDir::input);
    c.set_port("Y", y, PortDir::output);
    return c;
}

// Y = not((A+B)*C)
Circuit cmos_oai21(const CellOptions& o) {
    Circuit c;
    NodeIndex a = c.add_node("a"), b = c.add_node("b"), g = c.add_node("c");
    NodeIndex y = c.add_node("y");
    NodeIndex mn = c.add_node("mn"), mp = c.add_node("mp");
    NodeIndex vdd = c.add_node("vdd");
    c.set_rail(vdd, o.vcc);
    c.add(Element{"M1", MosfetElement{o.nmos, y, a, mn}});
    c.add(Element{"M2", MosfetElement{o.nmos, y, b, mn}});
    c.add(Element{"M3", MosfetElement{o.nmos, mn, g, ground_node}});
    c.add(Element{"M4", MosfetElement{o.pmos, mp, a, vdd}});
    c.add(Element{"M5", MosfetElement{o.pmos, y, b, mp}});
    c.add(Element{"M6", MosfetElement{o.pmos, y, g, vdd}});
    c.set_port("A", a, PortDir::input);
    c.set_port("B", b, PortDir::input);
    c.set_port("C", g, PortDir::input);
    c.set_port("Y", y, PortDir::output);
    return c;
}

Circuit cmos_parity(const CellOptions& o, bool odd) {
    Circuit c;
    c.add_node("a");
    c.add_node("b");
    c = merge(c, inverter_prim(o), "ia", {{"A", "a"}, {"Y", "a_n"}});
    c = merge(c, inverter_prim(o), "ib", {{"A", "b"}, {"Y", "b_n"}});
    // xor = not(A*B + An*Bn), xnor = not(A*Bn + An*B)
    std::map<std::string, std::string> binding =
        odd ? std::map<std::string, std::string>{{"A", "a"}, {"B", "b"}, {"C", "a_n"},
                                                 {"D", "b_n"}, {"Y", "y"}}
            : std::map<std::string, std::string>{{"A", "a"}, {"B", "b_n"}, {"C", "a_n"},
                                                 {"D", "b"}, {"Y", "y"}};
    c = merge(c, cmos_aoi22(o), "g", binding);
    c.set_port("A", c.find_node("a"), PortDir::input);
    c.set_port("B", c.find_node("b"), PortDir::input);
    c.set_port("Y", c.find_node("y"), PortDir::output);
    return c;
}

Circuit cmos_half_adder(const CellOptions& o) {
    Circuit c;
    c.add_node("a");
    c.add_node("b");
    c = merge(c, cmos_nand2(o), "nd", {{"A", "a"}, {"B", "b"}, {"Y", "n1"}});
    c = merge(c, inverter_prim(o), "ci", {{"A", "n1"}, {"Y", "cout"}});
    c = merge(c, cmos_oai21(o), "oa", {{"A", "a"}, {"B", "b"}, {"C", "n1"}, {"Y", "sr"}});
    c = merge(c, inverter_prim(o), "si", {{"A", "sr"}, {"Y", "sum"}});
    c.set_port("A", c.find_node("a"), PortDir::input);
    c.set_port("B", c.find_node("b"), PortDir::input);
    c.set_port("SUM", c.find_node("sum"), PortDir::output);
    c.set_port("Cout", c.find_node("cout"), PortDir::output);
    return c;
}

Circuit half_adder_cell(const CellOptions& o) {
    return o.family == CellFamily::memos ? memos_half_adder(o, true) : cmos_half_adder(o);
}

Circuit cmos_full_adder(const CellOptions& o) {
    Circuit c;
    c.add_node("a");
    c.add_node("b");
    c.add_node("cin");
    c = merge(c, cmos_half_adder(o), "ha1",
              {{"A", "a"}, {"B", "b"}, {"SUM", "s1"}, {"Cout", "c1"}});
    c = merge(c, cmos_half_adder(o), "ha2",
              {{"A", "s1"}, {"B", "cin"}, {"SUM", "sum"}, {"Cout", "c2"}});
    c = merge(c, cmos_nor2(o), "orc", {{"A", "c1"}, {"B", "c2"}, {"Y", "nc"}});
    c = merge(c, inverter_prim(o), "oi", {{"A", "nc"}, {"Y", "cout"}});
    c.set_port("A", c.find_node("a"), PortDir::input);
    c.set_port("B", c.find_node("b"), PortDir::input);
    c.set_port("Cin", c.find_node("cin"), PortDir::input);
    c.set_port("SUM", c.find_node("sum"), PortDir::output);
    c.set_port("Cout", c.find_node("cout"), PortDir::output);
    return c;
}

Circuit full_adder_cell(const CellOptions& o) {
    return o.family == CellFamily::memos ? memos_full_adder(o) : cmos_full_adder(o);
}

Circuit ripple_adder_cell(const CellOptions& o) {
    if (o.bits < 1) throw std::invalid_argument("ripple adder needs at least one bit");
    Circuit c;
    for (int k = 0; k < o.bits; ++k) {
        c.add_node("a" + std::to_string(k));
        c.add_node("b" + std::to_string(k));
    }
    c.add_node("cin");
    Circuit fa = full_adder_cell(o);
    std::string carry = "cin";
    for (int k = 0; k < o.bits; ++k) {
        std::string ks = std::to_string(k);
        std::string next = k + 1 == o.bits ? "cout" : "c" + ks;
        c = merge(c, fa, "fa" + ks,
                  {{"A", "a" + ks}, {"B", "b" + ks}, {"Cin", carry}, {"SUM", "sum" + ks},
                   {"Cout", next}});
        carry = next;
    }
    for (int k = 0; k < o.bits; ++k) {
        std::string ks = std::to_string(k);
        c.set_port("A" + ks, c.find_node("a" + ks), PortDir::input);
        c.set_port("B" + ks, c.find_node("b" + ks), PortDir::input);
    }
    c.set_port("Cin", c.find_node("cin"), PortDir::input);
    for (int k = 0; k < o.bits; ++k)
        c.set_port("SUM" + std::to_string(k), c.find_node("sum" + std::to_string(k)),
                   PortDir::output);
    c.set_port("Cout", c.find_node("cout"), PortDir::output);
    return c;
}

}  // namespace

Circuit build_cell(CellKind kind, const CellOptions& opt) {
    bool memos_family = opt.family == CellFamily::memos;
    switch (kind) {
        case CellKind::inverter:
            return inverter_prim(opt);
        case CellKind::buffer_cell:
            return buffer_prim(opt);
        case CellKind::and_gate:
            return memos_family ? memos_and(opt) : cmos_and2(opt);
        case CellKind::or_gate:
            return memos_family ? memos_or(opt) : cmos_or2(opt);
        case CellKind::nand_gate:
            return memos_family ? memos_nand(opt, Polarity::forward) : cmos_nand2(opt);
        case CellKind::nor_gate:
            return memos_family ? memos_nand(opt, Polarity::reverse) : cmos_nor2(opt);
        case CellKind::xor_gate:
            return memos_family ? memos_parity(opt, true, opt.level_restore)
                                : cmos_parity(opt, true);
        case CellKind::xnor_gate:
            return memos_family ? memos_parity(opt, false, opt.level_restore)
                                : cmos_parity(opt, false);
        case CellKind::half_adder:
            return half_adder_cell(opt);
        case CellKind::full_adder:
            return full_adder_cell(opt);
        case CellKind::ripple_adder:
            return ripple_adder_cell(opt);
    }
    throw std::invalid_argument("unknown cell kind");
}

DeviceCount count_devices(const Circuit& c) {
    DeviceCount out;
    std::vector<char> has_mr(static_cast<std::size_t>(c.node_count()), 0);
    std::vector<char> has_mos(static_cast<std::size_t>(c.node_count()), 0);
    for (const Element& e : c.elements()) {
        if (auto* m = std::get_if<MemristorElement>(&e.body)) {
            ++out.memristors;
            has_mr[static_cast<std::size_t>(m->n_plus)] = 1;
            has_mr[static_cast<std::size_t>(m->n_minus)] = 1;
        } else if (auto* mf = std::get_if<MosfetElement>(&e.body)) {
            ++out.mosfets;
            has_mos[static_cast<std::size_t>(mf->drain)] = 1;
            has_mos[static_cast<std::size_t>(mf->gate)] = 1;
            has_mos[static_cast<std::size_t>(mf->source)] = 1;
        }
    }
    for (int n = 0; n < c.node_count(); ++n)
        if (has_mr[static_cast<std::size_t>(n)] && has_mos[static_cast<std::size_t>(n)])
            ++out.vias;
    return out;
}

double area_ratio(const DeviceCount& hybrid, const DeviceCount& cmos_ref,
                  const AreaModel& model) {
    double ref = cmos_ref.mosfets * model.mosfet_area + cmos_ref.memristors * model.memristor_area;
    if (ref <= 0.0) throw std::invalid_argument("reference cell has zero area");
    double ours = hybrid.mosfets * model.mosfet_area + hybrid.memristors * model.memristor_area;
    return 100.0 * ours / ref;
}

std::string cell_name(CellKind kind, int bits) {
    switch (kind) {
        case CellKind::inverter: return "NOT";
        case CellKind::and_gate: return "AND";
        case CellKind::or_gate: return "OR";
        case CellKind::nand_gate: return "NAND";
        case CellKind::nor_gate: return "NOR";
        case CellKind::xor_gate: return "XOR";
        case CellKind::xnor_gate: return "XNOR";
        case CellKind::buffer_cell: return "BUF";
        case CellKind::half_adder: return "HALF_ADDER";
        case CellKind::full_adder: return "FULL_ADDER";
        case CellKind::ripple_adder: return "RIPPLE_ADDER_" + std::to_string(bits);
    }
    return "?";
}

CellKind parse_cell_kind(const std::string& name, int* bits) {
    std::string u;
    for (char ch : name)
        if (ch != '-' && ch != ' ') u += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (bits) *bits = 8;
    if (u == "NOT" || u == "INV" || u == "INVERTER") return CellKind::inverter;
    if (u == "AND") return CellKind::and_gate;
    if (u == "OR") return CellKind::or_gate;
    if (u == "NAND") return CellKind::nand_gate;
    if (u == "NOR") return CellKind::nor_gate;
    if (u == "XOR") return CellKind::xor_gate;
    if (u == "XNOR") return CellKind::xnor_gate;
    if (u == "BUF" || u == "BUFFER") return CellKind::buffer_cell;
    if (u == "HALF_ADDER" || u == "HA") return CellKind::half_adder;
    if (u == "FULL_ADDER" || u == "FA") return CellKind::full_adder;
    if (u == "8BIT" || u == "8BITFA") return CellKind::ripple_adder;
    if (u.rfind("RIPPLE", 0) == 0) {
        std::string tail = u.substr(6);
        if (tail.rfind("_ADDER", 0) == 0) tail = tail.substr(6);
        if (!tail.empty() && tail[0] == '_') tail = tail.substr(1);
        if (!tail.empty()) {
            int b = 0;
            for (char ch : tail) {
                if (!std::isdigit(static_cast<unsigned char>(ch)))
                    throw std::invalid_argument("unknown cell '" + name + "'");
                b = b * 10 + (ch - '0');
            }
            if (b < 1) throw std::invalid_argument("ripple adder width must be positive");
            if (bits) *bits = b;
        }
        return CellKind::ripple_adder;
    }
    throw std::invalid_argument("unknown cell '" + name + "'");
}

const std::vector<CellKind>& library_cells() {
    static const std::vector<CellKind> cells = {
        CellKind::inverter,  CellKind::and_gate,   CellKind::or_gate,  CellKind::nand_gate,
        CellKind::nor_gate,  CellKind::xor_gate,   CellKind::xnor_gate,
        CellKind::half_adder, CellKind::full_adder, CellKind::ripple_adder};
    return cells;
}

}  // namespace memos
