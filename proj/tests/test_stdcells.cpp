#include <doctest.h>

#include "memos/stdcells.hpp"

using namespace memos;

namespace {

DeviceCount counts(CellKind kind, CellFamily family, bool level_restore = false, int bits = 8) {
    CellOptions o;
    o.family = family;
    o.level_restore = level_restore;
    o.bits = bits;
    return count_devices(build_cell(kind, o));
}

}  // namespace

TEST_CASE("empty circuit counts nothing") {
    Circuit c;
    CHECK(count_devices(c) == DeviceCount{0, 0, 0});
}

TEST_CASE("hybrid gate device counts match the gate table") {
    CHECK(counts(CellKind::inverter, CellFamily::memos).mosfets == 2);
    CHECK(counts(CellKind::inverter, CellFamily::memos).memristors == 0);
    CHECK(counts(CellKind::and_gate, CellFamily::memos) == DeviceCount{0, 2, 0});
    CHECK(counts(CellKind::or_gate, CellFamily::memos) == DeviceCount{0, 2, 0});
    CHECK(counts(CellKind::nand_gate, CellFamily::memos).mosfets == 2);
    CHECK(counts(CellKind::nand_gate, CellFamily::memos).memristors == 2);
    CHECK(counts(CellKind::nor_gate, CellFamily::memos).mosfets == 2);
    CHECK(counts(CellKind::nor_gate, CellFamily::memos).memristors == 2);
    CHECK(counts(CellKind::xor_gate, CellFamily::memos).mosfets == 4);
    CHECK(counts(CellKind::xor_gate, CellFamily::memos).memristors == 6);
    CHECK(counts(CellKind::xnor_gate, CellFamily::memos).mosfets == 4);
    CHECK(counts(CellKind::xnor_gate, CellFamily::memos).memristors == 6);
    CHECK(counts(CellKind::buffer_cell, CellFamily::memos) == DeviceCount{4, 0, 0});
}

TEST_CASE("cmos gate device counts match the gate table") {
    CHECK(counts(CellKind::inverter, CellFamily::cmos).mosfets == 2);
    CHECK(counts(CellKind::and_gate, CellFamily::cmos).mosfets == 6);
    CHECK(counts(CellKind::or_gate, CellFamily::cmos).mosfets == 6);
    CHECK(counts(CellKind::nand_gate, CellFamily::cmos).mosfets == 4);
    CHECK(counts(CellKind::nor_gate, CellFamily::cmos).mosfets == 4);
    CHECK(counts(CellKind::xor_gate, CellFamily::cmos).mosfets == 12);
    CHECK(counts(CellKind::xnor_gate, CellFamily::cmos).mosfets == 12);
    CHECK(counts(CellKind::buffer_cell, CellFamily::cmos).mosfets == 4);
    for (CellKind kind : {CellKind::and_gate, CellKind::xor_gate, CellKind::half_adder}) {
        CHECK(counts(kind, CellFamily::cmos).memristors == 0);
        CHECK(counts(kind, CellFamily::cmos).vias == 0);
    }
}

TEST_CASE("adder device counts match the adder table") {
    CHECK(counts(CellKind::half_adder, CellFamily::memos) == DeviceCount{8, 8, 5});
    CHECK(counts(CellKind::full_adder, CellFamily::memos) == DeviceCount{16, 18, 10});
    CHECK(counts(CellKind::ripple_adder, CellFamily::memos) == DeviceCount{128, 144, 80});
    CHECK(counts(CellKind::half_adder, CellFamily::cmos).mosfets == 14);
    CHECK(counts(CellKind::full_adder, CellFamily::cmos).mosfets == 34);
    CHECK(counts(CellKind::ripple_adder, CellFamily::cmos).mosfets == 272);
}

TEST_CASE("level restoration adds one buffer") {
    DeviceCount bare = counts(CellKind::xor_gate, CellFamily::memos);
    DeviceCount restored = counts(CellKind::xor_gate, CellFamily::memos, true);
    CHECK(restored.mosfets == bare.mosfets + 4);
    CHECK(restored.memristors == bare.memristors);
}

TEST_CASE("single-bit ripple adder equals the full adder counts") {
    CHECK(counts(CellKind::ripple_adder, CellFamily::memos, false, 1) ==
          counts(CellKind::full_adder, CellFamily::memos));
}

TEST_CASE("every built cell passes validation") {
    for (CellFamily family : {CellFamily::memos, CellFamily::cmos}) {
        for (CellKind kind : library_cells()) {
            CellOptions o;
            o.family = family;
            o.bits = 4;
            Circuit c = build_cell(kind, o);
            auto report = validate(c);
            CAPTURE(cell_name(kind));
            CHECK(report.empty());
            bool has_output = c.find_port("Y") != nullptr || c.find_port("SUM") != nullptr ||
                              c.find_port("SUM0") != nullptr;
            CHECK(has_output);
        }
        CellOptions o;
        o.family = family;
        o.level_restore = true;
        CHECK(validate(build_cell(CellKind::xor_gate, o)).empty());
        CHECK(validate(build_cell(CellKind::buffer_cell, o)).empty());
    }
}

TEST_CASE("wide and/or dividers follow the fanin option") {
    CellOptions o;
    o.fanin = 4;
    Circuit c = build_cell(CellKind::and_gate, o);
    CHECK(count_devices(c).memristors == 4);
    CHECK(c.find_port("IN0") != nullptr);
    CHECK(c.find_port("IN3") != nullptr);
}

TEST_CASE("area ratios reproduce the comparison table") {
    DeviceCount fa_memos{16, 18, 10}, fa_cmos{34, 0, 0};
    DeviceCount ha_memos{8, 8, 5}, ha_cmos{14, 0, 0};
    CHECK(area_ratio(fa_memos, fa_cmos) == doctest::Approx(47.0588).epsilon(1e-4));
    CHECK(area_ratio(ha_memos, ha_cmos) == doctest::Approx(57.1429).epsilon(1e-4));
    CHECK(area_ratio(fa_cmos, fa_cmos) == doctest::Approx(100.0));
    CHECK_THROWS_AS((void)area_ratio(fa_memos, DeviceCount{0, 0, 0}), std::invalid_argument);
}

TEST_CASE("cell names parse back to kinds") {
    int bits = 0;
    CHECK(parse_cell_kind("NOT") == CellKind::inverter);
    CHECK(parse_cell_kind("nand") == CellKind::nand_gate);
    CHECK(parse_cell_kind("Xor") == CellKind::xor_gate);
    CHECK(parse_cell_kind("HALF_ADDER") == CellKind::half_adder);
    CHECK(parse_cell_kind("ripple8", &bits) == CellKind::ripple_adder);
    CHECK(bits == 8);
    CHECK(parse_cell_kind("RIPPLE_ADDER_4", &bits) == CellKind::ripple_adder);
    CHECK(bits == 4);
    CHECK_THROWS_AS((void)parse_cell_kind("FMA"), std::invalid_argument);
    CHECK(cell_name(CellKind::ripple_adder, 8) == "RIPPLE_ADDER_8");
    CHECK(cell_name(CellKind::xnor_gate) == "XNOR");
}

TEST_CASE("ripple adder exposes indexed ports") {
    CellOptions o;
    o.bits = 3;
    Circuit c = build_cell(CellKind::ripple_adder, o);
    for (const char* p : {"A0", "A1", "A2", "B0", "B1", "B2", "SUM0", "SUM1", "SUM2"})
        CHECK(c.find_port(p) != nullptr);
    CHECK(c.find_port("Cin") != nullptr);
    CHECK(c.find_port("Cout") != nullptr);
    CHECK(c.find_port("A3") == nullptr);
    CellOptions bad;
    bad.bits = 0;
    CHECK_THROWS_AS((void)build_cell(CellKind::ripple_adder, bad), std::invalid_argument);
}

TEST_CASE("memos cells are built from the logic-speed device set by default") {
    Circuit c = build_cell(CellKind::and_gate, {});
    const auto& mr = std::get<MemristorElement>(c.elements().front().body);
    CHECK(mr.team.k_off == logic_team_params().k_off);
    CHECK(mr.team.r_on == 100.0);
    CHECK(mr.team.r_off == 100e3);
    CHECK(mr.initial_state == mr.team.x_off);
    CHECK(mr.polarity == Polarity::forward);
    Circuit o = build_cell(CellKind::or_gate, {});
    CHECK(std::get<MemristorElement>(o.elements().front().body).polarity == Polarity::reverse);
}
