#pragma once

#include <string>

#include "memos/netlist.hpp"

namespace memos {

enum class CellKind {
    inverter,     // NOT
    and_gate,
    or_gate,
    nand_gate,
    nor_gate,
    xor_gate,
    xnor_gate,
    buffer_cell,  // BUF, two cascaded inverters
    half_adder,
    full_adder,
    ripple_adder
};

enum class CellFamily { memos, cmos };

struct CellOptions {
    CellFamily family = CellFamily::memos;
    int bits = 8;    // ripple adder width
    int fanin = 2;   // AND/OR input count
    bool level_restore = false;  // append a BUF to XOR/XNOR outputs
    TeamParams team = logic_team_params();
    MosfetParams nmos = default_nmos();
    MosfetParams pmos = default_pmos();
    // restoration buffers use a skewed first-stage trip so degraded divider
    // levels resolve; see buffer_trip_* defaults
    MosfetParams buf_nmos = restore_nmos();
    MosfetParams buf_pmos = restore_pmos();
    double vcc = default_vcc;
};

/// Builds the requested cell as a Circuit with named ports: gates expose
/// A[,B],Y; adders expose A,B[,Cin],SUM,Cout; the n-bit adder exposes
/// A0..,B0..,Cin,SUM0..,Cout.
Circuit build_cell(CellKind kind, const CellOptions& opt = {});

struct DeviceCount {
    int mosfets = 0;
    int memristors = 0;
    int vias = 0;  // nodes shared by a memristor terminal and a mosfet terminal
    bool operator==(const DeviceCount&) const = default;
};

DeviceCount count_devices(const Circuit& c);

struct AreaModel {
    double mosfet_area = 1.0;     // normalised footprint per transistor
    double memristor_area = 0.0;  // top-layer devices take no substrate area
};

/// CMOS-layer area of the hybrid cell as a percentage of the pure-CMOS cell.
/// Throws std::invalid_argument when the reference area is zero.
double area_ratio(const DeviceCount& hybrid, const DeviceCount& cmos_ref,
                  const AreaModel& model = {});

/// "NOT", "AND", ..., "RIPPLE_ADDER_<bits>"
std::string cell_name(CellKind kind, int bits = 8);

/// Case-insensitive; accepts NOT/INV, RIPPLE8/RIPPLE_ADDER_8/8BIT aliases.
/// Throws std::invalid_argument for unknown names.
CellKind parse_cell_kind(const std::string& name, int* bits = nullptr);

/// The Table-style characterization row order.
const std::vector<CellKind>& library_cells();

}  // namespace memos
