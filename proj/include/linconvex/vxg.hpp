#pragma once

#include <iosfwd>
#include <string>

#include "linconvex/geometry.hpp"

namespace linconvex {

/// VXG1 text format:
///   VXG1 <n> <res...> <lo...> <hi...>\n<hex payload>\n
/// The payload packs the occupancy bits in row-major cell order, most
/// significant bit first within each byte, zero padded to a whole byte,
/// lowercase hex. Reals are printed with 17 significant digits so the box
/// round-trips exactly.
std::string vxg_header(const GridSpec& spec);
std::string vxg_payload(const VoxelGrid& g);
void write_vxg(std::ostream& out, const VoxelGrid& g);
VoxelGrid read_vxg(std::istream& in);

void save_vxg(const std::string& path, const VoxelGrid& g);
VoxelGrid load_vxg(const std::string& path);

/// SHA-256 of the payload, lowercase hex. Identifies grids in reports.
std::string grid_sha(const VoxelGrid& g);

}  // namespace linconvex
