#pragma once
#include <string>

#include "nlkg/grid.hpp"
#include "nlkg/state.hpp"

namespace nlkg {

// Field files come in two formats:
//   CSV:    header "x,value", one row per grid point, 17 significant digits.
//   binary: 16-byte header (magic "NLKGFLD1", then N as little-endian u64)
//           followed by N little-endian float64 samples.
// A State is stored as two consecutive binary blocks (first, second) or a
// three-column CSV "x,first,second".

void write_field_csv(const Field& f, const std::string& path);
void write_field_binary(const Field& f, const std::string& path);
Field read_field_binary(const Grid& g, const std::string& path);

void write_state_csv(const State& s, const std::string& path);
void write_state_binary(const State& s, const std::string& path);
// Reads one or two binary blocks; a single block is promoted to a State with
// zero second slot.
State read_state_binary(const Grid& g, const std::string& path);
State read_state_csv(const Grid& g, const std::string& path);

// Auto-detects binary magic vs CSV.
State read_state(const Grid& g, const std::string& path);

}  // namespace nlkg
