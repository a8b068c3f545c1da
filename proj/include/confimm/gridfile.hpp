#pragma once

#include <iosfwd>
#include <string>

#include "confimm/immersion.hpp"

namespace confimm {

/// Text grid format. Header lines `key=value` followed by rows x cols data
/// lines `s t x_1 ... x_n` (row-major: s varies by row, t by column).
///
/// Global keys: domain (disk, annulus, flat-torus, collar-cylinder, atlas),
/// n (>= 3), ell (collar), charts and euler_char (atlas).
/// Block keys, repeated before each chart of an atlas: rows, cols,
/// period (periodic axes), range (non-periodic axis), breaks and ppp
/// (Gauss-Legendre panel axis). A non-periodic axis without breaks is
/// treated as scattered.
///
/// Errors are InvalidInput and name the offending line.
SampledImmersion read_grid(std::istream& in, Exec exec = Exec::parallel);
SampledImmersion read_grid_file(const std::string& path, Exec exec = Exec::parallel);

void write_grid(std::ostream& out, const SampledImmersion& imm);
void write_grid_file(const std::string& path, const SampledImmersion& imm);

}  // namespace confimm
