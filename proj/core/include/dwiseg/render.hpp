#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dwiseg/volume.hpp"

namespace dwiseg {

/// One axial slice of a label volume as 8-bit gray: background 0, matter 128,
/// fluid 255. Row-major, y outer, x inner.
std::vector<std::uint8_t> render_labels(const LabelVolume& labels, int slice);

/// One axial slice of a scalar volume windowed to [lo, hi] -> [0, 255].
/// With lo >= hi the window spans the slice's own min/max.
std::vector<std::uint8_t> render_scalar(const Volume& volume, int slice, double lo = 0.0,
                                        double hi = 0.0);

/// Binary PGM (P5), maxval 255.
void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& pixels);

} // namespace dwiseg
