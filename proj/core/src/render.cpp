#include "dwiseg/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace dwiseg {

namespace {

void check_slice(const Grid3& grid, int slice) {
    if (slice < 0 || slice >= grid.nz)
        throw InvalidInput("slice " + std::to_string(slice) + " out of range 0.." +
                           std::to_string(grid.nz - 1));
}

} // namespace

std::vector<std::uint8_t> render_labels(const LabelVolume& labels, int slice) {
    check_slice(labels.grid, slice);
    const Grid3& g = labels.grid;
    std::vector<std::uint8_t> img(static_cast<std::size_t>(g.nx) * g.ny);
    for (int y = 0; y < g.ny; ++y) {
        for (int x = 0; x < g.nx; ++x) {
            std::uint8_t value;
            switch (labels.at(x, y, slice)) {
            case label_of(Tissue::Csf): value = 255; break;
            case label_of(Tissue::Matter): value = 128; break;
            case label_of(Tissue::Background): value = 0; break;
            default:
                throw InvalidInput("label " + std::to_string(labels.at(x, y, slice)) +
                                   " has no display value");
            }
            img[static_cast<std::size_t>(y) * g.nx + x] = value;
        }
    }
    return img;
}

std::vector<std::uint8_t> render_scalar(const Volume& volume, int slice, double lo, double hi) {
    check_slice(volume.grid, slice);
    const Grid3& g = volume.grid;
    if (!(lo < hi)) {
        lo = volume.at(0, 0, slice);
        hi = lo;
        for (int y = 0; y < g.ny; ++y)
            for (int x = 0; x < g.nx; ++x) {
                lo = std::min(lo, volume.at(x, y, slice));
                hi = std::max(hi, volume.at(x, y, slice));
            }
        if (hi == lo)
            hi = lo + 1.0;
    }
    std::vector<std::uint8_t> img(static_cast<std::size_t>(g.nx) * g.ny);
    for (int y = 0; y < g.ny; ++y) {
        for (int x = 0; x < g.nx; ++x) {
            double t = (volume.at(x, y, slice) - lo) / (hi - lo);
            t = std::clamp(t, 0.0, 1.0);
            img[static_cast<std::size_t>(y) * g.nx + x] =
                static_cast<std::uint8_t>(std::lround(t * 255.0));
        }
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, int width, int height,
               const std::vector<std::uint8_t>& pixels) {
    if (width <= 0 || height <= 0)
        throw InvalidInput("image dimensions must be positive");
    if (pixels.size() != static_cast<std::size_t>(width) * height)
        throw InvalidInput("pixel buffer does not match the image dimensions");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw IoError("cannot open " + path.string() + " for writing");
    f << "P5\n" << width << " " << height << "\n255\n";
    f.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
    if (!f)
        throw IoError("short write to " + path.string());
}

} // namespace dwiseg
