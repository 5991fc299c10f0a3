#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dwiseg/error.hpp"

namespace dwiseg {

/// Voxel grid shared by every volume of one pipeline run.
struct Grid3 {
    int nx = 0;
    int ny = 0;
    int nz = 0;

    bool operator==(const Grid3&) const = default;

    std::size_t voxels() const {
        return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
               static_cast<std::size_t>(nz);
    }

    /// Linear index, x-fastest, then y, then z. Matches the on-disk layout.
    std::size_t index(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * ny + y) * nx + x;
    }

    void validate() const {
        if (nx <= 0 || ny <= 0 || nz <= 0)
            throw InvalidParameter("grid dimensions must be positive, got " + to_string());
    }

    std::string to_string() const {
        return std::to_string(nx) + "x" + std::to_string(ny) + "x" + std::to_string(nz);
    }
};

/// One scalar field over a grid: a diffusion experiment, an ADC map, or any
/// derived per-voxel quantity. Held as double in memory; the container format
/// stores f32le.
struct Volume {
    Grid3 grid;
    std::vector<double> data;

    Volume() = default;
    explicit Volume(Grid3 g, double fill = 0.0) : grid(g), data(g.voxels(), fill) {}

    double& at(int x, int y, int z) { return data[grid.index(x, y, z)]; }
    double at(int x, int y, int z) const { return data[grid.index(x, y, z)]; }
};

/// Per-voxel class assignment, u8 on disk. Value 0 is reserved for
/// "unselected" in ROI masks; tissue classes start at 1.
struct LabelVolume {
    Grid3 grid;
    std::vector<std::uint8_t> data;

    LabelVolume() = default;
    explicit LabelVolume(Grid3 g, std::uint8_t fill = 0) : grid(g), data(g.voxels(), fill) {}

    std::uint8_t& at(int x, int y, int z) { return data[grid.index(x, y, z)]; }
    std::uint8_t at(int x, int y, int z) const { return data[grid.index(x, y, z)]; }
};

/// Fixed three-class universe used throughout the pipeline.
enum class Tissue : std::uint8_t {
    Csf = 1,        // cerebrospinal fluid
    Matter = 2,     // white + gray matter (indistinguishable in DW contrast)
    Background = 3, // outside the sample
};

inline constexpr int kNumClasses = 3;

inline constexpr std::uint8_t label_of(Tissue t) { return static_cast<std::uint8_t>(t); }

/// Co-registered stack of volumes treated as spectral bands. Per voxel the
/// bands form the feature vector consumed by the classifiers.
struct MultispectralVolume {
    std::vector<Volume> bands;
    std::vector<double> b_values; // one per band for a DW acquisition; empty otherwise

    const Grid3& grid() const { return bands.front().grid; }
    int band_count() const { return static_cast<int>(bands.size()); }
};

} // namespace dwiseg
