#include "dwiseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dwiseg {

namespace {

constexpr double kTwoPi = 6.283185307179586476925287;

struct Ellipsoid {
    double cx, cy, cz; // centre, voxel units
    double rx, ry, rz; // semi-axes, voxel units

    // Normalized squared radius; <= 1 is inside.
    double r2(double x, double y, double z) const {
        double dx = (x - cx) / rx;
        double dy = (y - cy) / ry;
        double dz = (z - cz) / rz;
        return dx * dx + dy * dy + dz * dz;
    }

    void check_within(const Grid3& g, const std::string& name) const {
        if (rx <= 0.0 || ry <= 0.0 || rz <= 0.0)
            throw InvalidGeometry(name + " has non-positive extent");
        if (cx - rx < -0.5 || cx + rx > g.nx - 0.5 || cy - ry < -0.5 || cy + ry > g.ny - 0.5 ||
            cz - rz < -0.5 || cz + rz > g.nz - 0.5)
            throw InvalidGeometry(name + " exceeds the grid bounds");
    }
};

} // namespace

Phantom make_brain_phantom(const Grid3& grid, const BrainGeometry& geo) {
    grid.validate();
    if (geo.background.rho != 0.0)
        throw InvalidParameter("background spin density must be zero");
    if (!(geo.csf.d > geo.matter.d))
        throw InvalidParameter("fluid must diffuse faster than matter");

    const double cx = 0.5 * (grid.nx - 1);
    const double cy = 0.5 * (grid.ny - 1);
    const double cz = 0.5 * (grid.nz - 1);

    Ellipsoid head{cx, cy, cz, geo.head_rx * grid.nx, geo.head_ry * grid.ny,
                   geo.head_rz * grid.nz};
    head.check_within(grid, "head");

    const bool has_ventricles = geo.vent_rx > 0.0 && geo.vent_ry > 0.0 && geo.vent_rz > 0.0;
    Ellipsoid vent_l{}, vent_r{};
    if (has_ventricles) {
        double vx = geo.vent_dx * grid.nx;
        double vy = geo.vent_dy * grid.ny;
        vent_l = {cx - vx, cy + vy, cz, geo.vent_rx * grid.nx, geo.vent_ry * grid.ny,
                  geo.vent_rz * grid.nz};
        vent_r = {cx + vx, cy + vy, cz, vent_l.rx, vent_l.ry, vent_l.rz};
        vent_l.check_within(grid, "left ventricle");
        vent_r.check_within(grid, "right ventricle");
    }

    const bool has_sulci = geo.sulci_count > 0 && geo.sulci_fill > 0.0 &&
                           geo.sulci_outer > geo.sulci_inner;
    if (has_sulci && (geo.sulci_inner < 0.0 || geo.sulci_outer > 1.0))
        throw InvalidGeometry("sulci shell must lie inside the head");

    Phantom phantom;
    phantom.labels = LabelVolume(grid, label_of(Tissue::Background));
    phantom.classes = {
        {geo.csf.label, geo.csf},
        {geo.matter.label, geo.matter},
        {geo.background.label, geo.background},
    };
    phantom.k = geo.k;

    for (int z = 0; z < grid.nz; ++z) {
        for (int y = 0; y < grid.ny; ++y) {
            for (int x = 0; x < grid.nx; ++x) {
                double head_r2 = head.r2(x, y, z);
                if (head_r2 > 1.0)
                    continue;
                std::uint8_t label = label_of(Tissue::Matter);

                if (has_ventricles &&
                    (vent_l.r2(x, y, z) <= 1.0 || vent_r.r2(x, y, z) <= 1.0)) {
                    label = label_of(Tissue::Csf);
                } else if (has_sulci) {
                    double r = std::sqrt(head_r2);
                    if (r >= geo.sulci_inner && r <= geo.sulci_outer) {
                        double theta = std::atan2((y - cy) / head.ry, (x - cx) / head.rx);
                        double phase = theta / kTwoPi * geo.sulci_count;
                        phase -= std::floor(phase);
                        if (phase < geo.sulci_fill)
                            label = label_of(Tissue::Csf);
                    }
                }
                phantom.labels.at(x, y, z) = label;
            }
        }
    }
    return phantom;
}

LabelVolume head_mask(const LabelVolume& labels) {
    LabelVolume mask(labels.grid, 0);
    for (std::size_t i = 0; i < labels.data.size(); ++i)
        mask.data[i] = labels.data[i] != label_of(Tissue::Background) ? 1 : 0;
    return mask;
}

namespace {

// True when every in-plane voxel within `radius` (Chebyshev) exists and
// carries the same label.
bool interior_in_plane(const LabelVolume& labels, int x, int y, int z, int radius) {
    std::uint8_t label = labels.at(x, y, z);
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            int px = x + dx;
            int py = y + dy;
            if (px < 0 || py < 0 || px >= labels.grid.nx || py >= labels.grid.ny)
                return false;
            if (labels.at(px, py, z) != label)
                return false;
        }
    }
    return true;
}

} // namespace

std::map<std::uint8_t, LabelVolume> make_roi_masks(const LabelVolume& labels,
                                                   const RoiSpec& spec) {
    const Grid3& grid = labels.grid;
    if (spec.slices.empty())
        throw InvalidParameter("ROI selection needs at least one slice");
    for (int z : spec.slices)
        if (z < 0 || z >= grid.nz)
            throw InvalidParameter("ROI slice " + std::to_string(z) + " out of range");
    if (spec.erode < 0)
        throw InvalidParameter("erosion radius must be non-negative");

    std::map<std::uint8_t, std::vector<std::size_t>> candidates;
    for (int z : spec.slices) {
        for (int y = 0; y < grid.ny; ++y) {
            for (int x = 0; x < grid.nx; ++x) {
                if (!interior_in_plane(labels, x, y, z, spec.erode))
                    continue;
                candidates[labels.at(x, y, z)].push_back(grid.index(x, y, z));
            }
        }
    }

    std::map<std::uint8_t, LabelVolume> masks;
    for (const auto& [label, cap] : spec.max_per_class) {
        auto it = candidates.find(label);
        if (it == candidates.end() || it->second.empty())
            throw MissingClass("no interior voxels for class " + std::to_string(label) +
                               " on the selected slices");
        const std::vector<std::size_t>& idx = it->second;

        LabelVolume mask(grid, 0);
        std::size_t take = cap > 0 ? std::min<std::size_t>(idx.size(), cap) : idx.size();
        // Deterministic stride subsample over the index-ordered candidates.
        for (std::size_t s = 0; s < take; ++s)
            mask.data[idx[(s * idx.size()) / take]] = 1;
        masks[label] = std::move(mask);
    }
    return masks;
}

} // namespace dwiseg
