#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dwiseg/signal.hpp"
#include "dwiseg/volume.hpp"

namespace dwiseg {

/// Geometric description of the synthetic head. All extents are fractions of
/// the corresponding grid axis, so one description scales to any resolution:
/// an ellipsoidal head of matter, two mirrored ventricle lobes of fluid, and
/// a band of radial cortical grooves (sulci) also filled with fluid.
struct BrainGeometry {
    // Head ellipsoid, centred in the grid.
    double head_rx = 0.42;
    double head_ry = 0.40;
    double head_rz = 0.46;

    // Ventricle lobes: two ellipsoids mirrored about the mid-sagittal plane.
    double vent_dx = 0.11;  // lateral offset of each lobe centre
    double vent_dy = -0.03; // offset toward the back of the head
    double vent_rx = 0.055;
    double vent_ry = 0.16;
    double vent_rz = 0.22;

    // Sulci: fluid-filled grooves in a shell under the cortical surface.
    // The shell is bounded by normalized head radii, and the grooves are
    // angular wedges repeated around the circumference.
    double sulci_inner = 0.82;
    double sulci_outer = 0.97;
    int sulci_count = 22;
    double sulci_fill = 0.33; // fluid fraction of each angular period

    // Per-class physics. Defaults give fluid a fast diffusion coefficient
    // and matter a slow one, with signal levels that overlap under
    // moderate noise the way clinical tissue boundaries do.
    TissueClassParams csf{label_of(Tissue::Csf), 0.97, 0.13, 3.0e-3};
    TissueClassParams matter{label_of(Tissue::Matter), 0.92, 0.115, 0.8e-3};
    TissueClassParams background{label_of(Tissue::Background), 0.0, 1.0, 0.0};

    double k = 1000.0; // signal proportionality constant
};

/// Rasterizes the geometry into a labelled phantom. Throws InvalidGeometry
/// when a region does not fit inside the grid.
Phantom make_brain_phantom(const Grid3& grid, const BrainGeometry& geometry = {});

/// Training-region selection: per class, voxels on the chosen slices whose
/// in-plane neighbourhood is entirely that class (boundary-safe), subsampled
/// to at most max_per_class with a deterministic stride.
struct RoiSpec {
    std::vector<int> slices{12}; // 0-based slice indices
    int erode = 2;               // in-plane erosion radius, voxels
    std::map<std::uint8_t, int> max_per_class{
        {label_of(Tissue::Csf), 160},
        {label_of(Tissue::Matter), 900},
        {label_of(Tissue::Background), 900},
    };
};

/// One 0/1 mask per tissue class, disjoint by construction.
std::map<std::uint8_t, LabelVolume> make_roi_masks(const LabelVolume& labels, const RoiSpec& spec);

/// 0/1 mask of voxels inside the sample (any non-background label).
LabelVolume head_mask(const LabelVolume& labels);

} // namespace dwiseg
