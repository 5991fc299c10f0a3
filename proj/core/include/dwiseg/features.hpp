#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dwiseg/volume.hpp"

namespace dwiseg {

/// Per-band normalization bounds, recorded when a training set is built and
/// stored with every trained model so inference scales inputs identically.
struct NormBounds {
    std::vector<double> lo;
    std::vector<double> hi;

    int bands() const { return static_cast<int>(lo.size()); }
    void validate() const;
};

struct TrainingSample {
    std::vector<double> x;  // raw (unnormalized) band values
    std::uint8_t label = 0; // class, 1-based
};

struct TrainingSet {
    std::vector<TrainingSample> samples;
    NormBounds bounds;
    int classes = kNumClasses;

    int bands() const { return bounds.bands(); }

    /// Builds a set directly from samples, with bounds computed over the
    /// samples themselves. Convenience for synthetic data.
    static TrainingSet from_samples(std::vector<TrainingSample> samples, int classes);
};

/// Stacks co-registered volumes into one multispectral volume. Band order is
/// preserved; all volumes must share one grid.
MultispectralVolume stack_bands(std::vector<Volume> volumes);

/// Component-wise (x - lo) / (hi - lo), clamped to [0, 1].
std::vector<double> normalize(const std::vector<double>& x, const NormBounds& bounds);

/// Assembles a labelled training set from per-class ROI masks restricted to
/// the given slices. Masks must be disjoint and every class must contribute
/// at least one voxel. Normalization bounds are computed over the whole
/// volume, not just the ROIs, and samples are ordered by linear voxel index
/// so the result does not depend on mask traversal order.
TrainingSet build_training_set(const MultispectralVolume& msvolume,
                               const std::map<std::uint8_t, LabelVolume>& roi_masks,
                               const std::vector<int>& slice_filter);

} // namespace dwiseg
