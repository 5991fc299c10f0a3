#include "dwiseg/features.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

namespace dwiseg {

void NormBounds::validate() const {
    if (lo.empty() || lo.size() != hi.size())
        throw InvalidParameter("normalization bounds are empty or mismatched");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i]))
            throw InvalidParameter("degenerate normalization bounds in band " +
                                   std::to_string(i + 1));
}

TrainingSet TrainingSet::from_samples(std::vector<TrainingSample> samples, int classes) {
    if (samples.empty())
        throw InvalidInput("training set needs at least one sample");
    const std::size_t bands = samples.front().x.size();
    NormBounds bounds;
    bounds.lo.assign(bands, std::numeric_limits<double>::infinity());
    bounds.hi.assign(bands, -std::numeric_limits<double>::infinity());
    for (const TrainingSample& s : samples) {
        if (s.x.size() != bands)
            throw InvalidInput("inconsistent feature lengths in training samples");
        for (std::size_t b = 0; b < bands; ++b) {
            bounds.lo[b] = std::min(bounds.lo[b], s.x[b]);
            bounds.hi[b] = std::max(bounds.hi[b], s.x[b]);
        }
    }
    bounds.validate();
    TrainingSet ts;
    ts.samples = std::move(samples);
    ts.bounds = std::move(bounds);
    ts.classes = classes;
    return ts;
}

MultispectralVolume stack_bands(std::vector<Volume> volumes) {
    if (volumes.empty())
        throw InvalidInput("cannot stack zero bands");
    for (const Volume& v : volumes)
        if (!(v.grid == volumes.front().grid))
            throw InvalidInput("band grids differ: " + v.grid.to_string() + " vs " +
                               volumes.front().grid.to_string());
    MultispectralVolume ms;
    ms.bands = std::move(volumes);
    return ms;
}

std::vector<double> normalize(const std::vector<double>& x, const NormBounds& bounds) {
    bounds.validate();
    if (x.size() != bounds.lo.size())
        throw InvalidInput("feature length does not match normalization bounds");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double t = (x[i] - bounds.lo[i]) / (bounds.hi[i] - bounds.lo[i]);
        out[i] = std::clamp(t, 0.0, 1.0);
    }
    return out;
}

TrainingSet build_training_set(const MultispectralVolume& ms,
                               const std::map<std::uint8_t, LabelVolume>& roi_masks,
                               const std::vector<int>& slice_filter) {
    if (roi_masks.empty())
        throw InvalidInput("no ROI masks given");
    const Grid3& grid = ms.grid();
    const int bands = ms.band_count();
    if (slice_filter.empty())
        throw InvalidParameter("slice filter must select at least one slice");
    std::set<int> slices;
    for (int z : slice_filter) {
        if (z < 0 || z >= grid.nz)
            throw InvalidParameter("slice " + std::to_string(z) + " out of range");
        slices.insert(z);
    }
    for (const auto& [label, mask] : roi_masks) {
        if (!(mask.grid == grid))
            throw InvalidInput("ROI mask grid differs from the volume grid");
        if (label == 0)
            throw InvalidInput("class label 0 is reserved");
    }

    // Bounds over the whole volume so inference-time inputs rarely clamp.
    NormBounds bounds;
    bounds.lo.assign(bands, std::numeric_limits<double>::infinity());
    bounds.hi.assign(bands, -std::numeric_limits<double>::infinity());
    for (int b = 0; b < bands; ++b) {
        for (double v : ms.bands[b].data) {
            bounds.lo[b] = std::min(bounds.lo[b], v);
            bounds.hi[b] = std::max(bounds.hi[b], v);
        }
    }
    bounds.validate();

    TrainingSet ts;
    ts.bounds = std::move(bounds);
    ts.classes = 0;
    for (const auto& [label, mask] : roi_masks)
        ts.classes = std::max(ts.classes, static_cast<int>(label));

    std::map<std::uint8_t, std::size_t> per_class;
    for (int z : slices) {
        for (int y = 0; y < grid.ny; ++y) {
            for (int x = 0; x < grid.nx; ++x) {
                std::size_t idx = grid.index(x, y, z);
                const std::uint8_t* owner = nullptr;
                std::uint8_t owner_label = 0;
                for (const auto& [label, mask] : roi_masks) {
                    if (!mask.data[idx])
                        continue;
                    if (owner)
                        throw InvalidInput("ROI masks overlap at voxel " + std::to_string(idx));
                    owner = &mask.data[idx];
                    owner_label = label;
                }
                if (!owner)
                    continue;
                TrainingSample s;
                s.x.resize(bands);
                for (int b = 0; b < bands; ++b)
                    s.x[b] = ms.bands[b].data[idx];
                s.label = owner_label;
                ts.samples.push_back(std::move(s));
                ++per_class[owner_label];
            }
        }
    }

    for (const auto& [label, mask] : roi_masks)
        if (per_class[label] == 0)
            throw MissingClass("class " + std::to_string(label) +
                               " has no ROI voxels on the selected slices");
    return ts;
}

} // namespace dwiseg
