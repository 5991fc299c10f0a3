#include "dwiseg/classifiers.hpp"

#include <cmath>
#include <string>

namespace dwiseg {

namespace {

int argmax(const std::vector<double>& out) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(out.size()); ++k)
        if (out[k] > out[best])
            best = k; // ties keep the lowest index
    return best;
}

template <typename Model>
LabelVolume classify_voxelwise(const Model& model, const MultispectralVolume& ms) {
    if (ms.band_count() != model.bands)
        throw InvalidInput("model expects " + std::to_string(model.bands) + " bands, volume has " +
                           std::to_string(ms.band_count()));
    for (const Volume& band : ms.bands)
        if (!(band.grid == ms.grid()))
            throw InvalidInput("bands must share one grid");

    const Grid3& grid = ms.grid();
    LabelVolume labels(grid);
    const std::size_t n = grid.voxels();
    std::vector<double> x(model.bands), scratch, out;
    for (std::size_t v = 0; v < n; ++v) {
        for (int b = 0; b < model.bands; ++b)
            x[b] = ms.bands[b].data[v];
        model.forward(normalize(x, model.norm), scratch, out);
        labels.data[v] = static_cast<std::uint8_t>(argmax(out) + 1);
    }
    return labels;
}

} // namespace

LabelVolume classify(const MlpModel& model, const MultispectralVolume& ms) {
    return classify_voxelwise(model, ms);
}

LabelVolume classify(const RbfModel& model, const MultispectralVolume& ms) {
    return classify_voxelwise(model, ms);
}

LabelVolume classify(const PolyModel& model, const MultispectralVolume& ms) {
    return classify_voxelwise(model, ms);
}

LabelVolume classify(const FcmModel& model, const Volume& map) {
    const int c = static_cast<int>(model.centroids.size());
    if (c < 1)
        throw InvalidInput("model has no centroids");
    if (model.cluster_to_class.size() != model.centroids.size())
        throw InvalidInput("model cluster map is incomplete");

    LabelVolume labels(map.grid);
    for (std::size_t v = 0; v < map.data.size(); ++v) {
        // Maximum membership = nearest centroid; ties keep the lowest index.
        int best = 0;
        double best_d = std::abs(map.data[v] - model.centroids[0]);
        for (int i = 1; i < c; ++i) {
            double d = std::abs(map.data[v] - model.centroids[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        labels.data[v] = model.cluster_to_class[best];
    }
    return labels;
}

} // namespace dwiseg
