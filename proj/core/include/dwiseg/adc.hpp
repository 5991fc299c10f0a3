#pragma once

#include <vector>

#include "dwiseg/volume.hpp"

namespace dwiseg {

/// How voxels with no usable signal are treated when mapping diffusion.
///
/// Faithful mode reproduces the scanner-style behaviour: the reference band
/// is clamped up to the floor and the log ratio is taken against the raw
/// diffusion bands, so no-signal regions come out with spurious positive
/// diffusion values once noise is present. Masked mode instead writes 0 for
/// any voxel with a band at or below the floor and clamps negative results.
enum class ArtifactMode { Faithful, Masked };

struct AdcConfig {
    double c = 1.0;       // output proportionality constant, > 0
    double floor = 1e-12; // no-signal detection level, same units as signal, > 0

    void validate() const;
};

/// Apparent-diffusion map from a multi-b acquisition: per voxel
///   (c / (n-1)) * sum_{i>=2} (1/b_i) * ln(f_1 / f_i),
/// the sample mean of the per-experiment log-ratio estimates. With c = 1 the
/// output is in mm^2/s. Bands that are exactly zero contribute nothing (the
/// log ratio is undefined without signal).
Volume compute_adc_map(const MultispectralVolume& msvolume, const std::vector<double>& b_values,
                       const AdcConfig& config = {}, ArtifactMode mode = ArtifactMode::Faithful);

} // namespace dwiseg
