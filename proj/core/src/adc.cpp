#include "dwiseg/adc.hpp"

#include <cmath>
#include <string>

namespace dwiseg {

void AdcConfig::validate() const {
    if (!std::isfinite(c) || c <= 0.0)
        throw InvalidParameter("ADC constant C must be positive");
    if (!std::isfinite(floor) || floor <= 0.0)
        throw InvalidParameter("ADC signal floor must be positive");
}

Volume compute_adc_map(const MultispectralVolume& ms, const std::vector<double>& b_values,
                       const AdcConfig& config, ArtifactMode mode) {
    config.validate();
    const int n = ms.band_count();
    if (n < 2)
        throw InvalidInput("ADC mapping needs at least two bands, got " + std::to_string(n));
    if (static_cast<int>(b_values.size()) != n)
        throw InvalidParameter("b-value count must match band count");
    if (b_values[0] != 0.0)
        throw InvalidParameter("the first band must be the b=0 reference");
    for (int i = 1; i < n; ++i)
        if (!(b_values[i] > 0.0))
            throw InvalidParameter("diffusion-weighted b-values must be positive");
    for (int i = 1; i < n; ++i)
        if (!(ms.bands[i].grid == ms.bands[0].grid))
            throw InvalidInput("bands must share one grid");

    const double scale = config.c / static_cast<double>(n - 1);
    Volume out(ms.bands[0].grid);
    const std::size_t voxels = out.data.size();

    for (std::size_t v = 0; v < voxels; ++v) {
        double reference = ms.bands[0].data[v];

        if (mode == ArtifactMode::Masked) {
            bool below = reference <= config.floor;
            for (int i = 1; i < n && !below; ++i)
                below = ms.bands[i].data[v] <= config.floor;
            if (below) {
                out.data[v] = 0.0;
                continue;
            }
            double sum = 0.0;
            for (int i = 1; i < n; ++i)
                sum += std::log(reference / ms.bands[i].data[v]) / b_values[i];
            out.data[v] = std::max(scale * sum, 0.0);
            continue;
        }

        // Faithful mode: the reference band is clamped up to the no-signal
        // floor and the ratio is taken against the raw diffusion bands, the
        // way scanner maps behave; under noise this paints no-signal regions
        // with spurious positive diffusion. Bands without any signal at all
        // contribute nothing. Negative log ratios are kept.
        double log_ref = std::log(std::max(reference, config.floor));
        double sum = 0.0;
        for (int i = 1; i < n; ++i) {
            double f = ms.bands[i].data[v];
            if (f > 0.0)
                sum += (log_ref - std::log(f)) / b_values[i];
        }
        out.data[v] = scale * sum;
    }
    return out;
}

} // namespace dwiseg
