#include "dwiseg/signal.hpp"

#include <cmath>
#include <string>

#include "dwiseg/rng.hpp"

namespace dwiseg {

namespace {

bool finite(double v) { return std::isfinite(v); }

} // namespace

void AcquisitionParams::validate() const {
    if (!finite(gamma) || gamma <= 0.0)
        throw InvalidParameter("gamma must be positive and finite");
    if (!finite(te) || te <= 0.0)
        throw InvalidParameter("echo time must be positive and finite");
    if (b_values.empty())
        throw InvalidParameter("at least one b-value is required");
    if (b_values.front() != 0.0)
        throw InvalidParameter("the first experiment must be the b=0 reference");
    double prev = -1.0;
    for (double b : b_values) {
        if (!finite(b) || b < 0.0)
            throw InvalidParameter("b-values must be finite and non-negative");
        if (b < prev)
            throw InvalidParameter("b-values must be non-decreasing");
        prev = b;
    }
    if (!gradients.empty()) {
        if (gradients.size() != b_values.size())
            throw InvalidParameter("gradient count must match b-value count");
        for (std::size_t i = 0; i < gradients.size(); ++i) {
            double derived = compute_b_value(gamma, gradients[i], te);
            double scale = std::max(std::abs(b_values[i]), 1.0);
            if (std::abs(derived - b_values[i]) > 1e-9 * scale)
                throw InvalidParameter("b-value " + std::to_string(b_values[i]) +
                                       " disagrees with its gradient (derived " +
                                       std::to_string(derived) + ")");
        }
    }
}

void Phantom::validate() const {
    labels.grid.validate();
    if (!finite(k) || k <= 0.0)
        throw InvalidParameter("phantom constant K must be positive");
    for (const auto& [label, params] : classes) {
        if (params.rho < 0.0 || !finite(params.rho))
            throw InvalidParameter("spin density must be non-negative");
        if (params.t2 <= 0.0 || !finite(params.t2))
            throw InvalidParameter("T2 must be positive for class " + std::to_string(label));
        if (params.d < 0.0 || !finite(params.d))
            throw InvalidParameter("diffusion coefficient must be non-negative");
    }
    for (std::uint8_t label : labels.data) {
        if (!classes.contains(label))
            throw InvalidParameter("voxel label " + std::to_string(label) +
                                   " has no class parameters");
    }
}

double compute_b_value(double gamma, double gradient, double te) {
    if (!finite(gamma) || !finite(gradient) || !finite(te))
        throw InvalidParameter("b-value inputs must be finite");
    if (gamma <= 0.0 || te <= 0.0 || gradient < 0.0)
        throw InvalidParameter("b-value inputs out of range");
    double b_si = gamma * gamma * gradient * gradient * te * te * te / 3.0; // s/m^2
    return b_si * 1e-6;                                                     // s/mm^2
}

Volume add_noise(const Volume& volume, const NoiseModel& noise, std::uint64_t stream) {
    if (!finite(noise.sigma) || noise.sigma < 0.0)
        throw InvalidParameter("noise sigma must be non-negative");

    if (noise.kind == NoiseKind::None || noise.sigma == 0.0)
        return volume;

    Volume out = volume;
    const std::size_t n = out.data.size();
    for (std::size_t i = 0; i < n; ++i) {
        NormalPair g = counter_normal_pair(noise.seed, stream, i);
        double v = out.data[i];
        if (noise.kind == NoiseKind::Gaussian) {
            out.data[i] = v + noise.sigma * g.n0;
        } else {
            double re = v + noise.sigma * g.n0;
            double im = noise.sigma * g.n1;
            out.data[i] = std::sqrt(re * re + im * im);
        }
    }
    return out;
}

MultispectralVolume synthesize_dwi(const Phantom& phantom, const AcquisitionParams& params,
                                   const NoiseModel& noise) {
    phantom.validate();
    params.validate();
    if (params.b_values.size() < 2)
        throw InvalidParameter("synthesis needs at least two experiments");

    const Grid3& grid = phantom.grid();
    const int n_bands = static_cast<int>(params.b_values.size());

    // Per-class signal per band; the label field then just indexes it.
    std::map<std::uint8_t, std::vector<double>> class_signal;
    for (const auto& [label, tissue] : phantom.classes) {
        std::vector<double> per_band(n_bands);
        double t2w = phantom.k * tissue.rho * std::exp(-params.te / tissue.t2);
        for (int i = 0; i < n_bands; ++i)
            per_band[i] = t2w * std::exp(-params.b_values[i] * tissue.d);
        class_signal[label] = std::move(per_band);
    }

    MultispectralVolume ms;
    ms.b_values = params.b_values;
    ms.bands.reserve(n_bands);
    for (int i = 0; i < n_bands; ++i) {
        Volume band(grid);
        const std::size_t n = band.data.size();
        for (std::size_t v = 0; v < n; ++v)
            band.data[v] = class_signal.at(phantom.labels.data[v])[i];
        ms.bands.push_back(add_noise(band, noise, static_cast<std::uint64_t>(i)));
    }
    return ms;
}

} // namespace dwiseg
