#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "dwiseg/volume.hpp"

namespace dwiseg {

/// Spin-echo diffusion acquisition description. Diffusion weightings can be
/// given directly as b-values (s/mm^2) or derived from gradient amplitudes;
/// when both are present they must agree to 1e-9 relative.
struct AcquisitionParams {
    double gamma = 2.675e8;        // gyromagnetic ratio, rad s^-1 T^-1
    double te = 0.1;               // echo time, s
    std::vector<double> gradients; // T m^-1, one per experiment (optional)
    std::vector<double> b_values;  // s mm^-2, one per experiment; first must be 0

    void validate() const;
};

/// Physical parameters of one tissue class.
struct TissueClassParams {
    std::uint8_t label = 0;
    double rho = 0.0; // spin density, arbitrary units, >= 0
    double t2 = 1.0;  // transverse relaxation time, s, > 0
    double d = 0.0;   // diffusion coefficient, mm^2 s^-1, >= 0
};

/// Tissue label field plus the per-class physics needed to synthesize
/// signals from it.
struct Phantom {
    LabelVolume labels;
    std::map<std::uint8_t, TissueClassParams> classes;
    double k = 1.0; // signal proportionality constant, > 0

    const Grid3& grid() const { return labels.grid; }
    void validate() const;
};

enum class NoiseKind { None, Gaussian, Rician };

/// Measurement noise description. `seed` drives a counter-based stream, so a
/// fixed seed gives bit-identical volumes regardless of evaluation order.
struct NoiseModel {
    NoiseKind kind = NoiseKind::None;
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Diffusion weighting from gradient amplitude and echo time:
/// b = gamma^2 G^2 TE^3 / 3, converted from s/m^2 to s/mm^2.
double compute_b_value(double gamma, double gradient, double te);

/// Adds measurement noise to one volume. Gaussian perturbs each voxel by
/// N(0, sigma^2); Rician replaces v by sqrt((v + n1)^2 + n2^2), the magnitude
/// law of complex-valued acquisition, which floors empty regions above zero.
/// `stream` separates noise streams of different experiments under one seed.
Volume add_noise(const Volume& volume, const NoiseModel& noise, std::uint64_t stream = 0);

/// Synthesizes one volume per b-value from the phantom: each voxel carries
/// K * rho * exp(-TE/T2) * exp(-b * D) for its tissue class, then per-band
/// noise. Band order follows params.b_values.
MultispectralVolume synthesize_dwi(const Phantom& phantom, const AcquisitionParams& params,
                                   const NoiseModel& noise);

} // namespace dwiseg
