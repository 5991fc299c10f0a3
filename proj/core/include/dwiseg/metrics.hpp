#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dwiseg/volume.hpp"

namespace dwiseg {

/// m x m count matrix; t(i, j) is the number of true-class-j voxels that
/// were classified as class i (rows = predicted, columns = true).
struct ConfusionMatrix {
    int m = 0;
    std::vector<std::int64_t> t; // row-major

    explicit ConfusionMatrix(int classes = kNumClasses)
        : m(classes), t(static_cast<std::size_t>(classes) * classes, 0) {}

    std::int64_t& at(int i, int j) { return t[static_cast<std::size_t>(i) * m + j]; }
    std::int64_t at(int i, int j) const { return t[static_cast<std::size_t>(i) * m + j]; }

    std::int64_t total() const;
    std::int64_t row_sum(int i) const; // predicted as class i
    std::int64_t col_sum(int j) const; // truly class j
};

struct AgreementReport {
    double phi = 0.0;   // global accuracy
    double rho_z = 0.0; // chance agreement
    double kappa = 0.0;
};

struct VolumeReport {
    std::vector<std::int64_t> counts;        // per class, 1-based class c at counts[c-1]
    std::vector<double> v_percent;           // 100 * count / domain
    std::optional<double> fluid_matter_ratio; // V1 / V2; empty when class 2 is absent
    std::int64_t domain = 0;
};

/// Exact per-voxel counts of predicted-vs-true labels. Both volumes must
/// share the grid and carry labels in 1..m.
ConfusionMatrix confusion_matrix(const LabelVolume& truth, const LabelVolume& predicted,
                                 int m = kNumClasses);

/// As above but restricted to the given slices.
ConfusionMatrix confusion_matrix(const LabelVolume& truth, const LabelVolume& predicted, int m,
                                 const std::vector<int>& slices);

/// Fraction of correctly classified objects: trace / total.
double global_accuracy(const ConfusionMatrix& t);

/// Chance-agreement denominator convention for the kappa index. Standard is
/// the product of marginals over N^2; LiteralRowColOverSquares divides the
/// marginal products by the sum of squared cells instead (kept for
/// comparison; it is not a probability and can exceed 1).
enum class KappaForm { Standard, LiteralRowColOverSquares };

/// Chance-corrected agreement: kappa = (phi - rho_z) / (1 - rho_z).
/// Throws UndefinedKappa when rho_z = 1 (all mass in one row/column pair).
double kappa(const ConfusionMatrix& t, KappaForm form = KappaForm::Standard);

/// phi, rho_z and kappa in one pass.
AgreementReport agreement_report(const ConfusionMatrix& t, KappaForm form = KappaForm::Standard);

/// Per-class volume percentages and the fluid-matter ratio V1/V2. The domain
/// is the whole grid, or the nonzero voxels of `domain_mask` when given.
VolumeReport volume_report(const LabelVolume& labels, const LabelVolume* domain_mask = nullptr,
                           int m = kNumClasses);

} // namespace dwiseg
