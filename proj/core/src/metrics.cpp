#include "dwiseg/metrics.hpp"

#include <numeric>
#include <set>
#include <string>

namespace dwiseg {

std::int64_t ConfusionMatrix::total() const {
    return std::accumulate(t.begin(), t.end(), std::int64_t{0});
}

std::int64_t ConfusionMatrix::row_sum(int i) const {
    std::int64_t s = 0;
    for (int j = 0; j < m; ++j)
        s += at(i, j);
    return s;
}

std::int64_t ConfusionMatrix::col_sum(int j) const {
    std::int64_t s = 0;
    for (int i = 0; i < m; ++i)
        s += at(i, j);
    return s;
}

namespace {

void check_pair(const LabelVolume& truth, const LabelVolume& predicted, int m) {
    if (!(truth.grid == predicted.grid))
        throw InvalidInput("truth and prediction grids differ: " + truth.grid.to_string() +
                           " vs " + predicted.grid.to_string());
    if (m < 1)
        throw InvalidInput("class count must be at least 1");
}

void tally(const LabelVolume& truth, const LabelVolume& predicted, int m, std::size_t begin,
           std::size_t end, ConfusionMatrix& out) {
    for (std::size_t v = begin; v < end; ++v) {
        int tj = truth.data[v];
        int pi = predicted.data[v];
        if (tj < 1 || tj > m || pi < 1 || pi > m)
            throw InvalidInput("label outside 1.." + std::to_string(m) + " at voxel " +
                               std::to_string(v));
        ++out.at(pi - 1, tj - 1);
    }
}

} // namespace

ConfusionMatrix confusion_matrix(const LabelVolume& truth, const LabelVolume& predicted, int m) {
    check_pair(truth, predicted, m);
    ConfusionMatrix out(m);
    tally(truth, predicted, m, 0, truth.data.size(), out);
    return out;
}

ConfusionMatrix confusion_matrix(const LabelVolume& truth, const LabelVolume& predicted, int m,
                                 const std::vector<int>& slices) {
    check_pair(truth, predicted, m);
    ConfusionMatrix out(m);
    const Grid3& g = truth.grid;
    std::set<int> unique(slices.begin(), slices.end());
    for (int z : unique) {
        if (z < 0 || z >= g.nz)
            throw InvalidInput("slice " + std::to_string(z) + " out of range");
        std::size_t begin = g.index(0, 0, z);
        tally(truth, predicted, m, begin, begin + static_cast<std::size_t>(g.nx) * g.ny, out);
    }
    return out;
}

double global_accuracy(const ConfusionMatrix& t) {
    std::int64_t total = t.total();
    if (total <= 0)
        throw InvalidInput("confusion matrix is empty");
    std::int64_t correct = 0;
    for (int i = 0; i < t.m; ++i)
        correct += t.at(i, i);
    return static_cast<double>(correct) / static_cast<double>(total);
}

namespace {

double chance_agreement(const ConfusionMatrix& t, KappaForm form) {
    std::int64_t total = t.total();
    double num = 0.0;
    for (int i = 0; i < t.m; ++i)
        num += static_cast<double>(t.row_sum(i)) * static_cast<double>(t.col_sum(i));
    if (form == KappaForm::Standard)
        return num / (static_cast<double>(total) * static_cast<double>(total));
    double sq = 0.0;
    for (std::int64_t cell : t.t)
        sq += static_cast<double>(cell) * static_cast<double>(cell);
    return num / sq;
}

} // namespace

double kappa(const ConfusionMatrix& t, KappaForm form) {
    return agreement_report(t, form).kappa;
}

AgreementReport agreement_report(const ConfusionMatrix& t, KappaForm form) {
    if (t.total() <= 0)
        throw InvalidInput("confusion matrix is empty");
    AgreementReport r;
    r.phi = global_accuracy(t);
    r.rho_z = chance_agreement(t, form);
    if (r.rho_z == 1.0)
        throw UndefinedKappa("chance agreement is 1; kappa is undefined");
    r.kappa = (r.phi - r.rho_z) / (1.0 - r.rho_z);
    return r;
}

VolumeReport volume_report(const LabelVolume& labels, const LabelVolume* domain_mask, int m) {
    if (m < 1)
        throw InvalidInput("class count must be at least 1");
    if (domain_mask && !(domain_mask->grid == labels.grid))
        throw InvalidInput("domain mask grid differs from the label grid");

    VolumeReport r;
    r.counts.assign(m, 0);
    for (std::size_t v = 0; v < labels.data.size(); ++v) {
        if (domain_mask && !domain_mask->data[v])
            continue;
        int label = labels.data[v];
        if (label < 1 || label > m)
            throw InvalidInput("label outside 1.." + std::to_string(m));
        ++r.counts[label - 1];
        ++r.domain;
    }
    if (r.domain == 0)
        throw InvalidInput("empty evaluation domain");

    r.v_percent.resize(m);
    for (int c = 0; c < m; ++c)
        r.v_percent[c] = 100.0 * static_cast<double>(r.counts[c]) / static_cast<double>(r.domain);
    if (m >= 2 && r.counts[1] > 0)
        r.fluid_matter_ratio = static_cast<double>(r.counts[0]) / static_cast<double>(r.counts[1]);
    return r;
}

} // namespace dwiseg
