#include "dwiseg/classifiers.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dwiseg/rng.hpp"

namespace dwiseg {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr double kTargetLo = 0.1;
constexpr double kTargetHi = 0.9;
constexpr double kMinWidth = 1e-6;

} // namespace

void RbfModel::activations(const std::vector<double>& x, std::vector<double>& phi) const {
    phi.resize(k);
    for (int j = 0; j < k; ++j) {
        const double* c = &centers[static_cast<std::size_t>(j) * bands];
        double d2 = 0.0;
        for (int i = 0; i < bands; ++i) {
            double d = x[i] - c[i];
            d2 += d * d;
        }
        phi[j] = std::exp(-d2 / (2.0 * widths[j] * widths[j]));
    }
}

void RbfModel::forward(const std::vector<double>& x, std::vector<double>& phi,
                       std::vector<double>& out) const {
    activations(x, phi);
    out.resize(classes);
    for (int k2 = 0; k2 < classes; ++k2) {
        double z = b_out[k2];
        const double* w = &w_out[static_cast<std::size_t>(k2) * k];
        for (int j = 0; j < k; ++j)
            z += w[j] * phi[j];
        out[k2] = sigmoid(z);
    }
}

RbfTrainResult train_rbf(const TrainingSet& ts, const RbfConfig& config) {
    if (ts.samples.empty())
        throw InvalidInput("training set is empty");
    ts.bounds.validate();
    if (config.k < 1)
        throw InvalidParameter("prototype count must be at least 1");
    if (!(config.eta0_hidden > 0.0) || !(config.eta0_out > 0.0))
        throw InvalidParameter("learning rates must be positive");
    for (const TrainingSample& s : ts.samples)
        if (s.label < 1 || s.label > ts.classes)
            throw InvalidInput("sample label outside the class range");

    const int bands = ts.bands();
    const int classes = ts.classes;
    const std::size_t n = ts.samples.size();

    std::vector<std::vector<double>> xs;
    xs.reserve(n);
    for (const TrainingSample& s : ts.samples)
        xs.push_back(normalize(s.x, ts.bounds));

    // Stage 1: unsupervised prototype placement.
    KmeansConfig kc;
    kc.eta0 = config.eta0_hidden;
    kc.max_iters = config.iters_hidden;
    kc.seed = config.seed;
    KmeansResult km = train_kmeans(xs, config.k, kc);

    RbfModel m;
    m.bands = bands;
    m.classes = classes;
    m.k = config.k;
    m.norm = ts.bounds;
    m.centers = std::move(km.centers);

    // Width = distance to the nearest other prototype, floored; keeps each
    // receptive field local while still covering its neighbourhood.
    m.widths.resize(config.k);
    for (int j = 0; j < config.k; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (int l = 0; l < config.k; ++l) {
            if (l == j)
                continue;
            double d2 = 0.0;
            for (int i = 0; i < bands; ++i) {
                double d = m.centers[static_cast<std::size_t>(j) * bands + i] -
                           m.centers[static_cast<std::size_t>(l) * bands + i];
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
        m.widths[j] = config.k > 1 ? std::max(std::sqrt(best), kMinWidth) : 1.0;
    }

    // Stage 2: delta-rule fit of the sigmoid output layer on the Gaussian
    // activations, run for the full iteration budget.
    std::vector<std::vector<double>> phis(n);
    {
        std::vector<double> phi;
        for (std::size_t s = 0; s < n; ++s) {
            m.activations(xs[s], phi);
            phis[s] = phi;
        }
    }

    m.w_out.assign(static_cast<std::size_t>(classes) * config.k, 0.0);
    m.b_out.assign(classes, 0.0);
    Rng rng(mix64(config.seed + 0x517cc1b727220a95ull));
    const double r = 1.0 / std::sqrt(static_cast<double>(config.k));
    for (double& w : m.w_out)
        w = rng.uniform(-r, r);
    for (double& w : m.b_out)
        w = rng.uniform(-r, r);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    double tau = std::max(1.0, config.iters_out / 2.0);
    double mse = 0.0;
    std::vector<double> out(classes);

    for (int epoch = 0; epoch < config.iters_out; ++epoch) {
        double eta = config.eta0_out / (1.0 + epoch / tau);
        rng.shuffle(order);
        for (std::size_t s : order) {
            const std::vector<double>& phi = phis[s];
            for (int k2 = 0; k2 < classes; ++k2) {
                double z = m.b_out[k2];
                const double* w = &m.w_out[static_cast<std::size_t>(k2) * config.k];
                for (int j = 0; j < config.k; ++j)
                    z += w[j] * phi[j];
                double o = sigmoid(z);
                double target = (ts.samples[s].label - 1 == k2) ? kTargetHi : kTargetLo;
                double delta = (o - target) * o * (1.0 - o);
                double* wm = &m.w_out[static_cast<std::size_t>(k2) * config.k];
                for (int j = 0; j < config.k; ++j)
                    wm[j] -= eta * delta * phi[j];
                m.b_out[k2] -= eta * delta;
            }
        }

        double sq = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            for (int k2 = 0; k2 < classes; ++k2) {
                double z = m.b_out[k2];
                const double* w = &m.w_out[static_cast<std::size_t>(k2) * config.k];
                for (int j = 0; j < config.k; ++j)
                    z += w[j] * phis[s][j];
                double o = sigmoid(z);
                double target = (ts.samples[s].label - 1 == k2) ? kTargetHi : kTargetLo;
                sq += (o - target) * (o - target);
            }
        }
        mse = sq / (static_cast<double>(n) * classes);
        if (!std::isfinite(mse))
            throw DivergenceError("output-layer error became non-finite at epoch " +
                                  std::to_string(epoch + 1));
    }

    return {std::move(m), mse, km.quantization_error};
}

} // namespace dwiseg
