#include "dwiseg/classifiers.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "dwiseg/rng.hpp"

namespace dwiseg {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr double kTargetLo = 0.1;
constexpr double kTargetHi = 0.9;

} // namespace

void TrainConfig::validate() const {
    if (!(eta0 > 0.0))
        throw InvalidParameter("learning rate must be positive");
    if (!(eps > 0.0))
        throw InvalidParameter("target training error must be positive");
    if (max_iters < 1)
        throw InvalidParameter("iteration cap must be at least 1");
}

double TrainConfig::eta(int epoch) const {
    double t = tau > 0.0 ? tau : std::max(1.0, max_iters / 2.0);
    return eta0 / (1.0 + epoch / t);
}

void MlpModel::forward(const std::vector<double>& x, std::vector<double>& h,
                       std::vector<double>& out) const {
    h.resize(hidden);
    out.resize(classes);
    for (int j = 0; j < hidden; ++j) {
        double z = b1[j];
        const double* w = &w1[static_cast<std::size_t>(j) * bands];
        for (int i = 0; i < bands; ++i)
            z += w[i] * x[i];
        h[j] = sigmoid(z);
    }
    for (int k = 0; k < classes; ++k) {
        double z = b2[k];
        const double* w = &w2[static_cast<std::size_t>(k) * hidden];
        for (int j = 0; j < hidden; ++j)
            z += w[j] * h[j];
        out[k] = sigmoid(z);
    }
}

namespace {

// Gradient of 1/2 * ||out - target||^2, written into grad laid out as
// (w1, b1, w2, b2). Scratch vectors avoid per-sample allocation.
void mlp_gradient_into(const MlpModel& m, const std::vector<double>& x,
                       const std::vector<double>& target, std::vector<double>& h,
                       std::vector<double>& out, std::vector<double>& delta_out,
                       std::vector<double>& delta_h, double* grad) {
    m.forward(x, h, out);
    delta_out.resize(m.classes);
    delta_h.resize(m.hidden);
    for (int k = 0; k < m.classes; ++k)
        delta_out[k] = (out[k] - target[k]) * out[k] * (1.0 - out[k]);
    for (int j = 0; j < m.hidden; ++j) {
        double back = 0.0;
        for (int k = 0; k < m.classes; ++k)
            back += delta_out[k] * m.w2[static_cast<std::size_t>(k) * m.hidden + j];
        delta_h[j] = back * h[j] * (1.0 - h[j]);
    }
    double* g = grad;
    for (int j = 0; j < m.hidden; ++j)
        for (int i = 0; i < m.bands; ++i)
            *g++ = delta_h[j] * x[i];
    for (int j = 0; j < m.hidden; ++j)
        *g++ = delta_h[j];
    for (int k = 0; k < m.classes; ++k)
        for (int j = 0; j < m.hidden; ++j)
            *g++ = delta_out[k] * h[j];
    for (int k = 0; k < m.classes; ++k)
        *g++ = delta_out[k];
}

std::size_t mlp_param_count(const MlpModel& m) {
    return m.w1.size() + m.b1.size() + m.w2.size() + m.b2.size();
}

void check_training_set(const TrainingSet& ts) {
    if (ts.samples.empty())
        throw InvalidInput("training set is empty");
    if (ts.classes < 1)
        throw InvalidInput("training set declares no classes");
    for (const TrainingSample& s : ts.samples)
        if (s.label < 1 || s.label > ts.classes)
            throw InvalidInput("sample label " + std::to_string(s.label) +
                               " outside 1.." + std::to_string(ts.classes));
    ts.bounds.validate();
}

std::vector<std::vector<double>> normalized_inputs(const TrainingSet& ts) {
    std::vector<std::vector<double>> xs;
    xs.reserve(ts.samples.size());
    for (const TrainingSample& s : ts.samples)
        xs.push_back(normalize(s.x, ts.bounds));
    return xs;
}

} // namespace

MlpTrainResult train_mlp(const TrainingSet& ts, const TrainConfig& config, int hidden) {
    config.validate();
    check_training_set(ts);
    if (hidden < 1)
        throw InvalidParameter("hidden layer needs at least one unit");

    const int bands = ts.bands();
    const int classes = ts.classes;
    const std::size_t n = ts.samples.size();
    const std::vector<std::vector<double>> xs = normalized_inputs(ts);

    MlpModel m;
    m.bands = bands;
    m.classes = classes;
    m.hidden = hidden;
    m.norm = ts.bounds;
    m.w1.resize(static_cast<std::size_t>(hidden) * bands);
    m.b1.resize(hidden);
    m.w2.resize(static_cast<std::size_t>(classes) * hidden);
    m.b2.resize(classes);

    Rng rng(config.seed);
    const double r1 = 1.0 / std::sqrt(static_cast<double>(bands));
    for (double& w : m.w1)
        w = rng.uniform(-r1, r1);
    for (double& w : m.b1)
        w = rng.uniform(-r1, r1);
    const double r2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    for (double& w : m.w2)
        w = rng.uniform(-r2, r2);
    for (double& w : m.b2)
        w = rng.uniform(-r2, r2);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> h, out, delta_out, delta_h, target(classes);
    std::vector<double> grad(mlp_param_count(m));
    double mse = 0.0;
    int epoch = 0;
    for (; epoch < config.max_iters; ++epoch) {
        const double eta = config.eta(epoch);
        rng.shuffle(order);

        for (std::size_t s : order) {
            for (int k = 0; k < classes; ++k)
                target[k] = (ts.samples[s].label - 1 == k) ? kTargetHi : kTargetLo;
            mlp_gradient_into(m, xs[s], target, h, out, delta_out, delta_h, grad.data());
            const double* g = grad.data();
            for (double& w : m.w1)
                w -= eta * *g++;
            for (double& w : m.b1)
                w -= eta * *g++;
            for (double& w : m.w2)
                w -= eta * *g++;
            for (double& w : m.b2)
                w -= eta * *g++;
        }

        // Epoch error evaluated on the post-update weights.
        double sq = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            m.forward(xs[s], h, out);
            for (int k = 0; k < classes; ++k) {
                double target = (ts.samples[s].label - 1 == k) ? kTargetHi : kTargetLo;
                sq += (out[k] - target) * (out[k] - target);
            }
        }
        mse = sq / (static_cast<double>(n) * classes);
        if (!std::isfinite(mse))
            throw DivergenceError("training error became non-finite at epoch " +
                                  std::to_string(epoch + 1));
        if (mse <= config.eps) {
            ++epoch;
            break;
        }
    }

    return {std::move(m), mse, epoch};
}

std::vector<double> mlp_gradient(const MlpModel& model, const std::vector<double>& x_norm,
                                 const std::vector<double>& target) {
    if (static_cast<int>(x_norm.size()) != model.bands)
        throw InvalidInput("input length does not match the model bands");
    if (static_cast<int>(target.size()) != model.classes)
        throw InvalidInput("target length does not match the model classes");
    std::vector<double> h, out, delta_out, delta_h;
    std::vector<double> grad(mlp_param_count(model));
    mlp_gradient_into(model, x_norm, target, h, out, delta_out, delta_h, grad.data());
    return grad;
}

} // namespace dwiseg
