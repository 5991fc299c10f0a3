#include "dwiseg/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dwiseg/rng.hpp"

namespace dwiseg {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

constexpr double kTargetLo = 0.1;
constexpr double kTargetHi = 0.9;

// Exponent tuples per total degree: pure powers first, then mixed products
// in lexicographic multiset order.
void monomials_of_degree(int n, int g, std::vector<std::vector<int>>& out) {
    if (g == 0) {
        out.push_back(std::vector<int>(n, 0));
        return;
    }
    for (int i = 0; i < n; ++i) {
        std::vector<int> e(n, 0);
        e[i] = g;
        out.push_back(std::move(e));
    }
    if (g < 2)
        return;
    // Remaining multisets {i1 <= ... <= ig} with at least two distinct
    // variables, enumerated lexicographically.
    std::vector<int> pick(g, 0);
    while (true) {
        // Advance to the next non-decreasing tuple.
        int pos = g - 1;
        while (pos >= 0 && pick[pos] == n - 1)
            --pos;
        if (pos < 0)
            break;
        ++pick[pos];
        for (int q = pos + 1; q < g; ++q)
            pick[q] = pick[pos];
        bool pure = std::all_of(pick.begin(), pick.end(), [&](int v) { return v == pick[0]; });
        if (pure)
            continue;
        std::vector<int> e(n, 0);
        for (int v : pick)
            ++e[v];
        out.push_back(std::move(e));
    }
}

std::vector<std::vector<int>> monomial_exponents(int n, int degree) {
    std::vector<std::vector<int>> exps;
    for (int g = 0; g <= degree; ++g)
        monomials_of_degree(n, g, exps);
    return exps;
}

} // namespace

int poly_term_count(int n, int degree) {
    if (n < 1 || degree < 0)
        throw InvalidParameter("monomial count needs n >= 1 and degree >= 0");
    // C(n + degree, degree)
    long long c = 1;
    for (int i = 1; i <= degree; ++i)
        c = c * (n + i) / i;
    return static_cast<int>(c);
}

std::vector<double> poly_expand(const std::vector<double>& x, int degree) {
    if (x.empty())
        throw InvalidInput("cannot expand an empty input");
    if (degree < 0)
        throw InvalidParameter("degree must be non-negative");
    const int n = static_cast<int>(x.size());
    std::vector<double> out;
    out.reserve(poly_term_count(n, degree));
    for (const std::vector<int>& e : monomial_exponents(n, degree)) {
        double term = 1.0;
        for (int i = 0; i < n; ++i)
            for (int p = 0; p < e[i]; ++p)
                term *= x[i];
        out.push_back(term);
    }
    return out;
}

int PolyModel::terms() const { return poly_term_count(bands, degree); }

void PolyModel::forward(const std::vector<double>& x, std::vector<double>& expanded,
                        std::vector<double>& out) const {
    expanded = poly_expand(x, degree);
    const int t = static_cast<int>(expanded.size());
    out.resize(classes);
    for (int k = 0; k < classes; ++k) {
        double z = 0.0;
        const double* w = &coeffs[static_cast<std::size_t>(k) * t];
        for (int m = 0; m < t; ++m)
            z += w[m] * expanded[m];
        out[k] = sigmoid(z);
    }
}

PolyTrainResult train_poly(const TrainingSet& ts, const TrainConfig& config, int degree) {
    config.validate();
    if (ts.samples.empty())
        throw InvalidInput("training set is empty");
    ts.bounds.validate();
    if (degree < 1)
        throw InvalidParameter("polynomial degree must be at least 1");
    for (const TrainingSample& s : ts.samples)
        if (s.label < 1 || s.label > ts.classes)
            throw InvalidInput("sample label outside the class range");

    const int bands = ts.bands();
    const int classes = ts.classes;
    const std::size_t n = ts.samples.size();

    std::vector<std::vector<double>> feats;
    feats.reserve(n);
    for (const TrainingSample& s : ts.samples)
        feats.push_back(poly_expand(normalize(s.x, ts.bounds), degree));
    const int t = static_cast<int>(feats.front().size());

    PolyModel m;
    m.bands = bands;
    m.classes = classes;
    m.degree = degree;
    m.norm = ts.bounds;
    m.coeffs.resize(static_cast<std::size_t>(classes) * t);

    Rng rng(config.seed);
    const double r = 1.0 / std::sqrt(static_cast<double>(t));
    for (double& w : m.coeffs)
        w = rng.uniform(-r, r);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    double mse = 0.0;
    int epoch = 0;
    for (; epoch < config.max_iters; ++epoch) {
        const double eta = config.eta(epoch);
        rng.shuffle(order);
        for (std::size_t s : order) {
            const std::vector<double>& phi = feats[s];
            // Delta rule, one output unit at a time. Matches poly_gradient.
            for (int k = 0; k < classes; ++k) {
                double* w = &m.coeffs[static_cast<std::size_t>(k) * t];
                double z = 0.0;
                for (int q = 0; q < t; ++q)
                    z += w[q] * phi[q];
                double o = sigmoid(z);
                double target = (ts.samples[s].label - 1 == k) ? kTargetHi : kTargetLo;
                double delta = (o - target) * o * (1.0 - o);
                for (int q = 0; q < t; ++q)
                    w[q] -= eta * delta * phi[q];
            }
        }

        double sq = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            for (int k = 0; k < classes; ++k) {
                const double* w = &m.coeffs[static_cast<std::size_t>(k) * t];
                double z = 0.0;
                for (int q = 0; q < t; ++q)
                    z += w[q] * feats[s][q];
                double o = sigmoid(z);
                double target = (ts.samples[s].label - 1 == k) ? kTargetHi : kTargetLo;
                sq += (o - target) * (o - target);
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

std::vector<double> poly_gradient(const PolyModel& model, const std::vector<double>& x_norm,
                                  const std::vector<double>& target) {
    if (static_cast<int>(x_norm.size()) != model.bands)
        throw InvalidInput("input length does not match the model bands");
    if (static_cast<int>(target.size()) != model.classes)
        throw InvalidInput("target length does not match the model classes");
    std::vector<double> phi, out;
    model.forward(x_norm, phi, out);
    const int t = static_cast<int>(phi.size());
    std::vector<double> grad(model.coeffs.size());
    for (int k = 0; k < model.classes; ++k) {
        double delta = (out[k] - target[k]) * out[k] * (1.0 - out[k]);
        for (int q = 0; q < t; ++q)
            grad[static_cast<std::size_t>(k) * t + q] = delta * phi[q];
    }
    return grad;
}

} // namespace dwiseg
