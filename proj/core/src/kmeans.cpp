#include "dwiseg/classifiers.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dwiseg/rng.hpp"

namespace dwiseg {

namespace {

double sq_dist(const double* a, const double* b, std::size_t dim) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        double d = a[i] - b[i];
        d2 += d * d;
    }
    return d2;
}

int nearest_center(const std::vector<double>& centers, int k, const double* x, std::size_t dim,
                   double* d2_out = nullptr) {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
        double d2 = sq_dist(&centers[static_cast<std::size_t>(j) * dim], x, dim);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = j;
        }
    }
    if (d2_out)
        *d2_out = best_d2;
    return best;
}

} // namespace

KmeansResult train_kmeans(const std::vector<std::vector<double>>& inputs, int k,
                          const KmeansConfig& config) {
    if (k < 1)
        throw InvalidParameter("k must be at least 1");
    if (static_cast<std::size_t>(k) > inputs.size())
        throw InvalidParameter("k = " + std::to_string(k) + " exceeds the sample count " +
                               std::to_string(inputs.size()));
    if (config.max_iters < 1)
        throw InvalidParameter("iteration cap must be at least 1");
    const std::size_t n = inputs.size();
    const std::size_t dim = inputs.front().size();
    for (const auto& x : inputs)
        if (x.size() != dim)
            throw InvalidInput("inconsistent input dimensions");

    Rng rng(config.seed);

    // Seed centers on distinct samples where possible.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);

    KmeansResult res;
    res.centers.reserve(static_cast<std::size_t>(k) * dim);
    int placed = 0;
    for (std::size_t s = 0; s < n && placed < k; ++s) {
        const std::vector<double>& x = inputs[order[s]];
        bool duplicate = false;
        for (int j = 0; j < placed && !duplicate; ++j)
            duplicate = sq_dist(&res.centers[static_cast<std::size_t>(j) * dim], x.data(), dim) == 0.0;
        if (!duplicate) {
            res.centers.insert(res.centers.end(), x.begin(), x.end());
            ++placed;
        }
    }
    // Fewer distinct samples than k: fill with repeats.
    for (std::size_t s = 0; placed < k; ++s, s %= n) {
        res.centers.insert(res.centers.end(), inputs[order[s]].begin(), inputs[order[s]].end());
        ++placed;
    }

    auto batch_qe = [&]() {
        double sum = 0.0;
        for (const auto& x : inputs) {
            double d2;
            nearest_center(res.centers, k, x.data(), dim, &d2);
            sum += d2;
        }
        return sum / static_cast<double>(n);
    };

    std::vector<int> wins(k);
    double tau = config.tau > 0.0 ? config.tau : std::max(1.0, config.max_iters / 2.0);

    for (int epoch = 0; epoch < config.max_iters; ++epoch) {
        double eta = config.eta0 / (1.0 + epoch / tau);
        rng.shuffle(order);
        std::fill(wins.begin(), wins.end(), 0);

        for (std::size_t s : order) {
            const double* x = inputs[s].data();
            int j = nearest_center(res.centers, k, x, dim);
            double* c = &res.centers[static_cast<std::size_t>(j) * dim];
            for (std::size_t i = 0; i < dim; ++i)
                c[i] += eta * (x[i] - c[i]);
            ++wins[j];
        }

        // Dead prototypes are re-seeded to the worst-quantized sample.
        for (int j = 0; j < k; ++j) {
            if (wins[j] > 0)
                continue;
            std::size_t farthest = 0;
            double worst = -1.0;
            for (std::size_t s = 0; s < n; ++s) {
                double d2;
                nearest_center(res.centers, k, inputs[s].data(), dim, &d2);
                if (d2 > worst) {
                    worst = d2;
                    farthest = s;
                }
            }
            double* c = &res.centers[static_cast<std::size_t>(j) * dim];
            for (std::size_t i = 0; i < dim; ++i)
                c[i] = inputs[farthest][i];
        }

        res.qe_history.push_back(batch_qe());
    }

    res.quantization_error = res.qe_history.back();
    return res;
}

} // namespace dwiseg
