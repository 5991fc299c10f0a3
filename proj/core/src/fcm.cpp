#include "dwiseg/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dwiseg/rng.hpp"

namespace dwiseg {

namespace {

// Memberships of one value against the centroids; handles coincidence with a
// centroid by a crisp assignment. Returns the winning cluster.
int memberships(double x, const std::vector<double>& v, double exponent, std::vector<double>& u) {
    const int c = static_cast<int>(v.size());
    u.assign(c, 0.0);
    for (int i = 0; i < c; ++i) {
        if (x == v[i]) {
            u[i] = 1.0;
            return i;
        }
    }
    double denom = 0.0;
    for (int i = 0; i < c; ++i) {
        double d2 = (x - v[i]) * (x - v[i]);
        u[i] = exponent == 1.0 ? 1.0 / d2 : 1.0 / std::pow(d2, exponent);
        denom += u[i];
    }
    int best = 0;
    for (int i = 0; i < c; ++i) {
        u[i] /= denom;
        if (u[i] > u[best])
            best = i;
    }
    return best;
}

} // namespace

FcmResult fcm_cluster(const Volume& map, const FcmConfig& config) {
    if (config.c < 1)
        throw InvalidParameter("cluster count must be at least 1");
    if (!(config.fuzzifier > 1.0))
        throw InvalidParameter("fuzzifier must exceed 1");
    if (config.max_iters < 1)
        throw InvalidParameter("iteration cap must be at least 1");
    const std::size_t n = map.data.size();
    if (n < static_cast<std::size_t>(config.c))
        throw InvalidParameter("fewer voxels than clusters");

    const int c = config.c;
    const double mf = config.fuzzifier;
    const double exponent = 1.0 / (mf - 1.0); // applied to squared distances
    // Replicating the scalar across three coordinates multiplies every
    // squared distance by 3; memberships and centroids are unchanged, only
    // the reported objective scales.
    const double dist_scale = config.replicate_scalar ? 3.0 : 1.0;

    // Seed centroids on distinct data values.
    std::vector<double> centroids;
    {
        Rng rng(config.seed);
        for (int attempt = 0; attempt < 64 * c && static_cast<int>(centroids.size()) < c;
             ++attempt) {
            double v = map.data[rng.below(n)];
            if (std::find(centroids.begin(), centroids.end(), v) == centroids.end())
                centroids.push_back(v);
        }
        if (static_cast<int>(centroids.size()) < c) {
            // Sparse value sets: scan everything.
            for (std::size_t i = 0; i < n && static_cast<int>(centroids.size()) < c; ++i)
                if (std::find(centroids.begin(), centroids.end(), map.data[i]) ==
                    centroids.end())
                    centroids.push_back(map.data[i]);
        }
        if (static_cast<int>(centroids.size()) < c)
            throw DegenerateData("fewer than " + std::to_string(c) +
                                 " distinct values to cluster");
    }

    FcmResult res;
    res.cluster_index.assign(n, 0);
    std::vector<double> u(c);
    std::vector<double> num(c), den(c);

    double lo = *std::min_element(map.data.begin(), map.data.end());
    double hi = *std::max_element(map.data.begin(), map.data.end());
    const double collide_eps = std::max(hi - lo, 1.0) * 1e-13;

    int iter = 0;
    for (; iter < config.max_iters; ++iter) {
        std::fill(num.begin(), num.end(), 0.0);
        std::fill(den.begin(), den.end(), 0.0);
        double objective = 0.0;

        for (std::size_t s = 0; s < n; ++s) {
            double x = map.data[s];
            res.cluster_index[s] = memberships(x, centroids, exponent, u);
            for (int i = 0; i < c; ++i) {
                double um = mf == 2.0 ? u[i] * u[i] : std::pow(u[i], mf);
                num[i] += um * x;
                den[i] += um;
                double d = x - centroids[i];
                objective += um * d * d * dist_scale;
            }
        }
        res.objective_history.push_back(objective);

        double shift = 0.0;
        for (int i = 0; i < c; ++i) {
            double next = den[i] > 0.0 ? num[i] / den[i] : centroids[i];
            shift = std::max(shift, std::abs(next - centroids[i]));
            centroids[i] = next;
        }

        // Collapsed centroids: push one back out to the worst-covered value.
        bool repaired = false;
        for (int i = 0; i < c && !repaired; ++i) {
            for (int j = i + 1; j < c && !repaired; ++j) {
                if (std::abs(centroids[i] - centroids[j]) < collide_eps) {
                    double farthest = centroids[j];
                    double worst = -1.0;
                    for (std::size_t s = 0; s < n; ++s) {
                        double best = std::numeric_limits<double>::infinity();
                        for (int l = 0; l < c; ++l)
                            best = std::min(best, std::abs(map.data[s] - centroids[l]));
                        if (best > worst) {
                            worst = best;
                            farthest = map.data[s];
                        }
                    }
                    if (worst < collide_eps)
                        throw DegenerateData("centroids collapsed and no distinct value is left");
                    centroids[j] = farthest;
                    repaired = true;
                }
            }
        }

        if (!repaired && shift < config.tol) {
            ++iter;
            break;
        }
    }
    res.iters = iter;

    // Final hard assignment against the converged centroids.
    for (std::size_t s = 0; s < n; ++s)
        res.cluster_index[s] = memberships(map.data[s], centroids, exponent, u);

    // Rank clusters by centroid value: highest maps to fluid, lowest to
    // background (classes 1..c).
    std::vector<int> rank(c);
    std::iota(rank.begin(), rank.end(), 0);
    std::sort(rank.begin(), rank.end(),
              [&](int a, int b) { return centroids[a] > centroids[b]; });
    std::vector<std::uint8_t> cluster_to_class(c);
    for (int r = 0; r < c; ++r)
        cluster_to_class[rank[r]] = static_cast<std::uint8_t>(r + 1);

    res.model.centroids = std::move(centroids);
    res.model.fuzzifier = mf;
    res.model.cluster_to_class = std::move(cluster_to_class);
    res.model.replicate_scalar = config.replicate_scalar;

    res.labels = LabelVolume(map.grid);
    for (std::size_t s = 0; s < n; ++s)
        res.labels.data[s] = res.model.cluster_to_class[res.cluster_index[s]];
    return res;
}

std::vector<double> fcm_memberships(double value, const std::vector<double>& centroids,
                                    double fuzzifier) {
    if (centroids.empty())
        throw InvalidParameter("no centroids");
    if (!(fuzzifier > 1.0))
        throw InvalidParameter("fuzzifier must exceed 1");
    std::vector<double> u;
    memberships(value, centroids, 1.0 / (fuzzifier - 1.0), u);
    return u;
}

std::vector<std::uint8_t> assign_clusters_by_majority(
    const std::vector<int>& cluster_index, int c,
    const std::map<std::uint8_t, LabelVolume>& reference_masks) {
    if (c < 1)
        throw InvalidParameter("cluster count must be at least 1");
    std::vector<std::map<std::uint8_t, std::size_t>> votes(c);
    for (const auto& [label, mask] : reference_masks) {
        if (mask.data.size() != cluster_index.size())
            throw InvalidInput("reference mask size does not match the clustered volume");
        for (std::size_t s = 0; s < mask.data.size(); ++s)
            if (mask.data[s])
                ++votes[cluster_index[s]][label];
    }
    std::vector<std::uint8_t> map_out(c, 0);
    for (int i = 0; i < c; ++i) {
        std::size_t best = 0;
        for (const auto& [label, count] : votes[i]) {
            if (count > best) {
                best = count;
                map_out[i] = label;
            }
        }
        if (best == 0)
            throw MissingClass("cluster " + std::to_string(i) +
                               " captured no reference-labelled voxels");
    }
    return map_out;
}

} // namespace dwiseg
