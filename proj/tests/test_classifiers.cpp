#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dwiseg/classifiers.hpp"
#include "dwiseg/features.hpp"
#include "dwiseg/rng.hpp"

using namespace dwiseg;

namespace {

// Two gaussian blobs in two bands, labels 1 and 2.
TrainingSet two_blobs(double separation, double spread, int per_class, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<TrainingSample> samples;
    for (int i = 0; i < per_class; ++i) {
        samples.push_back({{rng.normal() * spread, rng.normal() * spread}, 1});
        samples.push_back(
            {{separation + rng.normal() * spread, separation + rng.normal() * spread}, 2});
    }
    return TrainingSet::from_samples(std::move(samples), 2);
}

template <typename Model>
double training_accuracy(const Model& model, const TrainingSet& ts) {
    std::vector<double> scratch, out;
    int correct = 0;
    for (const TrainingSample& s : ts.samples) {
        model.forward(normalize(s.x, ts.bounds), scratch, out);
        int best = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
        correct += best + 1 == s.label;
    }
    return static_cast<double>(correct) / static_cast<double>(ts.samples.size());
}

// Central finite differences over every parameter of a loss functional.
template <typename GetSet, typename Loss>
double max_gradient_error(const std::vector<double>& analytic, std::size_t count, GetSet&& param,
                          Loss&& loss, double h = 1e-5) {
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        double saved = param(i, 0.0, false);
        param(i, saved + h, true);
        double hi = loss();
        param(i, saved - h, true);
        double lo = loss();
        param(i, saved, true);
        double numeric = (hi - lo) / (2.0 * h);
        double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-5});
        worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    return worst;
}

double sample_loss(const std::vector<double>& out, const std::vector<double>& target) {
    double l = 0.0;
    for (std::size_t k = 0; k < out.size(); ++k)
        l += 0.5 * (out[k] - target[k]) * (out[k] - target[k]);
    return l;
}

} // namespace

// ---------------------------------------------------------------------------
// Monomial expansion
// ---------------------------------------------------------------------------

TEST_CASE("monomial expansion order and values") {
    CHECK(poly_expand({0.0, 0.0, 0.0}) ==
          std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(poly_expand({2.0, 3.0, 5.0}) ==
          std::vector<double>{1, 2, 3, 5, 4, 9, 25, 6, 10, 15});
    CHECK(poly_expand({1.0, 1.0, 1.0}) == std::vector<double>(10, 1.0));
    CHECK_THROWS_AS(poly_expand({}), InvalidInput);
}

TEST_CASE("expansion size matches the closed-form count") {
    for (int n = 1; n <= 4; ++n) {
        for (int d = 0; d <= 4; ++d) {
            std::vector<double> x(n, 0.5);
            CHECK(static_cast<int>(poly_expand(x, d).size()) == poly_term_count(n, d));
        }
    }
    CHECK(poly_term_count(3, 2) == 10);
}

// ---------------------------------------------------------------------------
// Gradients against central finite differences
// ---------------------------------------------------------------------------

TEST_CASE("mlp backpropagation matches finite differences") {
    Rng rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        MlpModel m;
        m.bands = 3;
        m.hidden = 2;
        m.classes = 2;
        m.norm = NormBounds{{0, 0, 0}, {1, 1, 1}};
        m.w1.resize(6);
        m.b1.resize(2);
        m.w2.resize(4);
        m.b2.resize(2);
        for (double& w : m.w1) w = rng.uniform(-2.0, 2.0);
        for (double& w : m.b1) w = rng.uniform(-2.0, 2.0);
        for (double& w : m.w2) w = rng.uniform(-2.0, 2.0);
        for (double& w : m.b2) w = rng.uniform(-2.0, 2.0);
        std::vector<double> x{rng.uniform01(), rng.uniform01(), rng.uniform01()};
        std::vector<double> target{rng.uniform01(), rng.uniform01()};

        std::vector<double> grad = mlp_gradient(m, x, target);
        const std::size_t count = grad.size();
        auto param = [&](std::size_t i, double v, bool set) -> double {
            std::size_t off = i;
            for (std::vector<double>* block : {&m.w1, &m.b1, &m.w2, &m.b2}) {
                if (off < block->size()) {
                    double old = (*block)[off];
                    if (set)
                        (*block)[off] = v;
                    return old;
                }
                off -= block->size();
            }
            FAIL("parameter index out of range");
            return 0.0;
        };
        auto loss = [&]() {
            std::vector<double> h, out;
            m.forward(x, h, out);
            return sample_loss(out, target);
        };
        worst = std::max(worst, max_gradient_error(grad, count, param, loss));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("polynomial-net gradient matches finite differences") {
    Rng rng(6);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        PolyModel m;
        m.bands = 3;
        m.classes = 3;
        m.degree = 2;
        m.norm = NormBounds{{0, 0, 0}, {1, 1, 1}};
        m.coeffs.resize(static_cast<std::size_t>(m.classes) * m.terms());
        for (double& w : m.coeffs)
            w = rng.uniform(-2.0, 2.0);
        std::vector<double> x{rng.uniform01(), rng.uniform01(), rng.uniform01()};
        std::vector<double> target{rng.uniform01(), rng.uniform01(), rng.uniform01()};

        std::vector<double> grad = poly_gradient(m, x, target);
        auto param = [&](std::size_t i, double v, bool set) -> double {
            double old = m.coeffs[i];
            if (set)
                m.coeffs[i] = v;
            return old;
        };
        auto loss = [&]() {
            std::vector<double> phi, out;
            m.forward(x, phi, out);
            return sample_loss(out, target);
        };
        worst = std::max(worst, max_gradient_error(grad, grad.size(), param, loss));
    }
    CHECK(worst < 1e-4);
}

// ---------------------------------------------------------------------------
// MLP training
// ---------------------------------------------------------------------------

TEST_CASE("single-class training locks the argmax") {
    std::vector<TrainingSample> samples;
    Rng rng(3);
    for (int i = 0; i < 40; ++i)
        samples.push_back({{rng.uniform01(), rng.uniform01()}, 2});
    TrainingSet ts = TrainingSet::from_samples(std::move(samples), 3);

    TrainConfig cfg{0.2, 0.01, 200, 11};
    MlpTrainResult r = train_mlp(ts, cfg, 8);
    CHECK(training_accuracy(r.model, ts) == 1.0);

    PolyTrainResult pr = train_poly(ts, cfg);
    CHECK(training_accuracy(pr.model, ts) == 1.0);
}

TEST_CASE("mlp separates well-spaced blobs like the nearest-mean oracle") {
    TrainingSet ts = two_blobs(1.0, 1.0 / 8.0, 60, 21); // separation >= 6 sigma
    TrainConfig cfg{0.2, 0.005, 500, 9};
    MlpTrainResult r = train_mlp(ts, cfg, 12);
    CHECK(training_accuracy(r.model, ts) == 1.0);

    // Brute-force oracle: class means from the raw samples.
    double m1x = 0, m1y = 0, m2x = 0, m2y = 0;
    int n1 = 0, n2 = 0;
    for (const TrainingSample& s : ts.samples) {
        if (s.label == 1) { m1x += s.x[0]; m1y += s.x[1]; ++n1; }
        else { m2x += s.x[0]; m2y += s.x[1]; ++n2; }
    }
    m1x /= n1; m1y /= n1; m2x /= n2; m2y /= n2;
    std::vector<double> scratch, out;
    for (const TrainingSample& s : ts.samples) {
        double d1 = std::hypot(s.x[0] - m1x, s.x[1] - m1y);
        double d2 = std::hypot(s.x[0] - m2x, s.x[1] - m2y);
        int oracle = d1 <= d2 ? 1 : 2;
        r.model.forward(normalize(s.x, ts.bounds), scratch, out);
        int got = out[0] >= out[1] ? 1 : 2;
        CHECK(got == oracle);
    }
}

TEST_CASE("training is deterministic per seed") {
    TrainingSet ts = two_blobs(1.0, 0.2, 30, 40);
    TrainConfig cfg{0.2, 0.01, 100, 77};
    MlpTrainResult a = train_mlp(ts, cfg, 6);
    MlpTrainResult b = train_mlp(ts, cfg, 6);
    CHECK(a.model.w1 == b.model.w1);
    CHECK(a.model.w2 == b.model.w2);
    CHECK(a.model.b1 == b.model.b1);
    CHECK(a.model.b2 == b.model.b2);
    CHECK(a.final_mse == b.final_mse);
    CHECK(a.epochs == b.epochs);

    cfg.seed = 78;
    MlpTrainResult c = train_mlp(ts, cfg, 6);
    CHECK(a.model.w1 != c.model.w1);

    PolyTrainResult pa = train_poly(ts, cfg);
    PolyTrainResult pb = train_poly(ts, cfg);
    CHECK(pa.model.coeffs == pb.model.coeffs);

    RbfConfig rc;
    rc.k = 4;
    rc.seed = 12;
    RbfTrainResult ra = train_rbf(ts, rc);
    RbfTrainResult rb = train_rbf(ts, rc);
    CHECK(ra.model.centers == rb.model.centers);
    CHECK(ra.model.w_out == rb.model.w_out);
}

TEST_CASE("non-finite inputs surface as a divergence error") {
    TrainingSet ts = two_blobs(1.0, 0.2, 10, 1);
    ts.samples[0].x[0] = std::nan("");
    TrainConfig cfg{0.2, 0.01, 50, 5};
    CHECK_THROWS_AS(train_mlp(ts, cfg, 4), DivergenceError);
    CHECK_THROWS_AS(train_poly(ts, cfg), DivergenceError);
}

// ---------------------------------------------------------------------------
// k-means and RBF
// ---------------------------------------------------------------------------

TEST_CASE("k equal to the distinct sample count quantizes exactly") {
    std::vector<std::vector<double>> points{{0, 0}, {1, 0}, {0, 1}, {5, 5}, {9, 2}};
    KmeansConfig cfg;
    cfg.seed = 4;
    KmeansResult r = train_kmeans(points, 5, cfg);
    CHECK(r.quantization_error == doctest::Approx(0.0).epsilon(1e-24));
}

TEST_CASE("two blobs quantize to their means") {
    Rng rng(8);
    std::vector<std::vector<double>> points;
    double ax = 0, ay = 0, bx = 0, by = 0;
    for (int i = 0; i < 200; ++i) {
        double x = rng.normal() * 0.02, y = rng.normal() * 0.02;
        points.push_back({x, y});
        ax += x; ay += y;
        double u = 1.0 + rng.normal() * 0.02, v = 1.0 + rng.normal() * 0.02;
        points.push_back({u, v});
        bx += u; by += v;
    }
    ax /= 200; ay /= 200; bx /= 200; by /= 200;

    KmeansConfig cfg;
    cfg.seed = 15;
    KmeansResult r = train_kmeans(points, 2, cfg);
    // Identify which center is which blob; the means are the fixed point.
    double* c0 = &r.centers[0];
    double* c1 = &r.centers[2];
    if (c0[0] > c1[0])
        std::swap(c0, c1);
    CHECK(std::abs(c0[0] - ax) < 0.05);
    CHECK(std::abs(c0[1] - ay) < 0.05);
    CHECK(std::abs(c1[0] - bx) < 0.05);
    CHECK(std::abs(c1[1] - by) < 0.05);

    // Batch-evaluated quantization error descends to the blob variance and
    // stays there. Sequential updates jitter the centers within a band
    // proportional to the current learning rate, so the checkpoint sequence
    // is non-increasing up to that noise and never drifts upward overall.
    for (std::size_t i = 1; i < r.qe_history.size(); ++i) {
        double eta = cfg.eta0 / (1.0 + static_cast<double>(i) / (cfg.max_iters / 2.0));
        CHECK(r.qe_history[i] <= r.qe_history[i - 1] * (1.0 + 2.0 * eta));
    }
    CHECK(r.qe_history.back() <= r.qe_history.front() * 1.02);
    double blob_var = 2.0 * 0.02 * 0.02; // two coordinates at sd 0.02
    CHECK(r.qe_history.back() < 2.0 * blob_var);
}

TEST_CASE("k larger than the sample count is rejected") {
    std::vector<std::vector<double>> points{{0.0}, {1.0}};
    CHECK_THROWS_AS(train_kmeans(points, 3, {}), InvalidParameter);
}

TEST_CASE("rbf activations live in (0,1] and peak at the centers") {
    TrainingSet ts = two_blobs(1.0, 0.1, 20, 33);
    RbfConfig cfg;
    cfg.k = 4;
    cfg.seed = 2;
    RbfTrainResult r = train_rbf(ts, cfg);

    std::vector<double> phi;
    std::vector<double> center(r.model.centers.begin(), r.model.centers.begin() + 2);
    r.model.activations(center, phi);
    CHECK(phi[0] == 1.0);
    for (const TrainingSample& s : ts.samples) {
        r.model.activations(normalize(s.x, ts.bounds), phi);
        for (double a : phi) {
            CHECK(a > 0.0);
            CHECK(a <= 1.0);
        }
    }
    for (double w : r.model.widths)
        CHECK(w > 0.0);
}

TEST_CASE("samples sitting on k distinct prototypes classify perfectly") {
    // Four prototype points, one class each is too many classes for the
    // decision rule to be interesting; use two classes on four prototypes.
    std::vector<TrainingSample> samples;
    for (int rep = 0; rep < 10; ++rep) {
        samples.push_back({{0.0, 0.0}, 1});
        samples.push_back({{1.0, 1.0}, 1});
        samples.push_back({{0.0, 1.0}, 2});
        samples.push_back({{1.0, 0.0}, 2});
    }
    TrainingSet ts = TrainingSet::from_samples(std::move(samples), 2);
    RbfConfig cfg;
    cfg.k = 4;
    cfg.seed = 9;
    RbfTrainResult r = train_rbf(ts, cfg);
    CHECK(training_accuracy(r.model, ts) == 1.0);
}

TEST_CASE("gaussian features linearize the xor pattern") {
    Rng rng(14);
    std::vector<TrainingSample> samples;
    for (int i = 0; i < 80; ++i) {
        auto jx = [&]() { return rng.normal() * 0.05; };
        samples.push_back({{0.0 + jx(), 0.0 + jx()}, 1});
        samples.push_back({{1.0 + jx(), 1.0 + jx()}, 1});
        samples.push_back({{0.0 + jx(), 1.0 + jx()}, 2});
        samples.push_back({{1.0 + jx(), 0.0 + jx()}, 2});
    }
    TrainingSet ts = TrainingSet::from_samples(std::move(samples), 2);
    RbfConfig cfg;
    cfg.k = 4;
    cfg.seed = 5;
    RbfTrainResult r = train_rbf(ts, cfg);
    CHECK(training_accuracy(r.model, ts) >= 0.99);
}

// ---------------------------------------------------------------------------
// Polynomial network training
// ---------------------------------------------------------------------------

TEST_CASE("degree-2 terms separate circular classes") {
    Rng rng(26);
    std::vector<TrainingSample> samples;
    std::size_t inside = 0, outside = 0;
    while (inside < 150 || outside < 150) {
        double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
        double r2 = x * x + y * y;
        if (r2 < 0.2 && inside < 150) {
            samples.push_back({{x, y}, 1});
            ++inside;
        } else if (r2 > 0.3 && r2 < 1.0 && outside < 150) {
            samples.push_back({{x, y}, 2});
            ++outside;
        }
    }
    TrainingSet ts = TrainingSet::from_samples(std::move(samples), 2);
    TrainConfig cfg{0.5, 0.005, 2000, 3};
    PolyTrainResult r = train_poly(ts, cfg);
    CHECK(training_accuracy(r.model, ts) >= 0.99);
}

TEST_CASE("quadratic features do not hurt linearly separable data") {
    // Test-only oracle: a single-layer perceptron on the raw features.
    auto raw_perceptron_accuracy = [](const TrainingSet& ts, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<double> w{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        double b = rng.uniform(-0.5, 0.5);
        for (int epoch = 0; epoch < 200; ++epoch) {
            double eta = 0.1 / (1.0 + epoch / 100.0);
            for (const TrainingSample& s : ts.samples) {
                std::vector<double> x = normalize(s.x, ts.bounds);
                double o = 1.0 / (1.0 + std::exp(-(w[0] * x[0] + w[1] * x[1] + b)));
                double target = s.label == 1 ? 0.9 : 0.1;
                double delta = (o - target) * o * (1.0 - o);
                w[0] -= eta * delta * x[0];
                w[1] -= eta * delta * x[1];
                b -= eta * delta;
            }
        }
        int correct = 0;
        for (const TrainingSample& s : ts.samples) {
            std::vector<double> x = normalize(s.x, ts.bounds);
            double o = 1.0 / (1.0 + std::exp(-(w[0] * x[0] + w[1] * x[1] + b)));
            correct += (o >= 0.5 ? 1 : 2) == s.label;
        }
        return static_cast<double>(correct) / ts.samples.size();
    };

    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        TrainingSet ts = two_blobs(1.0, 0.22, 50, seed);
        TrainConfig cfg{0.1, 0.005, 200, seed};
        PolyTrainResult r = train_poly(ts, cfg);
        CHECK(training_accuracy(r.model, ts) >= raw_perceptron_accuracy(ts, seed));
    }
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

TEST_CASE("classification maps training samples of an interpolating model") {
    std::vector<TrainingSample> samples;
    for (int rep = 0; rep < 5; ++rep) {
        samples.push_back({{10.0, 100.0}, 1});
        samples.push_back({{20.0, 300.0}, 2});
        samples.push_back({{30.0, 200.0}, 3});
    }
    TrainingSet ts = TrainingSet::from_samples(std::move(samples), 3);
    RbfConfig cfg;
    cfg.k = 3;
    cfg.seed = 7;
    RbfTrainResult r = train_rbf(ts, cfg);

    Grid3 g{3, 1, 1};
    Volume band0(g), band1(g);
    band0.data = {10.0, 20.0, 30.0};
    band1.data = {100.0, 300.0, 200.0};
    LabelVolume labels = classify(r.model, stack_bands({band0, band1}));
    CHECK(labels.data == std::vector<std::uint8_t>{1, 2, 3});

    // Pure per-voxel function: permuting voxels permutes labels identically.
    Volume p0(g), p1(g);
    p0.data = {30.0, 10.0, 20.0};
    p1.data = {200.0, 100.0, 300.0};
    LabelVolume permuted = classify(r.model, stack_bands({p0, p1}));
    CHECK(permuted.data == std::vector<std::uint8_t>{3, 1, 2});

    CHECK_THROWS_AS(classify(r.model, stack_bands({band0})), InvalidInput);
}

TEST_CASE("argmax is invariant under strictly increasing output transforms") {
    TrainingSet ts = two_blobs(1.0, 0.2, 20, 19);
    TrainConfig cfg{0.2, 0.01, 100, 23};
    MlpTrainResult r = train_mlp(ts, cfg, 6);

    Rng rng(91);
    std::vector<double> scratch, out;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x{rng.uniform01(), rng.uniform01()};
        r.model.forward(x, scratch, out);
        int base = static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin());
        std::vector<double> warped(out.size());
        for (std::size_t k = 0; k < out.size(); ++k)
            warped[k] = std::tanh(3.0 * out[k]) + 2.0; // strictly increasing
        int after = static_cast<int>(
            std::max_element(warped.begin(), warped.end()) - warped.begin());
        CHECK(base == after);
    }
}

// ---------------------------------------------------------------------------
// Fuzzy c-means
// ---------------------------------------------------------------------------

TEST_CASE("single-cluster clustering returns the data mean") {
    Volume v({10, 10, 1});
    Rng rng(3);
    double mean = 0.0;
    for (double& x : v.data) {
        x = rng.uniform(0.0, 4.0);
        mean += x;
    }
    mean /= static_cast<double>(v.data.size());

    FcmConfig cfg;
    cfg.c = 1;
    cfg.seed = 6;
    FcmResult r = fcm_cluster(v, cfg);
    CHECK(r.model.centroids[0] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(fcm_memberships(1.7, r.model.centroids, 2.0) == std::vector<double>{1.0});
}

TEST_CASE("two delta-separated value groups converge to the group values") {
    Volume v({20, 20, 1});
    for (std::size_t i = 0; i < v.data.size(); ++i)
        v.data[i] = i % 2 == 0 ? 1.0 : 3.0;
    FcmConfig cfg;
    cfg.c = 2;
    cfg.seed = 17;
    FcmResult r = fcm_cluster(v, cfg);
    std::vector<double> c = r.model.centroids;
    std::sort(c.begin(), c.end());
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(c[1] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("objective is non-increasing and memberships sum to one") {
    Volume v({16, 16, 2});
    Rng rng(44);
    for (double& x : v.data)
        x = rng.uniform01() < 0.5 ? rng.normal() * 0.1 : 3.0 + rng.normal() * 0.2;

    FcmConfig cfg;
    cfg.c = 3;
    cfg.seed = 2;
    FcmResult r = fcm_cluster(v, cfg);
    REQUIRE(!r.objective_history.empty());
    for (std::size_t i = 1; i < r.objective_history.size(); ++i)
        CHECK(r.objective_history[i] <= r.objective_history[i - 1] * (1.0 + 1e-12));

    // Same seed, same partition, bit for bit.
    FcmResult again = fcm_cluster(v, cfg);
    CHECK(again.model.centroids == r.model.centroids);
    CHECK(again.labels.data == r.labels.data);

    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> u = fcm_memberships(rng.uniform(-1.0, 4.0), r.model.centroids, 2.0);
        double sum = std::accumulate(u.begin(), u.end(), 0.0);
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        for (double ui : u)
            CHECK(ui >= 0.0);
    }
}

TEST_CASE("clusters rank by centroid: highest is fluid, lowest background") {
    Volume v({12, 12, 1});
    for (std::size_t i = 0; i < v.data.size(); ++i)
        v.data[i] = (i % 3 == 0) ? 3.0e-3 : (i % 3 == 1 ? 0.8e-3 : 0.0);
    FcmConfig cfg;
    cfg.c = 3;
    cfg.seed = 8;
    FcmResult r = fcm_cluster(v, cfg);
    for (std::size_t i = 0; i < v.data.size(); ++i) {
        if (v.data[i] == 3.0e-3)
            CHECK(r.labels.data[i] == label_of(Tissue::Csf));
        else if (v.data[i] == 0.8e-3)
            CHECK(r.labels.data[i] == label_of(Tissue::Matter));
        else
            CHECK(r.labels.data[i] == label_of(Tissue::Background));
    }
    // classify() with the trained model reproduces the clustering labels.
    CHECK(classify(r.model, v).data == r.labels.data);
}

TEST_CASE("degenerate data cannot host more clusters than values") {
    Volume v({4, 4, 1}, 2.0);
    FcmConfig cfg;
    cfg.c = 2;
    CHECK_THROWS_AS(fcm_cluster(v, cfg), DegenerateData);
}

TEST_CASE("replicated-coordinate form scales only the objective") {
    Volume v({10, 10, 1});
    Rng rng(12);
    for (double& x : v.data)
        x = rng.uniform01();
    FcmConfig cfg;
    cfg.c = 2;
    cfg.seed = 33;
    FcmResult plain = fcm_cluster(v, cfg);
    cfg.replicate_scalar = true;
    FcmResult replicated = fcm_cluster(v, cfg);
    CHECK(plain.model.centroids == replicated.model.centroids);
    CHECK(plain.labels.data == replicated.labels.data);
    REQUIRE(plain.objective_history.size() == replicated.objective_history.size());
    for (std::size_t i = 0; i < plain.objective_history.size(); ++i)
        CHECK(replicated.objective_history[i] ==
              doctest::Approx(3.0 * plain.objective_history[i]).epsilon(1e-12));
}

TEST_CASE("majority vote can override the rank map") {
    std::vector<int> cluster_index{0, 0, 1, 1, 2, 2};
    Grid3 g{6, 1, 1};
    LabelVolume csf(g), matter(g), bg(g);
    csf.data = {0, 0, 1, 1, 0, 0};
    matter.data = {1, 1, 0, 0, 0, 0};
    bg.data = {0, 0, 0, 0, 1, 1};
    auto map = assign_clusters_by_majority(cluster_index, 3,
                                           {{1, csf}, {2, matter}, {3, bg}});
    CHECK(map == std::vector<std::uint8_t>{2, 1, 3});
}
