#include <doctest.h>

#include "dwiseg/features.hpp"
#include "dwiseg/rng.hpp"

using namespace dwiseg;

namespace {

Volume filled(Grid3 g, double base) {
    Volume v(g);
    for (std::size_t i = 0; i < v.data.size(); ++i)
        v.data[i] = base + static_cast<double>(i);
    return v;
}

} // namespace

TEST_CASE("stacking preserves bands and rejects mismatched grids") {
    Grid3 g{4, 3, 2};
    Volume a = filled(g, 0.0), b = filled(g, 100.0), c = filled(g, 200.0);
    MultispectralVolume ms = stack_bands({a, b, c});
    REQUIRE(ms.band_count() == 3);
    CHECK(ms.bands[0].data == a.data);
    CHECK(ms.bands[1].data == b.data);
    CHECK(ms.bands[2].data == c.data);

    CHECK_THROWS_AS(stack_bands({a, Volume({4, 3, 3})}), InvalidInput);
    CHECK_THROWS_AS(stack_bands({}), InvalidInput);
}

TEST_CASE("identical bands give equal-component feature vectors") {
    Grid3 g{3, 3, 1};
    Volume v = filled(g, 5.0);
    MultispectralVolume ms = stack_bands({v, v, v});
    for (std::size_t i = 0; i < g.voxels(); ++i) {
        CHECK(ms.bands[0].data[i] == ms.bands[1].data[i]);
        CHECK(ms.bands[1].data[i] == ms.bands[2].data[i]);
    }
}

TEST_CASE("normalization maps bounds to the unit interval") {
    NormBounds b{{0.0, 10.0}, {4.0, 30.0}};
    CHECK(normalize({0.0, 10.0}, b) == std::vector<double>{0.0, 0.0});
    CHECK(normalize({4.0, 30.0}, b) == std::vector<double>{1.0, 1.0});
    CHECK(normalize({2.0, 20.0}, b) == std::vector<double>{0.5, 0.5});
    // Outside the bounds clamps.
    CHECK(normalize({-5.0, 50.0}, b) == std::vector<double>{0.0, 1.0});

    NormBounds degenerate{{1.0, 2.0}, {1.0, 5.0}};
    CHECK_THROWS_AS(normalize({1.0, 3.0}, degenerate), InvalidParameter);
    CHECK_THROWS_AS(normalize({1.0}, b), InvalidInput);
}

TEST_CASE("normalization is monotone per band and idempotent in range") {
    NormBounds unit{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x{rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 2.0),
                              rng.uniform(-1.0, 2.0)};
        std::vector<double> y{x[0] + rng.uniform01(), x[1] + rng.uniform01(),
                              x[2] + rng.uniform01()};
        std::vector<double> nx = normalize(x, unit), ny = normalize(y, unit);
        for (int i = 0; i < 3; ++i)
            CHECK(nx[i] <= ny[i]);
        CHECK(normalize(nx, unit) == nx);
    }
}

TEST_CASE("training set assembly from disjoint masks") {
    Grid3 g{4, 4, 2};
    Volume b0 = filled(g, 0.0), b1 = filled(g, 100.0), b2 = filled(g, 1000.0);
    MultispectralVolume ms = stack_bands({b0, b1, b2});

    LabelVolume csf(g), matter(g), bg(g);
    csf.at(1, 1, 1) = 1;
    matter.at(2, 1, 1) = 1;
    bg.at(0, 0, 1) = 1;
    std::map<std::uint8_t, LabelVolume> masks{{1, csf}, {2, matter}, {3, bg}};

    TrainingSet ts = build_training_set(ms, masks, {1});
    REQUIRE(ts.samples.size() == 3);
    CHECK(ts.classes == 3);
    // Ordered by linear voxel index: (0,0,1) then (1,1,1) then (2,1,1).
    CHECK(ts.samples[0].label == 3);
    CHECK(ts.samples[1].label == 1);
    CHECK(ts.samples[2].label == 2);
    CHECK(ts.samples[1].x ==
          std::vector<double>{b0.at(1, 1, 1), b1.at(1, 1, 1), b2.at(1, 1, 1)});

    // Bounds cover the whole volume, not only the ROI voxels.
    CHECK(ts.bounds.lo[0] == b0.data.front());
    CHECK(ts.bounds.hi[0] == b0.data.back());
    CHECK(ts.bounds.hi[2] == b2.data.back());
}

TEST_CASE("training set rejects bad masks and slices") {
    Grid3 g{4, 4, 2};
    MultispectralVolume ms = stack_bands({filled(g, 0.0), filled(g, 10.0)});

    LabelVolume a(g), b(g);
    a.at(1, 1, 0) = 1;
    b.at(1, 1, 0) = 1; // overlap
    CHECK_THROWS_AS(build_training_set(ms, {{1, a}, {2, b}}, {0}), InvalidInput);

    LabelVolume empty(g);
    CHECK_THROWS_AS(build_training_set(ms, {{1, a}, {2, empty}}, {0}), MissingClass);

    // Mask voxels only on slice 0: selecting slice 1 leaves class 1 empty.
    CHECK_THROWS_AS(build_training_set(ms, {{1, a}}, {1}), MissingClass);
    CHECK_THROWS_AS(build_training_set(ms, {{1, a}}, std::vector<int>{}), InvalidParameter);
    CHECK_THROWS_AS(build_training_set(ms, {{1, a}}, {9}), InvalidParameter);

    LabelVolume off_grid({4, 4, 3});
    CHECK_THROWS_AS(build_training_set(ms, {{1, off_grid}}, {0}), InvalidInput);
}

TEST_CASE("sample order is canonical regardless of mask construction order") {
    Grid3 g{5, 5, 1};
    MultispectralVolume ms = stack_bands({filled(g, 0.0)});
    LabelVolume m1(g), m2(g);
    m1.at(4, 4, 0) = 1;
    m1.at(0, 0, 0) = 1;
    m2.at(2, 2, 0) = 1;

    TrainingSet fwd = build_training_set(ms, {{1, m1}, {2, m2}}, {0});
    TrainingSet rev = build_training_set(ms, {{2, m2}, {1, m1}}, {0});
    REQUIRE(fwd.samples.size() == rev.samples.size());
    for (std::size_t i = 0; i < fwd.samples.size(); ++i) {
        CHECK(fwd.samples[i].label == rev.samples[i].label);
        CHECK(fwd.samples[i].x == rev.samples[i].x);
    }
    // Ascending voxel index.
    CHECK(fwd.samples[0].x[0] == 0.0);
    CHECK(fwd.samples[1].x[0] == 12.0);
    CHECK(fwd.samples[2].x[0] == 24.0);
}

TEST_CASE("from_samples computes bounds over the samples") {
    TrainingSet ts = TrainingSet::from_samples(
        {{{1.0, 10.0}, 1}, {{3.0, 30.0}, 2}, {{2.0, 20.0}, 1}}, 2);
    CHECK(ts.bounds.lo == std::vector<double>{1.0, 10.0});
    CHECK(ts.bounds.hi == std::vector<double>{3.0, 30.0});
    CHECK_THROWS_AS(TrainingSet::from_samples({}, 2), InvalidInput);
    // Constant band -> degenerate bounds.
    CHECK_THROWS_AS(TrainingSet::from_samples({{{1.0, 5.0}, 1}, {{2.0, 5.0}, 2}}, 2),
                    InvalidParameter);
}
