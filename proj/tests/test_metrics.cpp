#include <doctest.h>

#include <cmath>

#include "dwiseg/metrics.hpp"
#include "dwiseg/rng.hpp"

using namespace dwiseg;

namespace {

ConfusionMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    ConfusionMatrix t(static_cast<int>(rows.size()));
    for (int i = 0; i < t.m; ++i)
        for (int j = 0; j < t.m; ++j)
            t.at(i, j) = rows[i][j];
    return t;
}

LabelVolume labels_of(Grid3 g, const std::vector<std::uint8_t>& values) {
    LabelVolume l(g);
    l.data = values;
    return l;
}

} // namespace

TEST_CASE("hand-derived two-class case") {
    // 100 objects: rows are predictions, columns truth.
    ConfusionMatrix t = from_rows({{40, 10}, {20, 30}});
    CHECK(global_accuracy(t) == doctest::Approx(0.70).epsilon(1e-12));
    AgreementReport r = agreement_report(t);
    CHECK(r.rho_z == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.kappa == doctest::Approx(0.40).epsilon(1e-12));

    // The literal squared-cell denominator is kept only for comparison and
    // is not a probability: here it exceeds 1.
    double rho_lit = (50.0 * 60.0 + 50.0 * 40.0) / (1600.0 + 100.0 + 400.0 + 900.0);
    double k_lit = (0.70 - rho_lit) / (1.0 - rho_lit);
    CHECK(kappa(t, KappaForm::LiteralRowColOverSquares) ==
          doctest::Approx(k_lit).epsilon(1e-12));
}

TEST_CASE("perfect and uniform matrices") {
    ConfusionMatrix diag = from_rows({{10, 0, 0}, {0, 25, 0}, {0, 0, 7}});
    CHECK(global_accuracy(diag) == 1.0);
    CHECK(kappa(diag) == doctest::Approx(1.0).epsilon(1e-12));

    ConfusionMatrix uniform = from_rows({{5, 5, 5}, {5, 5, 5}, {5, 5, 5}});
    CHECK(kappa(uniform) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("degenerate single-cell matrix has no kappa") {
    ConfusionMatrix t = from_rows({{12, 0}, {0, 0}});
    CHECK_THROWS_AS(kappa(t), UndefinedKappa);
    ConfusionMatrix empty(3);
    CHECK_THROWS_AS(global_accuracy(empty), InvalidInput);
    CHECK_THROWS_AS(kappa(empty), InvalidInput);
}

TEST_CASE("kappa never exceeds accuracy and survives relabeling") {
    Rng rng(123);
    for (int trial = 0; trial < 300; ++trial) {
        ConfusionMatrix t(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                t.at(i, j) = static_cast<std::int64_t>(rng.below(50));
        if (t.total() == 0)
            continue;
        AgreementReport r;
        try {
            r = agreement_report(t);
        } catch (const UndefinedKappa&) {
            continue;
        }
        CHECK(r.rho_z >= 0.0);
        CHECK(r.kappa <= r.phi + 1e-12);

        // Simultaneous row+column permutation = class relabeling.
        int perm[3] = {2, 0, 1};
        ConfusionMatrix p(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                p.at(perm[i], perm[j]) = t.at(i, j);
        CHECK(kappa(p) == doctest::Approx(r.kappa).epsilon(1e-12));
        CHECK(global_accuracy(p) == doctest::Approx(r.phi).epsilon(1e-12));
    }
}

TEST_CASE("confusion matrix counts match a per-voxel brute force") {
    Grid3 g{7, 5, 3};
    Rng rng(9);
    LabelVolume truth(g), pred(g);
    for (std::size_t v = 0; v < g.voxels(); ++v) {
        truth.data[v] = static_cast<std::uint8_t>(1 + rng.below(3));
        pred.data[v] = static_cast<std::uint8_t>(1 + rng.below(3));
    }
    ConfusionMatrix t = confusion_matrix(truth, pred);

    std::int64_t brute[3][3] = {};
    std::int64_t agree = 0;
    for (std::size_t v = 0; v < g.voxels(); ++v) {
        ++brute[pred.data[v] - 1][truth.data[v] - 1];
        agree += pred.data[v] == truth.data[v];
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(t.at(i, j) == brute[i][j]);
    CHECK(t.total() == static_cast<std::int64_t>(g.voxels()));
    CHECK(global_accuracy(t) ==
          doctest::Approx(static_cast<double>(agree) / g.voxels()).epsilon(1e-15));
}

TEST_CASE("identical labelings give a diagonal matrix") {
    Grid3 g{4, 4, 2};
    LabelVolume l = labels_of(g, std::vector<std::uint8_t>(g.voxels(), 2));
    l.data[0] = 1;
    l.data[5] = 3;
    ConfusionMatrix t = confusion_matrix(l, l);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j)
                CHECK(t.at(i, j) == 0);
    CHECK(kappa(t) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("swapping two predicted labels permutes the matrix rows") {
    Grid3 g{8, 8, 1};
    Rng rng(77);
    LabelVolume truth(g), pred(g);
    for (std::size_t v = 0; v < g.voxels(); ++v) {
        truth.data[v] = static_cast<std::uint8_t>(1 + rng.below(3));
        pred.data[v] = static_cast<std::uint8_t>(1 + rng.below(3));
    }
    ConfusionMatrix base = confusion_matrix(truth, pred);

    LabelVolume swapped = pred;
    for (std::uint8_t& v : swapped.data)
        v = v == 1 ? 2 : (v == 2 ? 1 : v);
    ConfusionMatrix after = confusion_matrix(truth, swapped);
    for (int j = 0; j < 3; ++j) {
        CHECK(after.at(0, j) == base.at(1, j));
        CHECK(after.at(1, j) == base.at(0, j));
        CHECK(after.at(2, j) == base.at(2, j));
    }
}

TEST_CASE("grid and label-domain mismatches are rejected") {
    LabelVolume a({2, 2, 1}, 1), b({2, 2, 2}, 1);
    CHECK_THROWS_AS(confusion_matrix(a, b), InvalidInput);
    LabelVolume c({2, 2, 1}, 1), d({2, 2, 1}, 9);
    CHECK_THROWS_AS(confusion_matrix(c, d), InvalidInput);
    LabelVolume zero({2, 2, 1}, 0);
    CHECK_THROWS_AS(confusion_matrix(c, zero), InvalidInput);
}

TEST_CASE("slice-restricted evaluation") {
    Grid3 g{2, 2, 3};
    LabelVolume truth(g, 1), pred(g, 1);
    // Slice 2 disagrees entirely.
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 2; ++x)
            pred.at(x, y, 2) = 2;
    CHECK(global_accuracy(confusion_matrix(truth, pred, 3)) ==
          doctest::Approx(8.0 / 12.0).epsilon(1e-15));
    CHECK(global_accuracy(confusion_matrix(truth, pred, 3, {0, 1})) == 1.0);
    CHECK(global_accuracy(confusion_matrix(truth, pred, 3, {2})) == 0.0);
    CHECK_THROWS_AS(confusion_matrix(truth, pred, 3, {5}), InvalidInput);
}

TEST_CASE("volume percentages and the fluid-matter ratio") {
    Grid3 g{10, 10, 1};
    std::vector<std::uint8_t> values(g.voxels(), 3);
    for (int i = 0; i < 10; ++i)
        values[i] = 1;
    for (int i = 10; i < 50; ++i)
        values[i] = 2;
    LabelVolume labels = labels_of(g, values);

    VolumeReport r = volume_report(labels);
    CHECK(r.counts == std::vector<std::int64_t>{10, 40, 50});
    CHECK(r.v_percent[0] == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(r.v_percent[1] == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(r.v_percent[2] == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(r.v_percent[0] + r.v_percent[1] + r.v_percent[2] ==
          doctest::Approx(100.0).epsilon(1e-9));
    REQUIRE(r.fluid_matter_ratio.has_value());
    CHECK(*r.fluid_matter_ratio == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("all-background volume reports an undefined ratio") {
    LabelVolume labels({5, 5, 2}, 3);
    VolumeReport r = volume_report(labels);
    CHECK(r.v_percent == std::vector<double>{0.0, 0.0, 100.0});
    CHECK(!r.fluid_matter_ratio.has_value());
}

TEST_CASE("volume report restricted to a domain mask") {
    Grid3 g{4, 1, 1};
    LabelVolume labels = labels_of(g, {1, 2, 2, 3});
    LabelVolume mask = labels_of(g, {1, 1, 1, 0});
    VolumeReport r = volume_report(labels, &mask);
    CHECK(r.domain == 3);
    CHECK(r.counts == std::vector<std::int64_t>{1, 2, 0});
    LabelVolume empty_mask(g, 0);
    CHECK_THROWS_AS(volume_report(labels, &empty_mask), InvalidInput);
}
