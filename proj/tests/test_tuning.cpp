#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "shw/synth.hpp"
#include "shw/tuning.hpp"

namespace {

// Closed-form crossing of two Gaussian densities, taken between the means.
double gaussian_intersection(double m1, double s1, double m2, double s2) {
    const double a = 1.0 / (2.0 * s1 * s1) - 1.0 / (2.0 * s2 * s2);
    const double b = m2 / (s2 * s2) - m1 / (s1 * s1);
    const double c =
        m1 * m1 / (2.0 * s1 * s1) - m2 * m2 / (2.0 * s2 * s2) + std::log(s1 / s2);
    const double disc = b * b - 4.0 * a * c;
    REQUIRE(disc >= 0.0);
    const double r1 = (-b + std::sqrt(disc)) / (2.0 * a);
    const double r2 = (-b - std::sqrt(disc)) / (2.0 * a);
    const double lo = std::min(m1, m2);
    const double hi = std::max(m1, m2);
    if (r1 >= lo && r1 <= hi) return r1;
    REQUIRE((r2 >= lo && r2 <= hi));
    return r2;
}

}  // namespace

TEST_CASE("separated point masses give a perfect threshold") {
    shw::LabeledScoreSet set;
    set.walking.assign(50, 1.0);
    set.nonwalking.assign(50, 0.0);
    const auto est = shw::estimate_delta_subject(set);
    CHECK(est.delta > 0.0);
    CHECK(est.delta < 1.0);
    for (double s : set.walking) CHECK(s > est.delta);
    for (double s : set.nonwalking) CHECK(s <= est.delta);
}

TEST_CASE("KDE crossing recovers the analytic Gaussian intersection") {
    std::mt19937_64 rng(211);
    std::normal_distribution<double> walk(0.25, 0.03);
    std::normal_distribution<double> nonwalk(0.05, 0.01);
    shw::LabeledScoreSet set;
    for (int i = 0; i < 5000; ++i) {
        set.walking.push_back(walk(rng));
        set.nonwalking.push_back(nonwalk(rng));
    }
    const double analytic = gaussian_intersection(0.05, 0.01, 0.25, 0.03);
    CHECK(analytic > 0.05);
    CHECK(analytic < 0.25);

    const auto est = shw::estimate_delta_subject(set);
    CHECK(!est.degraded);
    CHECK(std::abs(est.delta - analytic) <= 0.01);
}

TEST_CASE("identical score distributions degrade to the common median") {
    std::mt19937_64 rng(223);
    std::normal_distribution<double> score(0.2, 0.05);
    shw::LabeledScoreSet set;
    for (int i = 0; i < 200; ++i) {
        const double s = score(rng);
        set.walking.push_back(s);
        set.nonwalking.push_back(s);
    }
    const auto est = shw::estimate_delta_subject(set);
    CHECK(est.degraded);
    std::vector<double> sorted = set.walking;
    std::sort(sorted.begin(), sorted.end());
    const double median = 0.5 * (sorted[99] + sorted[100]);
    CHECK(est.delta == doctest::Approx(median).epsilon(1e-12));
}

TEST_CASE("the estimated threshold stays inside the score range") {
    std::mt19937_64 rng(227);
    for (int trial = 0; trial < 10; ++trial) {
        std::uniform_real_distribution<double> mean(0.0, 1.0);
        std::normal_distribution<double> w(mean(rng), 0.05);
        std::normal_distribution<double> nw(mean(rng), 0.08);
        shw::LabeledScoreSet set;
        double lo = 1e300;
        double hi = -1e300;
        for (int i = 0; i < 100; ++i) {
            set.walking.push_back(w(rng));
            set.nonwalking.push_back(nw(rng));
            lo = std::min({lo, set.walking.back(), set.nonwalking.back()});
            hi = std::max({hi, set.walking.back(), set.nonwalking.back()});
        }
        const auto est = shw::estimate_delta_subject(set);
        CHECK(est.delta >= lo);
        CHECK(est.delta <= hi);
    }
}

TEST_CASE("too few scores is an error") {
    shw::LabeledScoreSet set;
    set.walking.assign(10, 1.0);
    set.nonwalking.assign(100, 0.0);
    CHECK_THROWS_AS(shw::estimate_delta_subject(set), shw::insufficient_data_error);
}

TEST_CASE("population threshold is the subject median") {
    CHECK(shw::estimate_delta_population(std::vector{0.10, 0.115, 0.13}) == 0.115);
    CHECK(shw::estimate_delta_population(std::vector{0.2}) == 0.2);

    const std::vector<double> a{0.1, 0.3, 0.2, 0.15, 0.25};
    std::vector<double> b = a;
    std::reverse(b.begin(), b.end());
    CHECK(shw::estimate_delta_population(a) == shw::estimate_delta_population(b));

    CHECK_THROWS_AS(shw::estimate_delta_population({}), shw::insufficient_data_error);
}

TEST_CASE("cv study on a constant-frequency walk") {
    shw::SegmentSpec walk;
    walk.kind = shw::SegmentKind::harmonic_walk;
    walk.duration_s = 60;
    walk.fundamental_hz = 2.0;
    walk.noise_sd = 0.0;
    const auto gen = shw::generate(std::vector{walk}, 50, 3);

    const auto cells = shw::cv_study(gen.signal, gen.labels, 2, 6, shw::DetectConfig{});
    REQUIRE(cells.size() == 5);
    for (const auto& cell : cells) {
        REQUIRE(cell.cv.has_value());
        CHECK(*cell.cv == 0.0);
    }
}

TEST_CASE("cv study on a drifting walk") {
    shw::SegmentSpec walk;
    walk.kind = shw::SegmentKind::harmonic_walk;
    walk.duration_s = 60;
    walk.fundamental_hz = 1.9;
    walk.drift_hz_per_s = 0.2 / 60.0;  // 1.9 -> 2.1 Hz across the bout
    walk.noise_sd = 0.02;
    const auto gen = shw::generate(std::vector{walk}, 50, 5);

    const auto cells = shw::cv_study(gen.signal, gen.labels, 6, 6, shw::DetectConfig{});
    REQUIRE(cells.size() == 1);
    REQUIRE(cells[0].cv.has_value());
    CHECK(*cells[0].cv > 0.0);
    CHECK(std::isfinite(*cells[0].cv));
}

TEST_CASE("cv study emits one row per harmonic count") {
    shw::SegmentSpec walk;
    walk.kind = shw::SegmentKind::harmonic_walk;
    walk.duration_s = 30;
    walk.fundamental_hz = 2.0;
    const auto gen = shw::generate(std::vector{walk}, 50, 7);
    const auto cells = shw::cv_study(gen.signal, gen.labels, 2, 17, shw::DetectConfig{});
    CHECK(cells.size() == 16);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        CHECK(cells[i].n_m == static_cast<int>(i) + 2);
    }
}

TEST_CASE("cv study needs a labeled walking interval") {
    shw::SegmentSpec rest;
    rest.kind = shw::SegmentKind::rest;
    rest.duration_s = 30;
    const auto gen = shw::generate(std::vector{rest}, 50, 9);
    CHECK_THROWS_AS(shw::cv_study(gen.signal, gen.labels, 2, 6, shw::DetectConfig{}),
                    shw::insufficient_data_error);
}

TEST_CASE("split scores by label track") {
    std::vector<shw::EpochRecord> epochs;
    for (int i = 0; i < 20; ++i) {
        shw::EpochRecord e;
        e.epoch_index = i;
        e.score = static_cast<double>(i);
        epochs.push_back(e);
    }
    shw::LabelTrack track;
    track.intervals = {{0, 8, "rest"}, {8, 15, "walking"}, {15, 20, "compound"}};
    const auto set = shw::split_scores(epochs, track, "s01");
    CHECK(set.subject_id == "s01");
    CHECK(set.walking.size() == 7);
    CHECK(set.nonwalking.size() == 13);
    CHECK(set.walking.front() == 8.0);
}
