#include <doctest.h>

#include <random>

#include "shw/segmentation.hpp"

namespace {

constexpr int kF0 = 50;

shw::WindowDecision decision(std::int64_t start_s, bool walking, double score = 0.0,
                             double s_hat = 2.0) {
    shw::WindowDecision d;
    d.window_start = start_s * kF0;
    d.max_score = score;
    d.s_hat_hz = s_hat;
    d.s_hat_bin = static_cast<int>(s_hat * 10);
    d.is_walking = walking;
    return d;
}

// Full decision stream for n_epochs seconds of signal, walking on the given starts.
std::vector<shw::WindowDecision> full_stream(std::int64_t n_epochs,
                                             const std::vector<std::int64_t>& walking_starts,
                                             double score = 0.5, double s_hat = 2.0) {
    std::vector<shw::WindowDecision> out;
    for (std::int64_t s = 0; s + 10 <= n_epochs; ++s) {
        const bool walk =
            std::find(walking_starts.begin(), walking_starts.end(), s) != walking_starts.end();
        out.push_back(decision(s, walk, walk ? score : 0.01, s_hat));
    }
    return out;
}

shw::FuseParams params(shw::Coverage cov = shw::Coverage::inclusive) {
    return shw::FuseParams{10, 1, kF0, cov};
}

}  // namespace

TEST_CASE("no walking windows, no walking epochs") {
    const auto decisions = full_stream(30, {});
    const std::vector<double> vm(30, 0.02);
    const auto epochs = shw::fuse_epochs(decisions, vm, params());
    REQUIRE(epochs.size() == 30);
    for (const auto& e : epochs) {
        CHECK(!e.y);
        CHECK(!e.w.has_value());
        CHECK(e.v == 0.02);
        CHECK(e.support_count == 0);
    }
}

TEST_CASE("one walking window marks its whole span") {
    const auto decisions = full_stream(30, {5});
    const std::vector<double> vm(30, 0.0);
    const auto epochs = shw::fuse_epochs(decisions, vm, params());
    REQUIRE(epochs.size() == 30);
    for (const auto& e : epochs) {
        const bool in_span = e.epoch_index >= 5 && e.epoch_index < 15;
        CHECK(e.y == in_span);
        CHECK(e.w.has_value() == in_span);
    }
}

TEST_CASE("the strongest covering window supplies the IWF") {
    std::vector<shw::WindowDecision> decisions;
    for (std::int64_t s = 0; s + 10 <= 30; ++s) {
        if (s == 4) {
            decisions.push_back(decision(s, true, 0.3, 2.0));
        } else if (s == 5) {
            decisions.push_back(decision(s, true, 0.5, 2.1));
        } else {
            decisions.push_back(decision(s, false, 0.01));
        }
    }
    const std::vector<double> vm(30, 0.0);
    const auto epochs = shw::fuse_epochs(decisions, vm, params());
    CHECK(epochs[4].w == 2.0);   // covered by the first window only
    for (int e = 5; e <= 13; ++e) {
        CHECK(epochs[static_cast<std::size_t>(e)].w == 2.1);
        CHECK(epochs[static_cast<std::size_t>(e)].support_count == 2);
    }
    CHECK(epochs[14].w == 2.1);  // second window only
    CHECK(epochs[15].y == false);
}

TEST_CASE("score ties go to the earliest window") {
    std::vector<shw::WindowDecision> decisions;
    decisions.push_back(decision(4, true, 0.5, 2.0));
    decisions.push_back(decision(5, true, 0.5, 2.4));
    const std::vector<double> vm(20, 0.0);
    const auto epochs = shw::fuse_epochs(decisions, vm, params());
    CHECK(epochs[10].w == 2.0);
}

TEST_CASE("steady-state coverage counts") {
    const std::vector<double> vm(70, 0.0);
    std::vector<shw::WindowDecision> decisions;
    for (std::int64_t s = 0; s + 10 <= 70; ++s) decisions.push_back(decision(s, true, 1.0));

    const auto inclusive = shw::fuse_epochs(decisions, vm, params(shw::Coverage::inclusive));
    CHECK(inclusive[30].support_count == 10);

    const auto interior = shw::fuse_epochs(decisions, vm, params(shw::Coverage::interior));
    CHECK(interior[30].support_count == 9);
}

TEST_CASE("interior coverage shifts a lone window's span") {
    const auto decisions = full_stream(30, {5});
    const std::vector<double> vm(30, 0.0);
    const auto epochs = shw::fuse_epochs(decisions, vm, params(shw::Coverage::interior));
    for (const auto& e : epochs) {
        CHECK(e.y == (e.epoch_index >= 6 && e.epoch_index < 15));
    }
}

TEST_CASE("misaligned decision streams are rejected") {
    const std::vector<double> vm(30, 0.0);
    {
        shw::WindowDecision d;
        d.window_start = 75;  // not a stride multiple
        CHECK_THROWS_AS(shw::fuse_epochs(std::vector{d}, vm, params()), shw::alignment_error);
    }
    {
        auto a = decision(5, false);
        auto b = decision(4, false);
        CHECK_THROWS_AS(shw::fuse_epochs(std::vector{a, b}, vm, params()), shw::alignment_error);
    }
    {
        auto late = decision(25, false);  // window extends past the 30-epoch series
        CHECK_THROWS_AS(shw::fuse_epochs(std::vector{late}, vm, params()), shw::alignment_error);
    }
}

TEST_CASE("bout durations reproduce the overlap arithmetic") {
    const std::vector<double> vm(60, 0.1);
    {
        std::vector<std::int64_t> starts;
        for (std::int64_t s = 10; s < 18; ++s) starts.push_back(s);  // 8 consecutive windows
        const auto decisions = full_stream(60, starts);
        const auto epochs = shw::fuse_epochs(decisions, vm, params());
        const auto bouts = shw::extract_bouts(decisions, epochs, params());
        REQUIRE(bouts.size() == 1);
        CHECK(bouts[0].start_epoch == 10);
        CHECK(bouts[0].n_windows == 8);
        CHECK(bouts[0].duration_s == 17.0);
    }
    {
        const auto decisions = full_stream(60, {20});
        const auto epochs = shw::fuse_epochs(decisions, vm, params());
        const auto bouts = shw::extract_bouts(decisions, epochs, params());
        REQUIRE(bouts.size() == 1);
        CHECK(bouts[0].duration_s == 10.0);
    }
    {
        const auto decisions = full_stream(60, {});
        const auto epochs = shw::fuse_epochs(decisions, vm, params());
        CHECK(shw::extract_bouts(decisions, epochs, params()).empty());
    }
}

TEST_CASE("a skipped window splits bouts even when spans overlap") {
    std::vector<std::int64_t> starts{0, 1, 2, 3, 4, 5, 6, 7, 12};
    const auto decisions = full_stream(40, starts, 0.5, 2.0);
    std::vector<double> vm(40);
    for (std::size_t i = 0; i < vm.size(); ++i) vm[i] = static_cast<double>(i);
    const auto epochs = shw::fuse_epochs(decisions, vm, params());
    const auto bouts = shw::extract_bouts(decisions, epochs, params());

    REQUIRE(bouts.size() == 2);
    CHECK(bouts[0].duration_s == 17.0);
    CHECK(bouts[1].duration_s == 10.0);

    // Epochs 12..16 sit in both spans and belong to the earlier bout, so the
    // second bout averages vm over epochs 17..21 only.
    CHECK(bouts[1].mean_vm == doctest::Approx(19.0).epsilon(1e-12));
    CHECK(bouts[0].mean_vm == doctest::Approx(8.0).epsilon(1e-12));  // epochs 0..16

    // Every walking epoch is covered by exactly one bout span partition-wise.
    std::int64_t walking = 0;
    for (const auto& e : epochs) walking += e.y ? 1 : 0;
    CHECK(walking == 22);  // epochs 0..21
}

TEST_CASE("bout summaries by duration band") {
    std::vector<shw::Bout> bouts;
    auto mk = [](std::int64_t start, double dur) {
        shw::Bout b;
        b.start_epoch = start;
        b.duration_s = dur;
        b.n_windows = static_cast<std::int64_t>(dur) - 9;
        return b;
    };
    bouts.push_back(mk(100, 10.0));
    bouts.push_back(mk(500, 17.0));
    bouts.push_back(mk(900, 65.0));

    const auto days = shw::summarize_bouts(bouts, shw::default_bout_bands());
    REQUIRE(days.size() == 1);
    CHECK(days[0].counts == std::vector<std::int64_t>{1, 1, 0, 1});
    double total = 0.0;
    for (double s : days[0].seconds) total += s;
    CHECK(total == 92.0);

    // A 30 s bout falls in the (10, 30] band: edges close on the right.
    const auto one = shw::summarize_bouts(std::vector{mk(0, 30.0)}, shw::default_bout_bands());
    CHECK(one[0].counts == std::vector<std::int64_t>{0, 1, 0, 0});

    CHECK(shw::summarize_bouts({}, shw::default_bout_bands()).empty());
}

TEST_CASE("band counts and seconds sum to the totals") {
    std::mt19937_64 rng(67);
    std::uniform_int_distribution<std::int64_t> start(0, 3 * 86400 - 1);
    std::uniform_int_distribution<int> windows(1, 120);
    std::vector<shw::Bout> bouts;
    for (int i = 0; i < 200; ++i) {
        shw::Bout b;
        b.start_epoch = start(rng);
        b.n_windows = windows(rng);
        b.duration_s = static_cast<double>(b.n_windows - 1 + 10);
        bouts.push_back(b);
    }
    const auto days = shw::summarize_bouts(bouts, shw::default_bout_bands());
    std::int64_t count = 0;
    double seconds = 0.0;
    for (const auto& d : days) {
        for (std::size_t band = 0; band < d.counts.size(); ++band) {
            count += d.counts[band];
            seconds += d.seconds[band];
        }
    }
    double want_seconds = 0.0;
    for (const auto& b : bouts) want_seconds += b.duration_s;
    CHECK(count == 200);
    CHECK(seconds == want_seconds);  // integer-valued durations add exactly
}

TEST_CASE("hourly walking minutes") {
    std::vector<shw::EpochRecord> epochs;
    auto walk_epoch = [](std::int64_t index, bool y) {
        shw::EpochRecord e;
        e.epoch_index = index;
        e.y = y;
        if (y) e.w = 2.0;
        return e;
    };

    // One full walking hour.
    for (std::int64_t e = 0; e < 3600; ++e) epochs.push_back(walk_epoch(e, true));
    auto matrix = shw::hourly_walking_matrix(epochs);
    REQUIRE(matrix.size() == 1);
    CHECK(matrix[0][0] == 60.0);

    // 90 walking seconds in hour 1.
    for (std::int64_t e = 3600; e < 3600 + 90; ++e) epochs.push_back(walk_epoch(e, true));
    for (std::int64_t e = 3690; e < 7200; ++e) epochs.push_back(walk_epoch(e, false));
    matrix = shw::hourly_walking_matrix(epochs);
    CHECK(matrix[0][1] == 1.5);
    CHECK(matrix[0][2] == 0.0);

    for (const auto& row : matrix) {
        for (double m : row) {
            CHECK(m >= 0.0);
            CHECK(m <= 60.0);
        }
    }
}

TEST_CASE("IWF distribution summary") {
    std::vector<shw::EpochRecord> epochs;
    auto add = [&](double w) {
        shw::EpochRecord e;
        e.epoch_index = static_cast<std::int64_t>(epochs.size());
        e.y = true;
        e.w = w;
        epochs.push_back(e);
    };

    add(2.0);
    add(2.0);
    add(2.0);
    auto summary = shw::iwf_distribution(epochs);
    CHECK(summary.count == 3);
    CHECK(summary.min == 2.0);
    CHECK(summary.median == 2.0);
    CHECK(summary.max == 2.0);

    epochs.clear();
    add(2.6);
    add(1.2);
    summary = shw::iwf_distribution(epochs);
    CHECK(summary.min == 1.2);
    CHECK(summary.max == 2.6);

    CHECK(shw::iwf_distribution({}).count == 0);
}

TEST_CASE("fused walking set shrinks as delta grows") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    std::vector<shw::WindowDecision> base;
    for (std::int64_t s = 0; s + 10 <= 120; ++s) base.push_back(decision(s, false, score(rng)));
    const std::vector<double> vm(120, 0.0);

    std::int64_t prev = 121;
    for (double delta = 0.0; delta <= 1.0; delta += 0.02) {
        auto decisions = base;
        for (auto& d : decisions) d.is_walking = d.max_score > delta;
        const auto epochs = shw::fuse_epochs(decisions, vm, params());
        std::int64_t walking = 0;
        for (const auto& e : epochs) walking += e.y ? 1 : 0;
        CHECK(walking <= prev);
        prev = walking;
    }
}
