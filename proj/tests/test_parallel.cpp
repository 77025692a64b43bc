#include <doctest.h>

#include <atomic>
#include <vector>

#include "shw/parallel.hpp"

TEST_CASE("ordered map gives identical results for any thread count") {
    const std::size_t n = 5000;
    std::vector<std::uint64_t> reference(n);
    shw::parallel::for_each_ordered(n, 1, [&](std::size_t, std::size_t i) {
        reference[i] = i * i + 17;
    });

    for (int threads : {2, 3, 8, 64}) {
        std::vector<std::uint64_t> out(n, 0);
        std::atomic<std::size_t> calls{0};
        shw::parallel::for_each_ordered(n, threads, [&](std::size_t t, std::size_t i) {
            CHECK(t < static_cast<std::size_t>(threads));
            out[i] = i * i + 17;
            calls.fetch_add(1, std::memory_order_relaxed);
        });
        CHECK(calls.load() == n);
        CHECK(out == reference);
    }
}

TEST_CASE("ordered map handles empty and tiny inputs") {
    bool called = false;
    shw::parallel::for_each_ordered(0, 4, [&](std::size_t, std::size_t) { called = true; });
    CHECK(!called);

    std::vector<int> out(3, 0);
    shw::parallel::for_each_ordered(3, 16, [&](std::size_t, std::size_t i) {
        out[i] = static_cast<int>(i) + 1;
    });
    CHECK(out == std::vector<int>{1, 2, 3});
}
