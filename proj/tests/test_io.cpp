#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "shw/io.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

shw::TriaxialSignal random_signal(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.7);
    shw::TriaxialSignal s;
    s.f0 = 50;
    for (int i = 0; i < n; ++i) {
        // Values s.t. the f32 payload round-trips exactly.
        s.samples.push_back({static_cast<float>(g(rng)), static_cast<float>(g(rng)),
                             static_cast<float>(g(rng))});
    }
    return s;
}

}  // namespace

TEST_CASE("double formatting round-trips") {
    for (double v : {0.013, 2.1, 0.1 + 0.2, 1.0 / 3.0, 12345.6789, 1e-17, 0.0}) {
        const auto text = shw::format_double(v);
        CHECK(std::stod(text) == v);
    }
    CHECK(shw::format_double(0.013) == "0.013");
    CHECK(shw::format_double(2.1) == "2.1");
}

TEST_CASE("binary signal round-trip") {
    TempDir dir("shw_io_bin");
    const auto signal = random_signal(1234, 3);
    shw::RecordingHeader header;
    header.start_unix = 1700000000;
    header.subject_id = "s01";
    shw::write_signal_binary(dir.path / "a.bin", signal, header);

    auto reader = shw::open_signal(dir.path / "a.bin");
    CHECK(reader->header().f0 == 50);
    CHECK(reader->header().n_samples == 1234);
    CHECK(reader->header().start_unix == 1700000000);
    CHECK(reader->header().subject_id == "s01");

    const auto back = shw::read_signal(dir.path / "a.bin");
    REQUIRE(back.size() == signal.size());
    for (std::int64_t i = 0; i < back.size(); ++i) {
        CHECK(back.samples[static_cast<std::size_t>(i)].x ==
              signal.samples[static_cast<std::size_t>(i)].x);
        CHECK(back.samples[static_cast<std::size_t>(i)].z ==
              signal.samples[static_cast<std::size_t>(i)].z);
    }
}

TEST_CASE("binary reader reports truncation with an offset") {
    TempDir dir("shw_io_trunc");
    const auto signal = random_signal(100, 5);
    shw::write_signal_binary(dir.path / "t.bin", signal, {});
    // Drop the last sample (12 bytes): 99 triples remain.
    const auto full = fs::file_size(dir.path / "t.bin");
    fs::resize_file(dir.path / "t.bin", full - 12);

    auto reader = shw::open_signal(dir.path / "t.bin");
    std::vector<shw::Sample> out;
    CHECK_THROWS_AS(
        {
            while (reader->read_chunk(out, 4096) > 0) {
            }
        },
        shw::parse_error);
}

TEST_CASE("binary reader rejects bad magic and trailing bytes") {
    TempDir dir("shw_io_magic");
    {
        std::ofstream bad(dir.path / "bad.bin", std::ios::binary);
        bad << "NOPEnonsense";
    }
    CHECK_THROWS_AS(shw::open_signal(dir.path / "bad.bin", shw::SignalFormat::binary),
                    shw::parse_error);

    const auto signal = random_signal(10, 7);
    shw::write_signal_binary(dir.path / "x.bin", signal, {});
    {
        std::ofstream app(dir.path / "x.bin", std::ios::binary | std::ios::app);
        app << "zz";
    }
    auto reader = shw::open_signal(dir.path / "x.bin");
    std::vector<shw::Sample> out;
    CHECK_THROWS_AS(
        {
            while (reader->read_chunk(out, 4096) > 0) {
            }
        },
        shw::parse_error);
}

TEST_CASE("CSV signal input") {
    TempDir dir("shw_io_csv");
    {
        std::ofstream out(dir.path / "s.csv");
        out << "t,x,y,z\n0,0.1,0.2,0.3\n0.02,0.4,0.5,0.6\n0.04,0.7,0.8,0.9\n";
    }
    const auto signal = shw::read_signal(dir.path / "s.csv", shw::SignalFormat::auto_detect, 50);
    REQUIRE(signal.size() == 3);
    CHECK(signal.f0 == 50);
    CHECK(signal.samples[1].y == 0.5);

    // The t column is optional.
    {
        std::ofstream out(dir.path / "noT.csv");
        out << "x,y,z\n1,2,3\n4,5,6\n";
    }
    CHECK(shw::read_signal(dir.path / "noT.csv", shw::SignalFormat::csv, 50).size() == 2);

    // A sampling frequency is required for CSV input.
    CHECK_THROWS_AS(shw::read_signal(dir.path / "s.csv", shw::SignalFormat::csv, 0),
                    shw::config_error);

    {
        std::ofstream out(dir.path / "bad.csv");
        out << "t,x,y,z\n0,0.1,0.2,0.3\n0.5,0.1,0.2,0.3\n0.25,0.1,0.2,0.3\n";
    }
    try {
        shw::read_signal(dir.path / "bad.csv", shw::SignalFormat::csv, 50);
        FAIL("expected parse_error");
    } catch (const shw::parse_error& e) {
        CHECK(e.byte_offset > 0);
    }

    {
        std::ofstream out(dir.path / "head.csv");
        out << "a,b\n1,2\n";
    }
    CHECK_THROWS_AS(shw::read_signal(dir.path / "head.csv", shw::SignalFormat::csv, 50),
                    shw::parse_error);
}

TEST_CASE("epoch CSV format and round-trip") {
    TempDir dir("shw_io_epochs");
    std::vector<shw::EpochRecord> records;
    {
        shw::EpochRecord e;
        e.epoch_index = 42;
        e.y = false;
        e.v = 0.013;
        records.push_back(e);
    }
    {
        shw::EpochRecord e;
        e.epoch_index = 43;
        e.y = true;
        e.w = 2.1;
        e.v = 0.214;
        records.push_back(e);
    }
    shw::write_epochs_csv(dir.path / "e.csv", records);

    const auto text = slurp(dir.path / "e.csv");
    CHECK(text == "epoch,y,w,v\n42,0,,0.013\n43,1,2.1,0.214\n");

    const auto back = shw::read_epochs_csv(dir.path / "e.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[0].epoch_index == 42);
    CHECK(!back[0].y);
    CHECK(!back[0].w.has_value());
    CHECK(back[0].v == 0.013);
    CHECK(back[1].y);
    CHECK(back[1].w == 2.1);
}

TEST_CASE("epoch CSV round-trip preserves awkward doubles") {
    TempDir dir("shw_io_epochs2");
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<shw::EpochRecord> records;
    for (int i = 0; i < 200; ++i) {
        shw::EpochRecord e;
        e.epoch_index = i;
        e.y = u(rng) < 0.5;
        if (e.y) e.w = 1.2 + 2.8 * u(rng);
        e.v = u(rng) / 3.0;
        records.push_back(e);
    }
    shw::write_epochs_csv(dir.path / "r.csv", records);
    const auto back = shw::read_epochs_csv(dir.path / "r.csv");
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].epoch_index == records[i].epoch_index);
        CHECK(back[i].y == records[i].y);
        CHECK(back[i].w == records[i].w);
        CHECK(back[i].v == records[i].v);
    }
}

TEST_CASE("bout CSV round-trip") {
    TempDir dir("shw_io_bouts");
    std::vector<shw::Bout> bouts;
    shw::Bout b;
    b.start_epoch = 120;
    b.n_windows = 8;
    b.duration_s = 17.0;
    b.mean_iwf = 2.05;
    b.mean_vm = 0.31;
    bouts.push_back(b);
    shw::write_bouts_csv(dir.path / "b.csv", bouts);
    const auto back = shw::read_bouts_csv(dir.path / "b.csv");
    REQUIRE(back.size() == 1);
    CHECK(back[0].start_epoch == 120);
    CHECK(back[0].n_windows == 8);
    CHECK(back[0].duration_s == 17.0);
    CHECK(back[0].mean_iwf == 2.05);
    CHECK(back[0].mean_vm == 0.31);
}

TEST_CASE("label CSV round-trip") {
    TempDir dir("shw_io_labels");
    shw::LabelTrack track;
    track.intervals = {{0, 30.5, "rest"}, {30.5, 47.5, "walking"}, {47.5, 60, "compound"}};
    shw::write_labels(dir.path / "l.csv", track);
    const auto back = shw::read_labels(dir.path / "l.csv");
    REQUIRE(back.intervals.size() == 3);
    CHECK(back.intervals[1].start_s == 30.5);
    CHECK(back.intervals[1].label == "walking");

    {
        std::ofstream out(dir.path / "overlap.csv");
        out << "start_s,end_s,label\n0,10,rest\n5,15,walking\n";
    }
    CHECK_THROWS_AS(shw::read_labels(dir.path / "overlap.csv"), shw::config_error);
}

TEST_CASE("uncommitted atomic files vanish") {
    TempDir dir("shw_io_atomic");
    const auto target = dir.path / "out.csv";
    {
        shw::AtomicFile file(target);
        file.stream() << "partial";
        // no commit
    }
    CHECK(!fs::exists(target));
    CHECK(fs::is_empty(dir.path));

    {
        shw::AtomicFile file(target);
        file.stream() << "done";
        file.commit();
    }
    CHECK(slurp(target) == "done");
}

TEST_CASE("subject manifest parsing") {
    TempDir dir("shw_io_manifest");
    {
        std::ofstream out(dir.path / "m.csv");
        out << "subject_id,signal_path,label_path\ns01,a.bin,a_labels.csv\ns02,b.bin,b_labels.csv\n";
    }
    const auto rows = shw::read_subject_manifest(dir.path / "m.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].subject_id == "s01");
    CHECK(rows[1].signal_path == "b.bin");
}

TEST_CASE("summary and matrix writers emit well-formed files") {
    TempDir dir("shw_io_summary");
    shw::SummaryData summary;
    summary.n_epochs = 7200;
    summary.walking_epochs = 900;
    summary.n_bouts = 30;
    summary.total_bout_seconds = 880.0;
    summary.band_edges = {10, 30, 60};
    shw::DaySummary day;
    day.day = 0;
    day.walking_seconds = 900;
    day.n_bouts = 30;
    day.bout_seconds = 880.0;
    day.band_counts = {10, 15, 4, 1};
    day.band_seconds = {100, 300, 180, 300};
    summary.per_day.push_back(day);
    summary.iwf.count = 900;
    summary.iwf.min = 1.4;
    summary.iwf.q1 = 1.9;
    summary.iwf.median = 2.0;
    summary.iwf.q3 = 2.1;
    summary.iwf.max = 2.6;
    shw::write_summary_json(dir.path / "summary.json", summary);
    const auto text = slurp(dir.path / "summary.json");
    CHECK(text.find("\"walking_seconds\": 900") != std::string::npos);
    CHECK(text.find("\"band_counts\"") != std::string::npos);

    std::vector<std::array<double, 24>> matrix(2);
    matrix[0].fill(0.0);
    matrix[1].fill(0.0);
    matrix[1][5] = 12.5;
    shw::write_hourly_csv(dir.path / "hourly.csv", matrix);
    const auto hourly = slurp(dir.path / "hourly.csv");
    CHECK(hourly.find("day,h00,h01") == 0);
    CHECK(hourly.find("\n1,0,0,0,0,0,12.5") != std::string::npos);

    shw::write_bands_csv(dir.path / "bands.csv", summary);
    const auto bands = slurp(dir.path / "bands.csv");
    CHECK(bands.find("day,band,low_s,high_s,count,seconds") == 0);
    CHECK(bands.find("0,3,60,,1,300") != std::string::npos);
}
