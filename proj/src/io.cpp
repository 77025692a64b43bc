#include "shw/io.hpp"

#include <json.hpp>

#include <bit>
#include <charconv>
#include <cstring>
#include <system_error>

namespace fs = std::filesystem;

namespace shw {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double_field(std::string_view field, std::uint64_t offset, const char* what) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw parse_error(std::string("malformed ") + what, offset);
    }
    return v;
}

std::int64_t parse_int_field(std::string_view field, std::uint64_t offset, const char* what) {
    std::int64_t v = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw parse_error(std::string("malformed ") + what, offset);
    }
    return v;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

// Little-endian primitives.
void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

constexpr char kMagic[4] = {'S', 'H', 'W', 'A'};
constexpr std::size_t kFixedHeaderBytes = 4 + 2 + 4 + 8 + 8 + 2;
constexpr std::size_t kSampleBytes = 3 * sizeof(float);

}  // namespace

AtomicFile::AtomicFile(fs::path path)
    : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw io_error("cannot open " + tmp_.string() + " for writing");
}

AtomicFile::~AtomicFile() {
    if (!committed_) {
        out_.close();
        std::error_code ec;
        fs::remove(tmp_, ec);
    }
}

void AtomicFile::commit() {
    out_.flush();
    if (!out_) throw io_error("write failed for " + tmp_.string());
    out_.close();
    std::error_code ec;
    fs::rename(tmp_, path_, ec);
    if (ec) throw io_error("cannot rename " + tmp_.string() + " to " + path_.string());
    committed_ = true;
}

namespace {

class BinaryReader final : public SignalReader {
public:
    explicit BinaryReader(const fs::path& path) : in_(path, std::ios::binary) {
        if (!in_) throw io_error("cannot open " + path.string());
        unsigned char fixed[kFixedHeaderBytes];
        in_.read(reinterpret_cast<char*>(fixed), kFixedHeaderBytes);
        if (in_.gcount() != static_cast<std::streamsize>(kFixedHeaderBytes)) {
            throw parse_error("truncated header", static_cast<std::uint64_t>(in_.gcount()));
        }
        if (std::memcmp(fixed, kMagic, 4) != 0) throw parse_error("bad magic", 0);
        header_.version = get_u16(fixed + 4);
        if (header_.version != 1) throw parse_error("unsupported format version", 4);
        header_.f0 = get_u32(fixed + 6);
        if (header_.f0 == 0) throw parse_error("sampling frequency must be positive", 6);
        header_.n_samples = get_u64(fixed + 10);
        header_.start_unix = static_cast<std::int64_t>(get_u64(fixed + 18));
        const std::uint16_t id_len = get_u16(fixed + 26);
        header_.subject_id.resize(id_len);
        if (id_len > 0) {
            in_.read(header_.subject_id.data(), id_len);
            if (in_.gcount() != static_cast<std::streamsize>(id_len)) {
                throw parse_error("truncated subject id", kFixedHeaderBytes);
            }
        }
        payload_offset_ = kFixedHeaderBytes + id_len;
    }

    const RecordingHeader& header() const override { return header_; }

    std::size_t read_chunk(std::vector<Sample>& out, std::size_t max_samples) override {
        const std::uint64_t remaining = header_.n_samples - read_;
        const std::size_t want = static_cast<std::size_t>(
            std::min<std::uint64_t>(remaining, max_samples));
        if (want == 0) {
            check_trailing();
            return 0;
        }
        buf_.resize(want * kSampleBytes);
        in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        const auto got = static_cast<std::size_t>(in_.gcount());
        if (got != buf_.size()) {
            throw parse_error("truncated payload", payload_offset_ + read_ * kSampleBytes + got);
        }
        const auto* p = reinterpret_cast<const unsigned char*>(buf_.data());
        for (std::size_t i = 0; i < want; ++i) {
            Sample s;
            s.x = std::bit_cast<float>(get_u32(p));
            s.y = std::bit_cast<float>(get_u32(p + 4));
            s.z = std::bit_cast<float>(get_u32(p + 8));
            out.push_back(s);
            p += kSampleBytes;
        }
        read_ += want;
        if (read_ == header_.n_samples) check_trailing();
        return want;
    }

private:
    void check_trailing() {
        if (trailing_checked_) return;
        trailing_checked_ = true;
        if (in_.peek() != std::char_traits<char>::eof()) {
            throw parse_error("trailing bytes after payload",
                              payload_offset_ + header_.n_samples * kSampleBytes);
        }
    }

    std::ifstream in_;
    RecordingHeader header_;
    std::uint64_t read_ = 0;
    std::uint64_t payload_offset_ = 0;
    bool trailing_checked_ = false;
    std::vector<char> buf_;
};

class CsvSignalReader final : public SignalReader {
public:
    CsvSignalReader(const fs::path& path, int f0_hint) : in_(path) {
        if (!in_) throw io_error("cannot open " + path.string());
        if (f0_hint <= 0) {
            throw config_error("CSV signal input requires a sampling frequency flag");
        }
        header_.f0 = static_cast<std::uint32_t>(f0_hint);
        header_.n_samples = 0;
        std::string line;
        if (!std::getline(in_, line)) throw parse_error("empty file", 0);
        const std::uint64_t header_bytes = line.size() + 1;
        const auto head = strip_cr(line);
        if (head == "t,x,y,z") {
            has_t_ = true;
        } else if (head == "x,y,z") {
            has_t_ = false;
        } else {
            throw parse_error("unexpected CSV header (want t,x,y,z or x,y,z)", 0);
        }
        offset_ = header_bytes;
    }

    const RecordingHeader& header() const override { return header_; }

    std::size_t read_chunk(std::vector<Sample>& out, std::size_t max_samples) override {
        std::size_t added = 0;
        std::string line;
        while (added < max_samples && std::getline(in_, line)) {
            const std::uint64_t line_offset = offset_;
            offset_ += line.size() + 1;
            const auto body = strip_cr(line);
            if (body.empty()) continue;
            const auto fields = split_csv(body);
            const std::size_t expect = has_t_ ? 4 : 3;
            if (fields.size() != expect) {
                throw parse_error("wrong field count in signal row", line_offset);
            }
            std::size_t base = 0;
            if (has_t_) {
                const double t = parse_double_field(fields[0], line_offset, "timestamp");
                if (have_last_t_ && t < last_t_) {
                    throw parse_error("non-monotone timestamp", line_offset);
                }
                last_t_ = t;
                have_last_t_ = true;
                base = 1;
            }
            Sample s;
            s.x = parse_double_field(fields[base], line_offset, "x value");
            s.y = parse_double_field(fields[base + 1], line_offset, "y value");
            s.z = parse_double_field(fields[base + 2], line_offset, "z value");
            out.push_back(s);
            ++added;
        }
        return added;
    }

private:
    std::ifstream in_;
    RecordingHeader header_;
    bool has_t_ = false;
    bool have_last_t_ = false;
    double last_t_ = 0.0;
    std::uint64_t offset_ = 0;
};

SignalFormat sniff_format(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) return SignalFormat::binary;
    return SignalFormat::csv;
}

}  // namespace

std::unique_ptr<SignalReader> open_signal(const fs::path& path, SignalFormat format, int f0_hint) {
    if (format == SignalFormat::auto_detect) format = sniff_format(path);
    if (format == SignalFormat::binary) return std::make_unique<BinaryReader>(path);
    return std::make_unique<CsvSignalReader>(path, f0_hint);
}

TriaxialSignal read_signal(const fs::path& path, SignalFormat format, int f0_hint) {
    auto reader = open_signal(path, format, f0_hint);
    TriaxialSignal signal;
    signal.f0 = static_cast<int>(reader->header().f0);
    while (reader->read_chunk(signal.samples, 1 << 20) > 0) {
    }
    return signal;
}

BinarySignalWriter::BinarySignalWriter(const fs::path& path, const RecordingHeader& header)
    : file_(path), expected_(header.n_samples) {
    if (header.f0 == 0) throw config_error("sampling frequency must be positive");
    if (header.subject_id.size() > 0xffff) throw config_error("subject id too long");
    std::string head;
    head.append(kMagic, 4);
    put_u16(head, header.version);
    put_u32(head, header.f0);
    put_u64(head, header.n_samples);
    put_u64(head, static_cast<std::uint64_t>(header.start_unix));
    put_u16(head, static_cast<std::uint16_t>(header.subject_id.size()));
    head.append(header.subject_id);
    file_.stream().write(head.data(), static_cast<std::streamsize>(head.size()));
}

void BinarySignalWriter::append(std::span<const Sample> samples) {
    std::string block;
    block.reserve(samples.size() * kSampleBytes);
    for (const auto& s : samples) {
        put_u32(block, std::bit_cast<std::uint32_t>(static_cast<float>(s.x)));
        put_u32(block, std::bit_cast<std::uint32_t>(static_cast<float>(s.y)));
        put_u32(block, std::bit_cast<std::uint32_t>(static_cast<float>(s.z)));
    }
    file_.stream().write(block.data(), static_cast<std::streamsize>(block.size()));
    written_ += samples.size();
}

void BinarySignalWriter::finish() {
    if (written_ != expected_) {
        throw io_error("payload sample count does not match the header");
    }
    file_.commit();
}

void write_signal_binary(const fs::path& path, const TriaxialSignal& signal,
                         const RecordingHeader& header_in) {
    RecordingHeader header = header_in;
    header.f0 = static_cast<std::uint32_t>(signal.f0);
    header.n_samples = static_cast<std::uint64_t>(signal.size());
    BinarySignalWriter writer(path, header);
    writer.append(signal.samples);
    writer.finish();
}

void write_signal_csv(const fs::path& path, const TriaxialSignal& signal) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "t,x,y,z\n";
    for (std::int64_t i = 0; i < signal.size(); ++i) {
        const auto& s = signal.samples[static_cast<std::size_t>(i)];
        out << format_double(static_cast<double>(i) / signal.f0) << ',' << format_double(s.x)
            << ',' << format_double(s.y) << ',' << format_double(s.z) << '\n';
    }
    file.commit();
}

LabelTrack read_labels(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty label file", 0);
    if (strip_cr(line) != "start_s,end_s,label") {
        throw parse_error("unexpected label header (want start_s,end_s,label)", 0);
    }
    std::uint64_t offset = line.size() + 1;
    LabelTrack track;
    while (std::getline(in, line)) {
        const std::uint64_t line_offset = offset;
        offset += line.size() + 1;
        const auto body = strip_cr(line);
        if (body.empty()) continue;
        const auto fields = split_csv(body);
        if (fields.size() != 3) throw parse_error("wrong field count in label row", line_offset);
        LabelInterval iv;
        iv.start_s = parse_double_field(fields[0], line_offset, "start_s");
        iv.end_s = parse_double_field(fields[1], line_offset, "end_s");
        iv.label = std::string(fields[2]);
        track.intervals.push_back(std::move(iv));
    }
    track.validate();
    return track;
}

void write_labels(const fs::path& path, const LabelTrack& track) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "start_s,end_s,label\n";
    for (const auto& iv : track.intervals) {
        out << format_double(iv.start_s) << ',' << format_double(iv.end_s) << ',' << iv.label
            << '\n';
    }
    file.commit();
}

EpochCsvWriter::EpochCsvWriter(const fs::path& path) : file_(path) {
    file_.stream() << "epoch,y,w,v\n";
}

void EpochCsvWriter::write(const EpochRecord& r) {
    auto& out = file_.stream();
    out << r.epoch_index << ',' << (r.y ? 1 : 0) << ',';
    if (r.w) out << format_double(*r.w);
    out << ',' << format_double(r.v) << '\n';
}

void EpochCsvWriter::finish() { file_.commit(); }

void write_epochs_csv(const fs::path& path, std::span<const EpochRecord> records) {
    EpochCsvWriter writer(path);
    for (const auto& r : records) writer.write(r);
    writer.finish();
}

std::vector<EpochRecord> read_epochs_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty epoch file", 0);
    if (strip_cr(line) != "epoch,y,w,v") {
        throw parse_error("unexpected epoch header (want epoch,y,w,v)", 0);
    }
    std::uint64_t offset = line.size() + 1;
    std::vector<EpochRecord> out;
    while (std::getline(in, line)) {
        const std::uint64_t line_offset = offset;
        offset += line.size() + 1;
        const auto body = strip_cr(line);
        if (body.empty()) continue;
        const auto fields = split_csv(body);
        if (fields.size() != 4) throw parse_error("wrong field count in epoch row", line_offset);
        EpochRecord r;
        r.epoch_index = parse_int_field(fields[0], line_offset, "epoch index");
        const std::int64_t y = parse_int_field(fields[1], line_offset, "walking flag");
        if (y != 0 && y != 1) throw parse_error("walking flag must be 0 or 1", line_offset);
        r.y = y == 1;
        if (!fields[2].empty()) {
            r.w = parse_double_field(fields[2], line_offset, "IWF value");
        } else if (r.y) {
            throw parse_error("walking epoch without an IWF value", line_offset);
        }
        r.v = parse_double_field(fields[3], line_offset, "vm value");
        r.support_count = r.y ? 1 : 0;
        out.push_back(r);
    }
    return out;
}

void write_bouts_csv(const fs::path& path, std::span<const Bout> bouts) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "start_epoch,n_windows,duration_s,mean_iwf,mean_vm\n";
    for (const auto& b : bouts) {
        out << b.start_epoch << ',' << b.n_windows << ',' << format_double(b.duration_s) << ','
            << format_double(b.mean_iwf) << ',' << format_double(b.mean_vm) << '\n';
    }
    file.commit();
}

std::vector<Bout> read_bouts_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty bout file", 0);
    if (strip_cr(line) != "start_epoch,n_windows,duration_s,mean_iwf,mean_vm") {
        throw parse_error("unexpected bout header", 0);
    }
    std::uint64_t offset = line.size() + 1;
    std::vector<Bout> out;
    while (std::getline(in, line)) {
        const std::uint64_t line_offset = offset;
        offset += line.size() + 1;
        const auto body = strip_cr(line);
        if (body.empty()) continue;
        const auto fields = split_csv(body);
        if (fields.size() != 5) throw parse_error("wrong field count in bout row", line_offset);
        Bout b;
        b.start_epoch = parse_int_field(fields[0], line_offset, "start epoch");
        b.n_windows = parse_int_field(fields[1], line_offset, "window count");
        b.duration_s = parse_double_field(fields[2], line_offset, "duration");
        b.mean_iwf = parse_double_field(fields[3], line_offset, "mean IWF");
        b.mean_vm = parse_double_field(fields[4], line_offset, "mean vm");
        out.push_back(b);
    }
    return out;
}

void write_summary_json(const fs::path& path, const SummaryData& summary) {
    nlohmann::json j;
    j["n_epochs"] = summary.n_epochs;
    j["walking_seconds"] = summary.walking_epochs;
    j["n_bouts"] = summary.n_bouts;
    j["total_bout_seconds"] = summary.total_bout_seconds;
    j["band_edges_s"] = summary.band_edges;
    auto days = nlohmann::json::array();
    for (const auto& d : summary.per_day) {
        nlohmann::json day;
        day["day"] = d.day;
        day["walking_seconds"] = d.walking_seconds;
        day["n_bouts"] = d.n_bouts;
        day["bout_seconds"] = d.bout_seconds;
        day["band_counts"] = d.band_counts;
        day["band_seconds"] = d.band_seconds;
        days.push_back(std::move(day));
    }
    j["per_day"] = std::move(days);
    nlohmann::json iwf;
    iwf["count"] = summary.iwf.count;
    if (summary.iwf.count > 0) {
        iwf["min"] = summary.iwf.min;
        iwf["q1"] = summary.iwf.q1;
        iwf["median"] = summary.iwf.median;
        iwf["q3"] = summary.iwf.q3;
        iwf["max"] = summary.iwf.max;
    } else {
        iwf["min"] = nullptr;
        iwf["q1"] = nullptr;
        iwf["median"] = nullptr;
        iwf["q3"] = nullptr;
        iwf["max"] = nullptr;
    }
    j["iwf"] = std::move(iwf);

    AtomicFile file(path);
    file.stream() << j.dump(2) << '\n';
    file.commit();
}

void write_hourly_csv(const fs::path& path, std::span<const std::array<double, 24>> matrix) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "day";
    for (int h = 0; h < 24; ++h) {
        out << ",h" << (h < 10 ? "0" : "") << h;
    }
    out << '\n';
    for (std::size_t d = 0; d < matrix.size(); ++d) {
        out << d;
        for (int h = 0; h < 24; ++h) out << ',' << format_double(matrix[d][static_cast<std::size_t>(h)]);
        out << '\n';
    }
    file.commit();
}

void write_bands_csv(const fs::path& path, const SummaryData& summary) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "day,band,low_s,high_s,count,seconds\n";
    for (const auto& d : summary.per_day) {
        for (std::size_t band = 0; band < d.band_counts.size(); ++band) {
            const double low = band == 0 ? 0.0 : summary.band_edges[band - 1];
            out << d.day << ',' << band << ',' << format_double(low) << ',';
            if (band < summary.band_edges.size()) out << format_double(summary.band_edges[band]);
            out << ',' << d.band_counts[band] << ',' << format_double(d.band_seconds[band])
                << '\n';
        }
    }
    file.commit();
}

IwfCsvWriter::IwfCsvWriter(const fs::path& path) : file_(path) {
    file_.stream() << "epoch,w\n";
}

void IwfCsvWriter::write(const EpochRecord& r) {
    if (r.y && r.w) {
        file_.stream() << r.epoch_index << ',' << format_double(*r.w) << '\n';
    }
}

void IwfCsvWriter::finish() { file_.commit(); }

void write_roc_csv(const fs::path& path, std::span<const RocPoint> points) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "threshold,fpr,tpr\n";
    for (const auto& p : points) {
        out << format_double(p.threshold) << ',' << format_double(p.fpr) << ','
            << format_double(p.tpr) << '\n';
    }
    file.commit();
}

void write_roc_json(const fs::path& path, double auc, std::int64_t n_seconds,
                    std::int64_t n_walking) {
    nlohmann::json j;
    j["auc"] = auc;
    j["n_seconds"] = n_seconds;
    j["n_walking_seconds"] = n_walking;
    AtomicFile file(path);
    file.stream() << j.dump(2) << '\n';
    file.commit();
}

void write_delta_csv(const fs::path& path, std::span<const DeltaRow> rows) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "subject_id,n_m,delta\n";
    for (const auto& r : rows) {
        out << r.subject_id << ',' << r.n_m << ',' << format_double(r.delta) << '\n';
    }
    file.commit();
}

void write_cv_csv(const fs::path& path, std::span<const CvRow> rows) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "subject_id,n_m,cv\n";
    for (const auto& r : rows) {
        out << r.subject_id << ',' << r.n_m << ',';
        if (r.cv) out << format_double(*r.cv);
        out << '\n';
    }
    file.commit();
}

std::vector<SubjectFiles> read_subject_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw parse_error("empty manifest", 0);
    if (strip_cr(line) != "subject_id,signal_path,label_path") {
        throw parse_error("unexpected manifest header (want subject_id,signal_path,label_path)",
                          0);
    }
    std::uint64_t offset = line.size() + 1;
    std::vector<SubjectFiles> out;
    while (std::getline(in, line)) {
        const std::uint64_t line_offset = offset;
        offset += line.size() + 1;
        const auto body = strip_cr(line);
        if (body.empty()) continue;
        const auto fields = split_csv(body);
        if (fields.size() != 3) {
            throw parse_error("wrong field count in manifest row", line_offset);
        }
        SubjectFiles files;
        files.subject_id = std::string(fields[0]);
        files.signal_path = fs::path(std::string(fields[1]));
        files.label_path = fs::path(std::string(fields[2]));
        out.push_back(std::move(files));
    }
    return out;
}

}  // namespace shw
