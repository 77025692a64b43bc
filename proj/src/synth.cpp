#include "shw/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "shw/io.hpp"

namespace fs = std::filesystem;

namespace shw {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 scale(const Vec3& a, double c) { return {a[0] * c, a[1] * c, a[2] * c}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 normalize(const Vec3& a) {
    const double n = norm(a);
    if (n <= 0) throw config_error("zero-length direction vector");
    return scale(a, 1.0 / n);
}

struct Mat3 {
    double m[3][3];

    static Mat3 identity() {
        Mat3 r{};
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }

    Vec3 apply(const Vec3& v) const {
        return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
                m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
                m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r{};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
                r.m[i][j] = s;
            }
        }
        return r;
    }
};

// Rodrigues rotation taking unit vector a onto unit vector b.
Mat3 rotation_between(const Vec3& a, const Vec3& b) {
    const Vec3 axis = cross(a, b);
    const double s = norm(axis);
    const double c = dot(a, b);
    if (s < 1e-12) {
        if (c > 0) return Mat3::identity();
        // Opposite vectors: rotate half a turn about any perpendicular axis.
        Vec3 ref{1, 0, 0};
        if (std::abs(dot(a, ref)) > 0.9) ref = {0, 1, 0};
        const Vec3 p = normalize(cross(a, ref));
        Mat3 r{};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) r.m[i][j] = 2.0 * p[i] * p[j] - (i == j ? 1.0 : 0.0);
        }
        return r;
    }
    const Vec3 k = scale(axis, 1.0 / s);
    Mat3 kx{};
    kx.m[0][1] = -k[2];
    kx.m[0][2] = k[1];
    kx.m[1][0] = k[2];
    kx.m[1][2] = -k[0];
    kx.m[2][0] = -k[1];
    kx.m[2][1] = k[0];
    Mat3 r = Mat3::identity();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double kx2 = 0.0;
            for (int l = 0; l < 3; ++l) kx2 += kx.m[i][l] * kx.m[l][j];
            r.m[i][j] += s * kx.m[i][j] + (1.0 - c) * kx2;
        }
    }
    return r;
}

Mat3 rotate_about(const Vec3& axis_unit, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const Vec3& k = axis_unit;
    Mat3 r{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) r.m[i][j] = (1.0 - c) * k[i] * k[j] + (i == j ? c : 0.0);
    }
    r.m[0][1] += -s * k[2];
    r.m[0][2] += s * k[1];
    r.m[1][0] += s * k[2];
    r.m[1][2] += -s * k[0];
    r.m[2][0] += -s * k[1];
    r.m[2][1] += s * k[0];
    return r;
}

Vec3 perpendicular_unit(const Vec3& g) {
    Vec3 ref{1, 0, 0};
    if (std::abs(dot(normalize(g), ref)) > 0.9) ref = {0, 1, 0};
    return normalize(cross(g, ref));
}

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 1));
}

void validate_segment(const SegmentSpec& seg, int f0) {
    if (seg.duration_s < 1.0) throw config_error("segment must last at least 1 second");
    if (seg.noise_sd < 0) throw config_error("noise level must be non-negative");
    if (norm(seg.gravity) <= 0) throw config_error("gravity direction must be non-zero");
    if (seg.kind == SegmentKind::harmonic_walk) {
        if (!(seg.fundamental_hz > 0) || seg.fundamental_hz >= static_cast<double>(f0) / 2.0) {
            throw config_error("walk fundamental must lie in (0, f0/2)");
        }
        if (seg.amplitudes.empty()) throw config_error("walk needs at least one harmonic amplitude");
        for (double a : seg.amplitudes) {
            if (a < 0) throw config_error("harmonic amplitudes must be non-negative");
        }
    }
    for (std::size_t i = 0; i < seg.rotations.size(); ++i) {
        const auto& ev = seg.rotations[i];
        if (ev.time_s < 0 || ev.time_s > seg.duration_s) {
            throw config_error("rotation event outside its segment");
        }
        if (i > 0 && seg.rotations[i].time_s < seg.rotations[i - 1].time_s) {
            throw config_error("rotation events must be ordered");
        }
        if (norm(ev.new_gravity) <= 0) throw config_error("rotation target must be non-zero");
    }
}

double smoothstep01(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * (3.0 - 2.0 * u);
}

struct CompoundComponent {
    double freq;
    double amp;
    double phase;
    double am_freq;
    double am_phase;
    Vec3 dir;
};

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    while (true) {
        Vec3 v{n(rng), n(rng), n(rng)};
        const double len = norm(v);
        if (len > 1e-6) return scale(v, 1.0 / len);
    }
}

void generate_segment(const SegmentSpec& seg, int f0, std::uint64_t seg_seed,
                      const std::function<void(std::span<const Sample>)>& sink) {
    std::mt19937_64 rng(seg_seed);
    std::normal_distribution<double> noise(0.0, seg.noise_sd > 0 ? seg.noise_sd : 1.0);
    const Vec3 g = normalize(seg.gravity);
    const auto n_samples = static_cast<std::int64_t>(std::llround(seg.duration_s * f0));

    // Segment-level randomness is drawn up front so the per-sample stream
    // stays aligned regardless of kind.
    Vec3 pos_target = g;
    std::vector<CompoundComponent> comps;
    Vec3 walk_dir{1, 0, 0};
    if (seg.kind == SegmentKind::position_change) {
        std::uniform_real_distribution<double> angle(25.0, 60.0);
        const Vec3 axis = normalize(cross(g, random_unit(rng)));
        pos_target = rotate_about(axis, angle(rng) * std::numbers::pi / 180.0).apply(g);
    } else if (seg.kind == SegmentKind::compound) {
        std::uniform_int_distribution<int> n_comp(4, 6);
        std::uniform_real_distribution<double> freq(0.6, 6.0);
        std::uniform_real_distribution<double> amp(0.08, 0.35);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        std::uniform_real_distribution<double> am_freq(0.05, 0.3);
        const int n = n_comp(rng);
        for (int i = 0; i < n; ++i) {
            CompoundComponent c;
            c.freq = freq(rng);
            c.amp = amp(rng);
            c.phase = phase(rng);
            c.am_freq = am_freq(rng);
            c.am_phase = phase(rng);
            c.dir = random_unit(rng);
            comps.push_back(c);
        }
    } else if (seg.kind == SegmentKind::harmonic_walk) {
        walk_dir = perpendicular_unit(g);
    }

    std::vector<double> phases(seg.amplitudes.size(), 0.0);
    std::copy_n(seg.phases.begin(), std::min(seg.phases.size(), phases.size()), phases.begin());

    Mat3 rot = Mat3::identity();
    std::size_t next_event = 0;
    Vec3 current_gravity = g;

    constexpr std::int64_t kBlock = 1 << 15;
    std::vector<Sample> block;
    block.reserve(static_cast<std::size_t>(std::min(kBlock, n_samples)));

    for (std::int64_t i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / f0;
        while (next_event < seg.rotations.size() && seg.rotations[next_event].time_s <= t) {
            const Vec3 target = normalize(seg.rotations[next_event].new_gravity);
            rot = rotation_between(current_gravity, target) * rot;
            current_gravity = target;
            ++next_event;
        }

        Vec3 clean = g;
        switch (seg.kind) {
            case SegmentKind::rest:
                break;
            case SegmentKind::position_change: {
                const double u = smoothstep01((t - 0.35 * seg.duration_s) / (0.3 * seg.duration_s));
                clean = normalize(add(scale(g, 1.0 - u), scale(pos_target, u)));
                break;
            }
            case SegmentKind::compound: {
                for (const auto& c : comps) {
                    const double env = 0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * c.am_freq * t +
                                                            c.am_phase);
                    const double v =
                        c.amp * env * std::sin(2.0 * std::numbers::pi * c.freq * t + c.phase);
                    clean = add(clean, scale(c.dir, v));
                }
                break;
            }
            case SegmentKind::harmonic_walk: {
                double osc = 0.0;
                const double base = seg.fundamental_hz * t + 0.5 * seg.drift_hz_per_s * t * t;
                for (std::size_t j = 0; j < seg.amplitudes.size(); ++j) {
                    const double harmonic = static_cast<double>(j + 2) / 2.0;
                    osc += seg.amplitudes[j] *
                           std::sin(2.0 * std::numbers::pi * harmonic * base + phases[j]);
                }
                clean = add(clean, scale(walk_dir, osc));
                break;
            }
        }

        Vec3 rotated = rot.apply(clean);
        if (seg.noise_sd > 0) {
            rotated[0] += noise(rng);
            rotated[1] += noise(rng);
            rotated[2] += noise(rng);
        }
        block.push_back(Sample{rotated[0], rotated[1], rotated[2]});
        if (static_cast<std::int64_t>(block.size()) == kBlock) {
            sink(block);
            block.clear();
        }
    }
    if (!block.empty()) sink(block);
}

const char* kind_label(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::rest:
            return "rest";
        case SegmentKind::position_change:
            return "position_change";
        case SegmentKind::compound:
            return "compound";
        case SegmentKind::harmonic_walk:
            return kWalkingLabel;
    }
    return "rest";
}

}  // namespace

std::int64_t schedule_samples(std::span<const SegmentSpec> specs, int f0) {
    std::int64_t total = 0;
    for (const auto& seg : specs) total += static_cast<std::int64_t>(std::llround(seg.duration_s * f0));
    return total;
}

LabelTrack schedule_labels(std::span<const SegmentSpec> specs) {
    LabelTrack track;
    double t = 0.0;
    for (const auto& seg : specs) {
        track.intervals.push_back({t, t + seg.duration_s, kind_label(seg.kind)});
        t += seg.duration_s;
    }
    track.validate();
    return track;
}

void generate_stream(std::span<const SegmentSpec> specs, int f0, std::uint64_t seed,
                     const std::function<void(std::span<const Sample>)>& sink) {
    if (f0 <= 0) throw config_error("sampling frequency must be a positive integer");
    for (const auto& seg : specs) validate_segment(seg, f0);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        generate_segment(specs[i], f0, substream_seed(seed, i), sink);
    }
}

GeneratedSignal generate(std::span<const SegmentSpec> specs, int f0, std::uint64_t seed) {
    GeneratedSignal out;
    out.signal.f0 = f0;
    out.signal.samples.reserve(static_cast<std::size_t>(schedule_samples(specs, f0)));
    generate_stream(specs, f0, seed, [&](std::span<const Sample> block) {
        out.signal.samples.insert(out.signal.samples.end(), block.begin(), block.end());
    });
    out.labels = schedule_labels(specs);
    return out;
}

std::vector<SegmentSpec> random_schedule(const CorpusSpec& spec, std::uint64_t seed) {
    if (spec.duration_s < 1.0) throw config_error("corpus duration must be at least 1 second");
    const double wsum = spec.w_rest + spec.w_position + spec.w_compound + spec.w_walk;
    if (wsum <= 0) throw config_error("mixture weights must not all be zero");

    std::mt19937_64 rng(mix64(seed ^ 0x5eedULL));
    std::uniform_real_distribution<double> pick(0.0, wsum);
    std::uniform_real_distribution<double> walk_f(spec.walk_fmin_hz, spec.walk_fmax_hz);
    std::uniform_real_distribution<double> amp(0.20, 0.45);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> drift(-spec.max_drift_hz_per_s, spec.max_drift_hz_per_s);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<SegmentSpec> schedule;
    double remaining = spec.duration_s;
    while (remaining >= 1.0) {
        SegmentSpec seg;
        seg.noise_sd = spec.noise_sd;
        const double r = pick(rng);
        double dur;
        if (r < spec.w_rest) {
            seg.kind = SegmentKind::rest;
            dur = std::floor(std::uniform_real_distribution<double>(30.0, 120.0)(rng));
        } else if (r < spec.w_rest + spec.w_position) {
            seg.kind = SegmentKind::position_change;
            dur = std::floor(std::uniform_real_distribution<double>(10.0, 30.0)(rng));
        } else if (r < spec.w_rest + spec.w_position + spec.w_compound) {
            seg.kind = SegmentKind::compound;
            dur = std::floor(std::uniform_real_distribution<double>(20.0, 90.0)(rng));
        } else {
            seg.kind = SegmentKind::harmonic_walk;
            dur = std::floor(std::uniform_real_distribution<double>(12.0, 90.0)(rng));
            seg.fundamental_hz = walk_f(rng);
            const double a = amp(rng);
            seg.amplitudes = {a, a / 2.0, a / 6.0};
            seg.phases = {phase(rng), phase(rng), phase(rng)};
            seg.drift_hz_per_s = drift(rng);
            if (unit(rng) < 0.3) {
                RotationEvent ev;
                ev.time_s = std::floor(dur * std::uniform_real_distribution<double>(0.3, 0.7)(rng));
                const Vec3 axis = random_unit(rng);
                const double angle = std::uniform_real_distribution<double>(
                                         20.0, 90.0)(rng) * std::numbers::pi / 180.0;
                const Vec3 g{0.0, 0.0, 1.0};
                const Vec3 target = rotate_about(normalize(axis), angle).apply(g);
                ev.new_gravity = target;
                seg.rotations.push_back(ev);
            }
        }
        seg.duration_s = std::min(dur, std::floor(remaining));
        if (seg.duration_s < 1.0) break;
        schedule.push_back(std::move(seg));
        remaining -= schedule.back().duration_s;
    }
    return schedule;
}

SubjectTruth write_subject(const fs::path& out_dir, const std::string& subject_id,
                           std::span<const SegmentSpec> schedule, int f0, std::uint64_t seed,
                           std::int64_t start_unix) {
    fs::create_directories(out_dir);
    SubjectTruth truth;
    truth.subject_id = subject_id;
    truth.seed = seed;
    truth.signal_file = "subject_" + subject_id + ".bin";
    truth.label_file = "subject_" + subject_id + "_labels.csv";

    RecordingHeader header;
    header.f0 = static_cast<std::uint32_t>(f0);
    header.n_samples = static_cast<std::uint64_t>(schedule_samples(schedule, f0));
    header.start_unix = start_unix;
    header.subject_id = subject_id;
    BinarySignalWriter writer(out_dir / truth.signal_file, header);
    generate_stream(schedule, f0, seed,
                    [&](std::span<const Sample> block) { writer.append(block); });
    writer.finish();

    const LabelTrack labels = schedule_labels(schedule);
    write_labels(out_dir / truth.label_file, labels);

    // Truth stats: merge back-to-back walking intervals into one bout.
    double open_start = -1.0;
    double open_end = -1.0;
    auto close = [&] {
        if (open_start >= 0) {
            truth.bout_lengths_s.push_back(open_end - open_start);
            truth.walking_seconds += open_end - open_start;
        }
        open_start = -1.0;
    };
    for (const auto& iv : labels.intervals) {
        if (iv.label != kWalkingLabel) continue;
        if (open_start >= 0 && iv.start_s == open_end) {
            open_end = iv.end_s;
        } else {
            close();
            open_start = iv.start_s;
            open_end = iv.end_s;
        }
    }
    close();
    for (const auto& seg : schedule) {
        if (seg.kind == SegmentKind::harmonic_walk) truth.iwf_hz.push_back(seg.fundamental_hz);
    }
    return truth;
}

CorpusManifest make_corpus(const CorpusSpec& spec, std::uint64_t seed, const fs::path& out_dir) {
    if (spec.n_subjects < 1) throw config_error("corpus needs at least one subject");
    CorpusManifest manifest;
    manifest.seed = seed;
    manifest.f0 = spec.f0;
    for (int s = 0; s < spec.n_subjects; ++s) {
        const std::uint64_t subject_seed = substream_seed(seed, 0x100000 + static_cast<std::uint64_t>(s));
        const std::string id = (s + 1 < 10 ? "s0" : "s") + std::to_string(s + 1);
        const auto schedule = random_schedule(spec, subject_seed);
        manifest.subjects.push_back(
            write_subject(out_dir, id, schedule, spec.f0, subject_seed, spec.start_unix));
    }

    nlohmann::json j;
    j["seed"] = manifest.seed;
    j["f0"] = manifest.f0;
    auto subjects = nlohmann::json::array();
    for (const auto& t : manifest.subjects) {
        nlohmann::json s;
        s["subject_id"] = t.subject_id;
        s["seed"] = t.seed;
        s["signal"] = t.signal_file;
        s["labels"] = t.label_file;
        s["walking_seconds"] = t.walking_seconds;
        s["bout_lengths_s"] = t.bout_lengths_s;
        s["iwf_hz"] = t.iwf_hz;
        subjects.push_back(std::move(s));
    }
    j["subjects"] = std::move(subjects);
    AtomicFile file(out_dir / "manifest.json");
    file.stream() << j.dump(2) << '\n';
    file.commit();
    return manifest;
}

}  // namespace shw
