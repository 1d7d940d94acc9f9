#include "quadcorr/tagstream.hpp"

#include <algorithm>
#include <cstring>

namespace quadcorr {

namespace {

constexpr std::uint8_t kMagic[4] = {0x51, 0x54, 0x41, 0x47};  // "QTAG"
constexpr std::size_t kHeaderBytes = 16;
constexpr std::size_t kPreambleBytes = kHeaderBytes + 8;  // header + T_m

uint64_t load_u64le(const std::uint8_t* p) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

uint16_t load_u16le(const std::uint8_t* p) {
    return static_cast<uint16_t>(p[0] | (uint16_t{p[1]} << 8));
}

void store_u64le(std::uint8_t* p, uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void store_u16le(std::uint8_t* p, uint16_t v) {
    p[0] = static_cast<std::uint8_t>(v);
    p[1] = static_cast<std::uint8_t>(v >> 8);
}

// One-hot low nibble -> channel 1..4; 0 when the mask is not one-hot.
int channel_from_mask(unsigned nibble) {
    switch (nibble) {
        case 0x1: return 1;
        case 0x2: return 2;
        case 0x4: return 3;
        case 0x8: return 4;
        default: return 0;
    }
}

// Shared incremental record validation: global non-decreasing ticks with
// channel-ascending tie order, strictly increasing per channel, ticks <= T_m,
// one-hot channel mask.
struct RecordValidator {
    uint64_t t_m;
    uint64_t last_ticks = 0;
    int last_channel = 0;
    std::array<uint64_t, 4> last_channel_ticks{};
    std::array<bool, 4> channel_seen{};

    // Decodes and checks one record word; returns {ticks, channel}.
    std::pair<uint64_t, int> check(uint64_t word, uint64_t index) {
        const int ch = channel_from_mask(static_cast<unsigned>(word & 0xF));
        const uint64_t ticks = word >> 4;
        if (ch == 0)
            throw InvalidChannelMask("record " + std::to_string(index) +
                                     ": channel mask is not one-hot");
        if (ticks > t_m)
            throw TagBeyondDuration("record " + std::to_string(index) +
                                    ": ticks exceed stream duration T_m");
        if (index > 0 && ticks < last_ticks)
            throw NonMonotonicTime("record " + std::to_string(index) +
                                   ": ticks decreased");
        if (channel_seen[ch - 1] && ticks == last_channel_ticks[ch - 1])
            throw DuplicateChannelTick("record " + std::to_string(index) +
                                       ": duplicate tick on channel " +
                                       std::to_string(ch));
        if (index > 0 && ticks == last_ticks && ch < last_channel)
            throw NonMonotonicTime("record " + std::to_string(index) +
                                   ": channel order violated on a tick tie");
        last_ticks = ticks;
        last_channel = ch;
        last_channel_ticks[ch - 1] = ticks;
        channel_seen[ch - 1] = true;
        return {ticks, ch};
    }
};

TagFileHeader parse_preamble(const std::uint8_t* data, std::size_t size) {
    if (size < kPreambleBytes)
        throw TruncatedRecord("file shorter than the 24-byte preamble");
    if (std::memcmp(data, kMagic, 4) != 0) throw BadMagic("bad magic bytes");
    TagFileHeader h;
    h.version = load_u16le(data + 4);
    if (h.version != 1)
        throw UnsupportedVersion("unsupported format version " +
                                 std::to_string(h.version));
    h.tick_duration_ps = load_u64le(data + 8);
    h.t_m_ticks = load_u64le(data + 16);
    return h;
}

}  // namespace

void TagStream::validate() const {
    for (int ch = 1; ch <= kNumChannels; ++ch) {
        const auto& ticks = channel(ch);
        for (std::size_t i = 0; i < ticks.size(); ++i) {
            if (ticks[i] > kMaxTicks)
                throw TicksOverflow("channel " + std::to_string(ch) +
                                    ": ticks exceed 60 bits");
            if (ticks[i] > t_m_)
                throw TagBeyondDuration("channel " + std::to_string(ch) +
                                        ": tag beyond T_m");
            if (i > 0 && ticks[i] <= ticks[i - 1])
                throw NonMonotonicTime("channel " + std::to_string(ch) +
                                       ": ticks not strictly increasing");
        }
    }
}

std::array<double, 4> singles_rates(const TagStream& stream) {
    if (stream.t_m_ticks() == 0) throw ZeroDuration("T_m is zero");
    const double t = stream.duration_seconds();
    std::array<double, 4> r{};
    for (int ch = 1; ch <= kNumChannels; ++ch)
        r[ch - 1] = static_cast<double>(stream.channel(ch).size()) / t;
    return r;
}

std::vector<TimeTag> to_tags(const TagStream& stream) {
    std::vector<TimeTag> tags;
    tags.reserve(stream.size());
    std::array<std::size_t, 4> cursor{};
    for (;;) {
        int best = 0;
        uint64_t best_ticks = 0;
        for (int ch = 1; ch <= kNumChannels; ++ch) {
            const auto& v = stream.channel(ch);
            if (cursor[ch - 1] >= v.size()) continue;
            const uint64_t t = v[cursor[ch - 1]];
            if (best == 0 || t < best_ticks) {
                best = ch;
                best_ticks = t;
            }
        }
        if (best == 0) break;
        tags.push_back({best_ticks, best});
        ++cursor[best - 1];
    }
    return tags;
}

TagStream from_tags(const std::vector<TimeTag>& tags, uint64_t tick_duration_ps,
                    uint64_t t_m_ticks) {
    TagStream s(tick_duration_ps, t_m_ticks);
    std::array<std::size_t, 4> counts{};
    for (const auto& tag : tags) {
        if (!is_valid_channel(tag.channel))
            throw InvalidChannelMask("channel out of range");
        ++counts[tag.channel - 1];
    }
    for (int ch = 1; ch <= kNumChannels; ++ch)
        s.mutable_channel(ch).reserve(counts[ch - 1]);
    for (const auto& tag : tags) s.append(tag.ticks, tag.channel);
    for (int ch = 1; ch <= kNumChannels; ++ch)
        std::sort(s.mutable_channel(ch).begin(), s.mutable_channel(ch).end());
    s.validate();
    return s;
}

TagStream merge_streams(const TagStream& a, const TagStream& b) {
    if (a.tick_duration_ps() != b.tick_duration_ps())
        throw InvalidConfig("cannot merge streams with different tick sizes");
    TagStream out(a.tick_duration_ps(), std::max(a.t_m_ticks(), b.t_m_ticks()));
    for (int ch = 1; ch <= kNumChannels; ++ch) {
        auto& dst = out.mutable_channel(ch);
        const auto& x = a.channel(ch);
        const auto& y = b.channel(ch);
        dst.resize(x.size() + y.size());
        std::merge(x.begin(), x.end(), y.begin(), y.end(), dst.begin());
    }
    out.validate();
    return out;
}

TagStream slice(const TagStream& stream, uint64_t lo_tick, uint64_t hi_tick) {
    TagStream out(stream.tick_duration_ps(), stream.t_m_ticks());
    for (int ch = 1; ch <= kNumChannels; ++ch) {
        const auto& v = stream.channel(ch);
        auto lo = std::lower_bound(v.begin(), v.end(), lo_tick);
        auto hi = std::lower_bound(lo, v.end(), hi_tick);
        out.mutable_channel(ch).assign(lo, hi);
    }
    return out;
}

TagStream parse_tag_file(const std::uint8_t* data, std::size_t size) {
    const TagFileHeader h = parse_preamble(data, size);
    const std::size_t body = size - kPreambleBytes;
    if (body % 8 != 0) throw TruncatedRecord("trailing partial record");
    const std::size_t n = body / 8;
    const std::uint8_t* rec = data + kPreambleBytes;

    // First pass: count per channel for exact reservation.
    std::array<std::size_t, 4> counts{};
    for (std::size_t i = 0; i < n; ++i) {
        const int ch = channel_from_mask(static_cast<unsigned>(rec[i * 8] & 0xF));
        if (ch != 0) ++counts[ch - 1];
    }

    TagStream s(h.tick_duration_ps, h.t_m_ticks);
    for (int ch = 1; ch <= kNumChannels; ++ch)
        s.mutable_channel(ch).reserve(counts[ch - 1]);

    RecordValidator v{h.t_m_ticks};
    for (std::size_t i = 0; i < n; ++i) {
        const auto [ticks, ch] = v.check(load_u64le(rec + i * 8), i);
        s.append(ticks, ch);
    }
    return s;
}

TagStream parse_tag_file(const std::vector<std::uint8_t>& bytes) {
    return parse_tag_file(bytes.data(), bytes.size());
}

std::vector<std::uint8_t> write_tag_file(const TagStream& stream) {
    stream.validate();
    std::vector<std::uint8_t> out(kPreambleBytes + 8 * stream.size());
    std::memcpy(out.data(), kMagic, 4);
    store_u16le(out.data() + 4, 1);
    store_u16le(out.data() + 6, 0);
    store_u64le(out.data() + 8, stream.tick_duration_ps());
    store_u64le(out.data() + 16, stream.t_m_ticks());

    std::uint8_t* rec = out.data() + kPreambleBytes;
    std::array<std::size_t, 4> cursor{};
    for (;;) {
        int best = 0;
        uint64_t best_ticks = 0;
        for (int ch = 1; ch <= kNumChannels; ++ch) {
            const auto& v = stream.channel(ch);
            if (cursor[ch - 1] >= v.size()) continue;
            const uint64_t t = v[cursor[ch - 1]];
            if (best == 0 || t < best_ticks) {
                best = ch;
                best_ticks = t;
            }
        }
        if (best == 0) break;
        if (best_ticks > TagStream::kMaxTicks)
            throw TicksOverflow("ticks exceed 60 bits");
        store_u64le(rec, (best_ticks << 4) | (uint64_t{1} << (best - 1)));
        rec += 8;
        ++cursor[best - 1];
    }
    return out;
}

void write_tag_file(const TagStream& stream, const std::string& path) {
    stream.validate();
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + path);

    std::uint8_t preamble[kPreambleBytes];
    std::memcpy(preamble, kMagic, 4);
    store_u16le(preamble + 4, 1);
    store_u16le(preamble + 6, 0);
    store_u64le(preamble + 8, stream.tick_duration_ps());
    store_u64le(preamble + 16, stream.t_m_ticks());
    if (std::fwrite(preamble, 1, kPreambleBytes, f) != kPreambleBytes) {
        std::fclose(f);
        throw IoError("write failed: " + path);
    }

    constexpr std::size_t kBufRecords = 1 << 20;
    std::vector<std::uint8_t> buf;
    buf.reserve(kBufRecords * 8);
    std::array<std::size_t, 4> cursor{};
    auto flush = [&] {
        if (buf.empty()) return;
        if (std::fwrite(buf.data(), 1, buf.size(), f) != buf.size()) {
            std::fclose(f);
            throw IoError("write failed: " + path);
        }
        buf.clear();
    };
    for (;;) {
        int best = 0;
        uint64_t best_ticks = 0;
        for (int ch = 1; ch <= kNumChannels; ++ch) {
            const auto& v = stream.channel(ch);
            if (cursor[ch - 1] >= v.size()) continue;
            const uint64_t t = v[cursor[ch - 1]];
            if (best == 0 || t < best_ticks) {
                best = ch;
                best_ticks = t;
            }
        }
        if (best == 0) break;
        if (best_ticks > TagStream::kMaxTicks) {
            std::fclose(f);
            throw TicksOverflow("ticks exceed 60 bits");
        }
        const uint64_t word = (best_ticks << 4) | (uint64_t{1} << (best - 1));
        std::uint8_t enc[8];
        store_u64le(enc, word);
        buf.insert(buf.end(), enc, enc + 8);
        if (buf.size() >= kBufRecords * 8) flush();
        ++cursor[best - 1];
    }
    flush();
    if (std::fclose(f) != 0) throw IoError("close failed: " + path);
}

TagFileWriter::TagFileWriter(const std::string& path,
                             const TagFileHeader& header)
    : path_(path), header_(header) {
    file_ = std::fopen(path.c_str(), "wb");
    if (!file_) throw IoError("cannot open for writing: " + path);
    buffer_.reserve(std::size_t{8} << 20);
    std::uint8_t preamble[kPreambleBytes];
    std::memcpy(preamble, kMagic, 4);
    store_u16le(preamble + 4, header.version);
    store_u16le(preamble + 6, 0);
    store_u64le(preamble + 8, header.tick_duration_ps);
    store_u64le(preamble + 16, header.t_m_ticks);
    if (std::fwrite(preamble, 1, kPreambleBytes, file_) != kPreambleBytes) {
        std::fclose(file_);
        file_ = nullptr;
        throw IoError("write failed: " + path);
    }
}

TagFileWriter::~TagFileWriter() {
    if (file_) {
        try {
            close();
        } catch (...) {
            if (file_) std::fclose(file_);
            file_ = nullptr;
        }
    }
}

void TagFileWriter::flush() {
    if (buffer_.empty()) return;
    if (std::fwrite(buffer_.data(), 1, buffer_.size(), file_) !=
        buffer_.size()) {
        throw IoError("write failed: " + path_);
    }
    buffer_.clear();
}

void TagFileWriter::write(uint64_t ticks, int channel) {
    if (!file_) throw IoError("writer already closed: " + path_);
    if (!is_valid_channel(channel))
        throw InvalidChannelMask("channel must be in 1..4");
    if (ticks > TagStream::kMaxTicks)
        throw TicksOverflow("ticks exceed 60 bits");
    const uint64_t word =
        (ticks << 4) | (uint64_t{1} << (channel - 1));
    RecordValidator v{header_.t_m_ticks, last_ticks_, last_channel_,
                      last_channel_ticks_, channel_seen_};
    v.check(word, records_written_);
    last_ticks_ = v.last_ticks;
    last_channel_ = v.last_channel;
    last_channel_ticks_ = v.last_channel_ticks;
    channel_seen_ = v.channel_seen;
    std::uint8_t enc[8];
    store_u64le(enc, word);
    buffer_.insert(buffer_.end(), enc, enc + 8);
    ++records_written_;
    if (buffer_.size() >= (std::size_t{8} << 20)) flush();
}

void TagFileWriter::close() {
    if (!file_) return;
    flush();
    const int rc = std::fclose(file_);
    file_ = nullptr;
    if (rc != 0) throw IoError("close failed: " + path_);
}

TagStream read_tag_file(const std::string& path, unsigned channel_mask) {
    TagFileScanner scanner(path);
    TagStream s(scanner.header().tick_duration_ps, scanner.header().t_m_ticks);
    uint64_t ticks = 0;
    int ch = 0;
    while (scanner.next(ticks, ch)) {
        if (channel_mask & (1u << (ch - 1))) s.append(ticks, ch);
    }
    return s;
}

TagFileScanner::TagFileScanner(const std::string& path) {
    file_ = std::fopen(path.c_str(), "rb");
    if (!file_) throw IoError("cannot open: " + path);
    buffer_.resize(std::size_t{8} << 20);
    std::uint8_t preamble[kPreambleBytes];
    const std::size_t got = std::fread(preamble, 1, kPreambleBytes, file_);
    try {
        header_ = parse_preamble(preamble, got);
    } catch (...) {
        std::fclose(file_);
        file_ = nullptr;
        throw;
    }
    last_channel_ticks_.fill(0);
}

TagFileScanner::~TagFileScanner() {
    if (file_) std::fclose(file_);
}

void TagFileScanner::refill() {
    const std::size_t keep = avail_ - pos_;
    if (keep > 0) std::memmove(buffer_.data(), buffer_.data() + pos_, keep);
    pos_ = 0;
    avail_ = keep;
    const std::size_t got =
        std::fread(buffer_.data() + avail_, 1, buffer_.size() - avail_, file_);
    avail_ += got;
    if (got == 0) eof_ = true;
}

bool TagFileScanner::next(uint64_t& ticks, int& channel) {
    if (avail_ - pos_ < 8) {
        if (!eof_) refill();
        if (avail_ - pos_ < 8) {
            if (avail_ - pos_ != 0)
                throw TruncatedRecord("trailing partial record");
            return false;
        }
    }
    const uint64_t word = load_u64le(buffer_.data() + pos_);
    pos_ += 8;

    RecordValidator v{header_.t_m_ticks, last_ticks_, last_channel_,
                      last_channel_ticks_, channel_seen_};
    const auto [t, ch] = v.check(word, records_read_);
    last_ticks_ = v.last_ticks;
    last_channel_ = v.last_channel;
    last_channel_ticks_ = v.last_channel_ticks;
    channel_seen_ = v.channel_seen;

    ++records_read_;
    ticks = t;
    channel = ch;
    return true;
}

}  // namespace quadcorr
