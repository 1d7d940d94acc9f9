#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "quadcorr/errors.hpp"

namespace quadcorr {

using std::int64_t;
using std::uint64_t;

// Detector channels are 1..4; 1,2 are the Stokes arm, 3,4 the anti-Stokes arm.
inline constexpr int kNumChannels = 4;

inline bool is_valid_channel(int ch) { return ch >= 1 && ch <= kNumChannels; }
inline bool is_stokes(int ch) { return ch == 1 || ch == 2; }

struct TimeTag {
    uint64_t ticks = 0;
    int channel = 1;
    friend bool operator==(const TimeTag&, const TimeTag&) = default;
};

// Four-channel timestamp stream at fixed tick resolution.  Tags are stored
// per channel as sorted tick arrays (strictly increasing within a channel);
// T_m is the acquisition span in ticks and is stored explicitly so quiet
// tails still count toward rates.
class TagStream {
   public:
    static constexpr uint64_t kMaxTicks = (uint64_t{1} << 60) - 1;
    static constexpr uint64_t kDefaultTickPs = 2000;  // 2 ns

    TagStream() = default;
    TagStream(uint64_t tick_duration_ps, uint64_t t_m_ticks)
        : tick_ps_(tick_duration_ps), t_m_(t_m_ticks) {}

    uint64_t tick_duration_ps() const { return tick_ps_; }
    void set_tick_duration_ps(uint64_t ps) { tick_ps_ = ps; }

    uint64_t t_m_ticks() const { return t_m_; }
    void set_t_m_ticks(uint64_t t) { t_m_ = t; }

    double duration_seconds() const { return static_cast<double>(t_m_) * tick_ps_ * 1e-12; }
    double tick_seconds() const { return static_cast<double>(tick_ps_) * 1e-12; }

    const std::vector<uint64_t>& channel(int ch) const { return channels_[ch - 1]; }
    std::vector<uint64_t>& mutable_channel(int ch) { return channels_[ch - 1]; }

    uint64_t size() const {
        uint64_t n = 0;
        for (const auto& c : channels_) n += c.size();
        return n;
    }

    bool empty() const { return size() == 0; }

    // Appends a tag; caller must keep per-channel ticks strictly increasing
    // (checked by validate()).
    void append(uint64_t ticks, int ch) { channels_[ch - 1].push_back(ticks); }

    // Enforces the stream invariants: per-channel strict monotonicity,
    // ticks <= T_m, ticks within the 60-bit format range.
    void validate() const;

    friend bool operator==(const TagStream&, const TagStream&) = default;

   private:
    std::array<std::vector<uint64_t>, kNumChannels> channels_{};
    uint64_t tick_ps_ = kDefaultTickPs;
    uint64_t t_m_ = 0;
};

// Per-channel singles rates R_k in counts/second.
std::array<double, 4> singles_rates(const TagStream& stream);

// Canonically ordered flat tag list (ticks ascending, channel ascending on
// ties) and its inverse.
std::vector<TimeTag> to_tags(const TagStream& stream);
TagStream from_tags(const std::vector<TimeTag>& tags, uint64_t tick_duration_ps,
                    uint64_t t_m_ticks);

// Union of two streams over the longer duration; both must share a tick size.
TagStream merge_streams(const TagStream& a, const TagStream& b);

// Tags with lo_tick <= t < hi_tick; tick size and T_m carried over.
TagStream slice(const TagStream& stream, uint64_t lo_tick, uint64_t hi_tick);

// ---- binary tag-file format --------------------------------------------------
// 16-byte header: magic "QTAG", u16 LE version = 1, u16 LE reserved = 0,
// u64 LE tick duration (ps); then u64 LE T_m in ticks; then N 8-byte records,
// each a u64 LE word with bits 0-3 = one-hot channel code (0b0001 = ch1 ...
// 0b1000 = ch4) and bits 4-63 = ticks.  Records sorted by ticks non-decreasing;
// same-channel duplicate ticks are invalid.

struct TagFileHeader {
    uint16_t version = 1;
    uint64_t tick_duration_ps = TagStream::kDefaultTickPs;
    uint64_t t_m_ticks = 0;
};

TagStream parse_tag_file(const std::uint8_t* data, std::size_t size);
TagStream parse_tag_file(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> write_tag_file(const TagStream& stream);
void write_tag_file(const TagStream& stream, const std::string& path);

// Reads a tag file; `channel_mask` selects which channels to materialize
// (bit k-1 = channel k) so a multi-gigabyte file can be processed one channel
// pair at a time.  Validation always covers every record.
TagStream read_tag_file(const std::string& path, unsigned channel_mask = 0xF);

// Incremental tag-file writer: emits the preamble up front, then accepts
// records one at a time in canonical order (ticks ascending, channel
// ascending on ties).  Lets a producer write multi-gigabyte files without
// ever materializing the stream.
class TagFileWriter {
   public:
    TagFileWriter(const std::string& path, const TagFileHeader& header);
    ~TagFileWriter();
    TagFileWriter(const TagFileWriter&) = delete;
    TagFileWriter& operator=(const TagFileWriter&) = delete;

    void write(uint64_t ticks, int channel);
    void close();  // flushes and closes; further writes are invalid

    uint64_t records_written() const { return records_written_; }

   private:
    void flush();

    std::FILE* file_ = nullptr;
    std::string path_;
    TagFileHeader header_;
    std::vector<std::uint8_t> buffer_;
    uint64_t records_written_ = 0;
    uint64_t last_ticks_ = 0;
    int last_channel_ = 0;
    std::array<uint64_t, 4> last_channel_ticks_{};
    std::array<bool, 4> channel_seen_{};
};

// Sequential record scanner over a tag file with incremental validation;
// the building block for streaming analyses that never hold the full stream.
class TagFileScanner {
   public:
    explicit TagFileScanner(const std::string& path);
    ~TagFileScanner();
    TagFileScanner(const TagFileScanner&) = delete;
    TagFileScanner& operator=(const TagFileScanner&) = delete;

    const TagFileHeader& header() const { return header_; }

    // Next validated record; false at end of file.
    bool next(uint64_t& ticks, int& channel);

    uint64_t records_read() const { return records_read_; }

   private:
    void refill();

    std::FILE* file_ = nullptr;
    TagFileHeader header_;
    std::vector<std::uint8_t> buffer_;
    std::size_t pos_ = 0;
    std::size_t avail_ = 0;
    bool eof_ = false;
    uint64_t records_read_ = 0;
    uint64_t last_ticks_ = 0;
    int last_channel_ = 0;
    std::array<uint64_t, 4> last_channel_ticks_;
    std::array<bool, 4> channel_seen_{};
};

}  // namespace quadcorr
