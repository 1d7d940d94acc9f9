#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "quadcorr/errors.hpp"
#include "quadcorr/random.hpp"
#include "quadcorr/tagstream.hpp"

using namespace quadcorr;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("quadcorr_tagstream_" + name);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void append_u64le(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

// Hand-built file image, independent of the library's writer.
std::vector<std::uint8_t> raw_file(std::uint16_t version, std::uint64_t tick_ps,
                                   std::uint64_t t_m,
                                   const std::vector<std::uint64_t>& words) {
    std::vector<std::uint8_t> out{'Q', 'T', 'A', 'G'};
    out.push_back(static_cast<std::uint8_t>(version & 0xff));
    out.push_back(static_cast<std::uint8_t>(version >> 8));
    out.push_back(0);
    out.push_back(0);
    append_u64le(out, tick_ps);
    append_u64le(out, t_m);
    for (std::uint64_t w : words) append_u64le(out, w);
    return out;
}

std::uint64_t word(std::uint64_t ticks, int channel) {
    return (ticks << 4) | (std::uint64_t{1} << (channel - 1));
}

TagStream sample_stream() {
    TagStream s(2000, 1000);
    s.mutable_channel(1) = {5, 10, 900};
    s.mutable_channel(2) = {10};
    s.mutable_channel(3) = {0, 11};
    s.mutable_channel(4) = {999};
    s.validate();
    return s;
}

TagStream random_stream(std::uint64_t seed, std::size_t tags_per_channel,
                        std::uint64_t t_m) {
    TagStream s(2000, t_m);
    Rng rng(seed);
    for (int ch = 1; ch <= 4; ++ch) {
        auto& v = s.mutable_channel(ch);
        for (std::size_t i = 0; i < tags_per_channel; ++i)
            v.push_back(rng.next_u64() % (t_m + 1));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    s.validate();
    return s;
}

}  // namespace

TEST_CASE("stream invariants") {
    TagStream s(2000, 100);
    CHECK(s.empty());
    CHECK(s.duration_seconds() == doctest::Approx(100 * 2e-9));
    CHECK(s.tick_seconds() == doctest::Approx(2e-9));

    s.append(3, 1);
    s.append(7, 1);
    s.append(3, 2);
    CHECK(s.size() == 3);
    CHECK_NOTHROW(s.validate());

    SUBCASE("non-monotonic channel") {
        s.append(6, 1);
        CHECK_THROWS_AS(s.validate(), NonMonotonicTime);
    }
    SUBCASE("duplicate tick on one channel") {
        s.append(7, 1);
        CHECK_THROWS_AS(s.validate(), NonMonotonicTime);
    }
    SUBCASE("tag beyond duration") {
        s.append(101, 3);
        CHECK_THROWS_AS(s.validate(), TagBeyondDuration);
    }
    SUBCASE("ticks overflow the 60-bit format") {
        TagStream big(2000, TagStream::kMaxTicks);
        big.set_t_m_ticks(TagStream::kMaxTicks + 1);
        big.append(TagStream::kMaxTicks + 1, 1);
        CHECK_THROWS_AS(big.validate(), TicksOverflow);
    }
}

TEST_CASE("singles rates divide counts by duration") {
    const TagStream s = sample_stream();  // 1000 ticks * 2 ns = 2 us
    const auto r = singles_rates(s);
    CHECK(r[0] == doctest::Approx(3 / 2e-6));
    CHECK(r[1] == doctest::Approx(1 / 2e-6));
    CHECK(r[2] == doctest::Approx(2 / 2e-6));
    CHECK(r[3] == doctest::Approx(1 / 2e-6));

    TagStream zero(2000, 0);
    CHECK_THROWS_AS(singles_rates(zero), ZeroDuration);
}

TEST_CASE("to_tags orders by tick then channel") {
    const TagStream s = sample_stream();
    const auto tags = to_tags(s);
    REQUIRE(tags.size() == 7);
    CHECK(tags.front() == TimeTag{0, 3});
    // Tick 10 appears on channels 1 and 2: channel ascending on ties.
    CHECK(tags[2] == TimeTag{10, 1});
    CHECK(tags[3] == TimeTag{10, 2});
    CHECK(tags.back() == TimeTag{999, 4});
    for (std::size_t i = 1; i < tags.size(); ++i) {
        const bool ordered = tags[i - 1].ticks < tags[i].ticks ||
                             (tags[i - 1].ticks == tags[i].ticks &&
                              tags[i - 1].channel < tags[i].channel);
        CHECK(ordered);
    }
    CHECK(from_tags(tags, s.tick_duration_ps(), s.t_m_ticks()) == s);
}

TEST_CASE("merge and slice") {
    TagStream a(2000, 50);
    a.mutable_channel(1) = {1, 10};
    TagStream b(2000, 80);
    b.mutable_channel(1) = {5};
    b.mutable_channel(2) = {6};

    const TagStream m = merge_streams(a, b);
    CHECK(m.t_m_ticks() == 80);
    CHECK(m.channel(1) == std::vector<std::uint64_t>{1, 5, 10});
    CHECK(m.channel(2) == std::vector<std::uint64_t>{6});

    TagStream other(1000, 50);
    CHECK_THROWS_AS(merge_streams(a, other), InvalidConfig);

    const TagStream cut = slice(m, 5, 10);  // half-open
    CHECK(cut.channel(1) == std::vector<std::uint64_t>{5});
    CHECK(cut.channel(2) == std::vector<std::uint64_t>{6});
    CHECK(cut.t_m_ticks() == 80);
}

TEST_CASE("file image layout") {
    TagStream s(2000, 20);
    s.mutable_channel(1) = {1};
    s.mutable_channel(4) = {1};
    const auto bytes = write_tag_file(s);

    // 24-byte preamble + 2 records.
    REQUIRE(bytes.size() == 24 + 16);
    CHECK(bytes[0] == 'Q');
    CHECK(bytes[1] == 'T');
    CHECK(bytes[2] == 'A');
    CHECK(bytes[3] == 'G');
    CHECK(bytes[4] == 1);  // version, little endian
    CHECK(bytes[5] == 0);
    CHECK(bytes[8] == 0xd0);  // 2000 ps
    CHECK(bytes[9] == 0x07);
    CHECK(bytes[16] == 20);  // T_m
    // Same tick: channel 1 record first, then channel 4.
    CHECK(bytes[24] == ((1u << 4) | 0b0001));
    CHECK(bytes[32] == ((1u << 4) | 0b1000));

    CHECK(parse_tag_file(bytes) == s);
}

TEST_CASE("file round trips") {
    const TagStream s = random_stream(99, 300, 100000);
    const auto bytes = write_tag_file(s);
    CHECK(parse_tag_file(bytes) == s);

    const auto path = temp_path("roundtrip.qtag");
    write_tag_file(s, path.string());
    CHECK(read_tag_file(path.string()) == s);
    CHECK(read_bytes(path) == bytes);
    std::filesystem::remove(path);
}

TEST_CASE("selective channel load still validates every record") {
    const TagStream s = sample_stream();
    const auto path = temp_path("mask.qtag");
    write_tag_file(s, path.string());

    const TagStream only13 = read_tag_file(path.string(), 0b0101);
    CHECK(only13.channel(1) == s.channel(1));
    CHECK(only13.channel(3) == s.channel(3));
    CHECK(only13.channel(2).empty());
    CHECK(only13.channel(4).empty());
    CHECK(only13.t_m_ticks() == s.t_m_ticks());
    std::filesystem::remove(path);

    // A bad record on an unselected channel must still be rejected.
    const auto bad = raw_file(1, 2000, 100, {word(5, 2), word(5, 2)});
    const auto bad_path = temp_path("bad_masked.qtag");
    std::ofstream out(bad_path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bad.data()),
              static_cast<std::streamsize>(bad.size()));
    out.close();
    CHECK_THROWS_AS(read_tag_file(bad_path.string(), 0b0001), DuplicateChannelTick);
    std::filesystem::remove(bad_path);
}

TEST_CASE("parse rejects malformed files") {
    CHECK_THROWS_AS(parse_tag_file(raw_file(1, 2000, 10, {}).data(), 10),
                    TruncatedRecord);

    auto wrong_magic = raw_file(1, 2000, 10, {});
    wrong_magic[0] = 'X';
    CHECK_THROWS_AS(parse_tag_file(wrong_magic), BadMagic);

    CHECK_THROWS_AS(parse_tag_file(raw_file(2, 2000, 10, {})), UnsupportedVersion);

    auto short_record = raw_file(1, 2000, 10, {word(1, 1)});
    short_record.pop_back();
    CHECK_THROWS_AS(parse_tag_file(short_record), TruncatedRecord);

    CHECK_THROWS_AS(parse_tag_file(raw_file(1, 2000, 10, {word(5, 1), word(4, 1)})),
                    NonMonotonicTime);
    CHECK_THROWS_AS(parse_tag_file(raw_file(1, 2000, 10, {word(5, 1), word(5, 1)})),
                    DuplicateChannelTick);
    CHECK_THROWS_AS(parse_tag_file(raw_file(1, 2000, 10, {word(11, 1)})),
                    TagBeyondDuration);

    // Low nibble must be one-hot.
    CHECK_THROWS_AS(parse_tag_file(raw_file(1, 2000, 10, {std::uint64_t{5} << 4})),
                    InvalidChannelMask);
    CHECK_THROWS_AS(parse_tag_file(raw_file(1, 2000, 10, {(std::uint64_t{5} << 4) | 3})),
                    InvalidChannelMask);

    // Same tick on two channels is fine when ordered channel-ascending.
    CHECK_NOTHROW(parse_tag_file(raw_file(1, 2000, 10, {word(5, 2), word(5, 3)})));
    // Descending channel order on a tie violates the canonical order.
    CHECK_THROWS_AS(parse_tag_file(raw_file(1, 2000, 10, {word(5, 3), word(5, 2)})),
                    NonMonotonicTime);
}

TEST_CASE("incremental writer matches the one-shot writer") {
    const TagStream s = random_stream(7, 500, 1 << 20);
    const auto path = temp_path("writer.qtag");
    {
        TagFileHeader header;
        header.tick_duration_ps = s.tick_duration_ps();
        header.t_m_ticks = s.t_m_ticks();
        TagFileWriter writer(path.string(), header);
        for (const TimeTag& tag : to_tags(s)) writer.write(tag.ticks, tag.channel);
        CHECK(writer.records_written() == s.size());
        writer.close();
    }
    CHECK(read_bytes(path) == write_tag_file(s));
    std::filesystem::remove(path);
}

TEST_CASE("incremental writer enforces canonical order") {
    const auto path = temp_path("writer_order.qtag");
    TagFileHeader header;
    header.t_m_ticks = 100;
    TagFileWriter writer(path.string(), header);
    writer.write(5, 2);
    CHECK_THROWS_AS(writer.write(4, 1), NonMonotonicTime);
    CHECK_THROWS_AS(writer.write(5, 1), NonMonotonicTime);
    CHECK_THROWS_AS(writer.write(5, 2), DuplicateChannelTick);
    CHECK_THROWS_AS(writer.write(6, 0), InvalidChannelMask);
    CHECK_THROWS_AS(writer.write(6, 5), InvalidChannelMask);
    CHECK_THROWS_AS(writer.write(101, 1), TagBeyondDuration);
    CHECK_NOTHROW(writer.write(5, 3));
    writer.close();
    std::filesystem::remove(path);
}

TEST_CASE("scanner yields the canonical sequence") {
    const TagStream s = random_stream(21, 400, 1 << 18);
    const auto path = temp_path("scanner.qtag");
    write_tag_file(s, path.string());

    TagFileScanner scanner(path.string());
    CHECK(scanner.header().version == 1);
    CHECK(scanner.header().tick_duration_ps == s.tick_duration_ps());
    CHECK(scanner.header().t_m_ticks == s.t_m_ticks());

    std::vector<TimeTag> seen;
    std::uint64_t ticks = 0;
    int channel = 0;
    while (scanner.next(ticks, channel)) seen.push_back({ticks, channel});
    CHECK(seen == to_tags(s));
    CHECK(scanner.records_read() == s.size());
    std::filesystem::remove(path);
}

TEST_CASE("scanner rejects a corrupt record mid-file") {
    const auto bytes =
        raw_file(1, 2000, 100, {word(1, 1), word(2, 2), word(2, 1), word(1, 3)});
    const auto path = temp_path("scanner_bad.qtag");
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.close();

    TagFileScanner scanner(path.string());
    std::uint64_t ticks = 0;
    int channel = 0;
    CHECK(scanner.next(ticks, channel));
    CHECK(scanner.next(ticks, channel));
    CHECK_THROWS_AS(scanner.next(ticks, channel), NonMonotonicTime);
    std::filesystem::remove(path);
}
