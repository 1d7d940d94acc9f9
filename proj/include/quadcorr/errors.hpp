#pragma once

#include <stdexcept>
#include <string>

namespace quadcorr {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// ---- tag-file format errors -------------------------------------------------
struct BadMagic final : Error {
    using Error::Error;
};
struct UnsupportedVersion final : Error {
    using Error::Error;
};
struct NonMonotonicTime final : Error {
    using Error::Error;
};
struct DuplicateChannelTick final : Error {
    using Error::Error;
};
struct TruncatedRecord final : Error {
    using Error::Error;
};
struct TicksOverflow final : Error {
    using Error::Error;
};
// A record whose low nibble is not a one-hot channel code.
struct InvalidChannelMask final : Error {
    using Error::Error;
};
// A record whose tick count exceeds the stream duration T_m.
struct TagBeyondDuration final : Error {
    using Error::Error;
};

// ---- stream/analysis errors -------------------------------------------------
struct ZeroDuration final : Error {
    using Error::Error;
};
struct SameChannel final : Error {
    using Error::Error;
};
struct MismatchedAnchorChannel final : Error {
    using Error::Error;
};
struct ZeroRate final : Error {
    using Error::Error;
};

// ---- analytic-model errors --------------------------------------------------
struct DomainError final : Error {
    using Error::Error;
};
struct InconsistentDelays final : Error {
    using Error::Error;
};

// ---- inference errors -------------------------------------------------------
struct ZeroEfficiency final : Error {
    using Error::Error;
};
struct NoConvergence final : Error {
    using Error::Error;
};
struct DegenerateInput final : Error {
    using Error::Error;
};

// ---- configuration errors ---------------------------------------------------
struct InvalidConfig final : Error {
    using Error::Error;
};
struct IoError final : Error {
    using Error::Error;
};

}  // namespace quadcorr
