// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#ifndef REDACT_BYTES_HPP
#define REDACT_BYTES_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace redact {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Thrown when a wire or storage encoding cannot be parsed.
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fixed 32-byte content identifier (TX hashes, Merkle nodes, block links).
class Digest {
public:
    static constexpr std::size_t size = 32;

    Digest() = default;
    explicit Digest(const std::array<std::uint8_t, size>& bytes) : bytes_(bytes) {}

    /// Throws DecodeError unless `bytes` is exactly 32 bytes long.
    static Digest from_bytes(ByteView bytes);
    static Digest from_hex(std::string_view hex);

    const std::uint8_t* data() const { return bytes_.data(); }
    std::uint8_t* data() { return bytes_.data(); }
    ByteView view() const { return {bytes_.data(), size}; }
    Bytes to_bytes() const { return {bytes_.begin(), bytes_.end()}; }
    std::string hex() const;
    bool is_zero() const;

    std::uint8_t operator[](std::size_t i) const { return bytes_[i]; }
    std::uint8_t& operator[](std::size_t i) { return bytes_[i]; }

    auto operator<=>(const Digest&) const = default;

private:
    std::array<std::uint8_t, size> bytes_{};
};

std::string to_hex(ByteView bytes);
/// Throws DecodeError on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);
Bytes to_bytes(std::string_view text);
std::string to_string(ByteView bytes);

/// Appends big-endian integers and 4-byte length-prefixed fields.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v);
    ByteWriter& u16(std::uint16_t v);
    ByteWriter& u32(std::uint32_t v);
    ByteWriter& u64(std::uint64_t v);
    ByteWriter& raw(ByteView bytes);
    ByteWriter& digest(const Digest& d) { return raw(d.view()); }
    /// 4-byte big-endian length followed by the bytes.
    ByteWriter& prefixed(ByteView bytes);

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

/// Bounds-checked reader mirroring ByteWriter. All failures throw DecodeError.
class ByteReader {
public:
    explicit ByteReader(ByteView in) : in_(in) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    ByteView raw(std::size_t n);
    Digest digest();
    Bytes prefixed();

    std::size_t remaining() const { return in_.size() - pos_; }
    bool done() const { return pos_ == in_.size(); }
    void expect_done() const;

private:
    ByteView in_;
    std::size_t pos_ = 0;
};

} // namespace redact

template <>
struct std::hash<redact::Digest> {
    std::size_t operator()(const redact::Digest& d) const noexcept
    {
        std::size_t h = 0;
        for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | d[i];
        return h;
    }
};

#endif // REDACT_BYTES_HPP
