// Copyright (c) 2026 The redact developers
// Distributed under the MIT software license, see the accompanying
// file LICENSE or http://www.opensource.org/licenses/mit-license.php.

#include "redact/bytes.hpp"

#include <algorithm>

namespace redact {

namespace {

int hex_value(char c)
{
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

Digest Digest::from_bytes(ByteView bytes)
{
    if (bytes.size() != size) {
        throw DecodeError("digest must be 32 bytes, got " + std::to_string(bytes.size()));
    }
    Digest d;
    std::copy(bytes.begin(), bytes.end(), d.bytes_.begin());
    return d;
}

Digest Digest::from_hex(std::string_view hex)
{
    return from_bytes(redact::from_hex(hex));
}

std::string Digest::hex() const
{
    return to_hex(view());
}

bool Digest::is_zero() const
{
    return std::all_of(bytes_.begin(), bytes_.end(), [](std::uint8_t b) { return b == 0; });
}

std::string to_hex(ByteView bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

Bytes from_hex(std::string_view hex)
{
    if (hex.size() % 2 != 0) throw DecodeError("hex string has odd length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_value(hex[2 * i]);
        int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw DecodeError("invalid hex character");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

Bytes to_bytes(std::string_view text)
{
    return {text.begin(), text.end()};
}

std::string to_string(ByteView bytes)
{
    return {bytes.begin(), bytes.end()};
}

ByteWriter& ByteWriter::u8(std::uint8_t v)
{
    out_.push_back(v);
    return *this;
}

ByteWriter& ByteWriter::u16(std::uint16_t v)
{
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
    out_.push_back(static_cast<std::uint8_t>(v));
    return *this;
}

ByteWriter& ByteWriter::u32(std::uint32_t v)
{
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v)
{
    for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
}

ByteWriter& ByteWriter::raw(ByteView bytes)
{
    out_.insert(out_.end(), bytes.begin(), bytes.end());
    return *this;
}

ByteWriter& ByteWriter::prefixed(ByteView bytes)
{
    if (bytes.size() > UINT32_MAX) throw std::length_error("field exceeds 4-byte length prefix");
    u32(static_cast<std::uint32_t>(bytes.size()));
    return raw(bytes);
}

ByteView ByteReader::raw(std::size_t n)
{
    if (remaining() < n) throw DecodeError("unexpected end of input");
    ByteView out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t ByteReader::u8()
{
    return raw(1)[0];
}

std::uint16_t ByteReader::u16()
{
    auto b = raw(2);
    return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t ByteReader::u32()
{
    auto b = raw(4);
    std::uint32_t v = 0;
    for (auto x : b) v = (v << 8) | x;
    return v;
}

std::uint64_t ByteReader::u64()
{
    auto b = raw(8);
    std::uint64_t v = 0;
    for (auto x : b) v = (v << 8) | x;
    return v;
}

Digest ByteReader::digest()
{
    return Digest::from_bytes(raw(Digest::size));
}

Bytes ByteReader::prefixed()
{
    std::uint32_t n = u32();
    auto b = raw(n);
    return {b.begin(), b.end()};
}

void ByteReader::expect_done() const
{
    if (!done()) throw DecodeError("trailing bytes after record");
}

} // namespace redact
