#pragma once

#include "wfsvm/error.hpp"
#include "wfsvm/image.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace wfsvm {

class PgmError : public ParseError
{
public:
    enum class Kind { BadMagic, BadHeader, UnsupportedMaxval, Truncated, PixelAboveMaxval };

    PgmError(Kind kind, const std::string& what) : ParseError(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Decodes an 8-bit binary PGM (P5). Pixel values are taken verbatim; a
/// maxval below 255 is accepted but nothing is rescaled.
GrayImage parse_pgm(std::span<const std::uint8_t> bytes);

/// Encodes as P5 with maxval 255.
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);

GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

} // namespace wfsvm
