#include "wfsvm/pgm.hpp"

#include "wfsvm/textio.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace wfsvm {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height)
{
    if (width <= 0 || height <= 0)
        throw ValidationError("image dimensions must be positive");
    pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels))
{
    if (width <= 0 || height <= 0)
        throw ValidationError("image dimensions must be positive");
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw ValidationError("pixel buffer size does not match dimensions");
}

std::uint8_t GrayImage::clamped(int x, int y) const noexcept
{
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return pixels_[index(x, y)];
}

namespace {

class HeaderReader
{
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    // Header integers may be separated by whitespace and '#' comments.
    long long next_int(const char* field)
    {
        skip_space_and_comments();
        std::size_t start = pos_;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_]))
            ++pos_;
        if (start == pos_) {
            if (pos_ >= bytes_.size())
                throw PgmError(PgmError::Kind::BadHeader, std::string("PGM header ends before ") + field);
            throw PgmError(PgmError::Kind::BadHeader, std::string("PGM header: expected integer for ") + field);
        }
        if (pos_ - start > 9)
            throw PgmError(PgmError::Kind::BadHeader, std::string("PGM header: ") + field + " too large");
        long long value = 0;
        for (std::size_t i = start; i < pos_; ++i)
            value = value * 10 + (bytes_[i] - '0');
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    void end_of_header()
    {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw PgmError(PgmError::Kind::BadHeader, "PGM header: missing whitespace after maxval");
        ++pos_;
    }

    std::size_t position() const noexcept { return pos_; }

private:
    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 2;
};

} // namespace

GrayImage parse_pgm(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw PgmError(PgmError::Kind::BadMagic, "unsupported magic: only binary PGM (P5) is accepted");

    HeaderReader header(bytes);
    long long width = header.next_int("width");
    long long height = header.next_int("height");
    long long maxval = header.next_int("maxval");
    if (width <= 0 || height <= 0)
        throw PgmError(PgmError::Kind::BadHeader, "PGM header: dimensions must be positive");
    if (maxval <= 0 || maxval > 255)
        throw PgmError(PgmError::Kind::UnsupportedMaxval,
                       "unsupported maxval " + std::to_string(maxval) + ": only 8-bit PGM is accepted");
    header.end_of_header();

    std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::size_t offset = header.position();
    if (bytes.size() - offset < count)
        throw PgmError(PgmError::Kind::Truncated,
                       "truncated pixel data: expected " + std::to_string(count) + " bytes, found "
                           + std::to_string(bytes.size() - offset));

    std::vector<std::uint8_t> pixels(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                                     bytes.begin() + static_cast<std::ptrdiff_t>(offset + count));
    if (maxval < 255) {
        auto bad = std::find_if(pixels.begin(), pixels.end(), [&](std::uint8_t v) { return v > maxval; });
        if (bad != pixels.end())
            throw PgmError(PgmError::Kind::PixelAboveMaxval, "pixel value exceeds declared maxval");
    }
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img)
{
    std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

GrayImage read_pgm(const std::filesystem::path& path)
{
    auto bytes = read_binary_file(path);
    try {
        return parse_pgm(bytes);
    } catch (const PgmError& e) {
        throw PgmError(e.kind(), path.string() + ": " + e.what());
    }
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img)
{
    write_binary_file(path, encode_pgm(img));
}

} // namespace wfsvm
