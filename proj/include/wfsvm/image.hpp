#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace wfsvm {

/// Row-major 8-bit grayscale raster. Width and height are always positive.
class GrayImage
{
public:
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }

    std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

    /// Pixel with coordinates clamped to the nearest edge (replicate padding).
    std::uint8_t clamped(int x, int y) const noexcept;

    const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }
    std::vector<std::uint8_t>& pixels() noexcept { return pixels_; }

    bool operator==(const GrayImage&) const = default;

private:
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

} // namespace wfsvm
