#include "wfsvm/preprocess.hpp"

#include "wfsvm/error.hpp"
#include "wfsvm/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace wfsvm {

GrayImage add_salt_pepper(const GrayImage& img, double density, std::uint64_t seed)
{
    if (!(density >= 0.0 && density <= 1.0))
        throw ValidationError("noise density must lie in [0, 1]");
    GrayImage out = img;
    if (density == 0.0)
        return out;
    Rng rng(seed);
    for (auto& px : out.pixels()) {
        bool hit = density == 1.0 || rng.uniform() < density;
        if (hit)
            px = (rng.next() & 1u) ? 255 : 0;
    }
    return out;
}

GrayImage median_filter(const GrayImage& img, const MedianSpec& spec)
{
    if (spec.window < 3 || spec.window % 2 == 0)
        throw ValidationError("median window must be odd and >= 3");
    const int r = spec.window / 2;
    GrayImage out(img.width(), img.height());
    std::vector<std::uint8_t> window(static_cast<std::size_t>(spec.window) * spec.window);
    const auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            std::size_t k = 0;
            for (int dy = -r; dy <= r; ++dy)
                for (int dx = -r; dx <= r; ++dx)
                    window[k++] = img.clamped(x + dx, y + dy);
            std::nth_element(window.begin(), mid, window.end());
            out.at(x, y) = *mid;
        }
    }
    return out;
}

std::optional<int> otsu_threshold(const GrayImage& img)
{
    std::array<double, 256> hist{};
    for (auto v : img.pixels())
        hist[v] += 1.0;
    const double total = static_cast<double>(img.size());
    double total_sum = 0.0;
    for (int i = 0; i < 256; ++i)
        total_sum += i * hist[i];

    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    std::optional<int> threshold;
    for (int t = 0; t < 255; ++t) {
        w0 += hist[t];
        sum0 += t * hist[t];
        double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0)
            continue;
        double d = sum0 * total - total_sum * w0;
        double between = d * d / (w0 * w1);
        if (between > best) {
            best = between;
            threshold = t;
        }
    }
    return threshold;
}

namespace {

struct Component
{
    std::size_t area = 0;
    int min_x, min_y, max_x, max_y;
};

// Largest 8-connected component of `mask`; ties go to the one found first in
// raster order.
std::optional<Component> largest_component(const std::vector<char>& mask, int w, int h)
{
    std::vector<char> seen(mask.size(), 0);
    std::vector<int> stack;
    std::optional<Component> best;
    for (int start = 0; start < w * h; ++start) {
        if (!mask[start] || seen[start])
            continue;
        Component c{0, w, h, -1, -1};
        stack.push_back(start);
        seen[start] = 1;
        while (!stack.empty()) {
            int p = stack.back();
            stack.pop_back();
            int x = p % w, y = p / w;
            ++c.area;
            c.min_x = std::min(c.min_x, x);
            c.max_x = std::max(c.max_x, x);
            c.min_y = std::min(c.min_y, y);
            c.max_y = std::max(c.max_y, y);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                        continue;
                    int q = ny * w + nx;
                    if (mask[q] && !seen[q]) {
                        seen[q] = 1;
                        stack.push_back(q);
                    }
                }
            }
        }
        if (!best || c.area > best->area)
            best = c;
    }
    return best;
}

} // namespace

CropResult crop_background(const GrayImage& img, std::optional<int> threshold)
{
    int t;
    if (threshold) {
        if (*threshold < 0 || *threshold > 255)
            throw ValidationError("crop threshold must lie in [0, 255]");
        t = *threshold;
    } else if (auto otsu = otsu_threshold(img)) {
        t = *otsu;
    } else {
        // Single intensity level: all foreground unless it is black.
        t = static_cast<int>(img.pixels().front()) - 1;
        if (t < 0)
            throw ValidationError("crop_background: image has no foreground");
    }

    const int w = img.width(), h = img.height();
    std::vector<char> mask(img.size());
    for (std::size_t i = 0; i < img.size(); ++i)
        mask[i] = img.pixels()[i] > t;
    auto comp = largest_component(mask, w, h);
    if (!comp)
        throw ValidationError("crop_background: image has no foreground");

    GrayImage out(comp->max_x - comp->min_x + 1, comp->max_y - comp->min_y + 1);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            out.at(x, y) = img.at(comp->min_x + x, comp->min_y + y);
    return {std::move(out), comp->min_x, comp->min_y};
}

GrayImage extract_roi(const GrayImage& img, const SampleRecord& record, int side)
{
    if (!record.roi)
        throw ValidationError("extract_roi: record " + record.id + " has no ROI");
    if (side < 2 || side % 2 != 0)
        throw ValidationError("ROI side must be a positive even integer");
    const int cx = record.roi->center_x;
    const int cy = img.height() - 1 - record.roi->center_y;
    if (cx < 0 || cx >= img.width() || cy < 0 || cy >= img.height())
        throw ValidationError("extract_roi: ROI center of " + record.id + " lies outside the image");

    GrayImage out(side, side);
    const int x0 = cx - side / 2, y0 = cy - side / 2;
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x)
            out.at(x, y) = img.clamped(x0 + x, y0 + y);
    return out;
}

SampleRecord roi_in_crop(const SampleRecord& record, int source_height, const CropResult& crop)
{
    if (!record.roi)
        throw ValidationError("roi_in_crop: record " + record.id + " has no ROI");
    SampleRecord out = record;
    const int x = record.roi->center_x - crop.offset_x;
    const int row = (source_height - 1 - record.roi->center_y) - crop.offset_y;
    if (x < 0 || x >= crop.image.width() || row < 0 || row >= crop.image.height())
        throw ValidationError("ROI center of " + record.id + " falls outside the cropped breast region");
    out.roi->center_x = x;
    out.roi->center_y = crop.image.height() - 1 - row;
    return out;
}

} // namespace wfsvm
