#pragma once

#include "wfsvm/dataset.hpp"
#include "wfsvm/image.hpp"

#include <cstdint>
#include <optional>

namespace wfsvm {

struct MedianSpec
{
    int window = 3; // odd, >= 3
};

struct CropResult
{
    GrayImage image;
    int offset_x = 0;
    int offset_y = 0;
};

/// Replaces roughly `density` of the pixels with impulse noise, half 0 and
/// half 255. Used to build denoising fixtures.
GrayImage add_salt_pepper(const GrayImage& img, double density, std::uint64_t seed);

/// Square-window median with replicate-clamped borders.
GrayImage median_filter(const GrayImage& img, const MedianSpec& spec);

/// Otsu threshold of the intensity histogram. Foreground is `value > threshold`.
/// Returns nullopt for a single-level image, which has no between-class split.
std::optional<int> otsu_threshold(const GrayImage& img);

/// Binarizes (pixel > threshold; Otsu when no threshold is given), keeps the
/// largest 8-connected foreground component and crops to its bounding box.
/// A single-level image with nonzero intensity is all foreground.
/// Throws ValidationError when no foreground pixel exists.
CropResult crop_background(const GrayImage& img, std::optional<int> threshold = std::nullopt);

/// Square `side` x `side` patch around the record's ROI center. The MIAS
/// y coordinate counts from the bottom row, so the row used is
/// height - 1 - center_y. Out-of-bounds samples replicate the nearest edge.
GrayImage extract_roi(const GrayImage& img, const SampleRecord& record, int side);

/// Re-expresses a record's ROI in the coordinates of a crop taken from an
/// image of height `source_height`. Throws if the center falls outside the crop.
SampleRecord roi_in_crop(const SampleRecord& record, int source_height, const CropResult& crop);

} // namespace wfsvm
