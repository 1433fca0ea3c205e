#pragma once

#include "wfsvm/dataset.hpp"
#include "wfsvm/image.hpp"

#include <array>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wfsvm {

// ---------------------------------------------------------------------------
// Statistical features
// ---------------------------------------------------------------------------

/// Normalized intensity histogram: p[z] = count(z) / pixel count.
using Histogram = std::array<double, 256>;

Histogram histogram(const GrayImage& img);

inline constexpr std::size_t kStatisticalCount = 8;
using StatisticalFeatures = std::array<double, kStatisticalCount>;

/// mean, variance, skewness, uniformity, entropy, kurtosis, contrast,
/// smoothness over an arbitrary discrete distribution.
///
/// Moments are raw central moments (no division by powers of sigma).
/// contrast = sum_i sqrt((z_i - m)^2 p_i) and smoothness = 1 - 1/(1 + variance).
/// Entropy is base 2 with 0 log 0 = 0.
StatisticalFeatures moment_features(std::span<const double> levels, std::span<const double> probabilities);

/// moment_features over the histogram with levels rescaled to z/255.
StatisticalFeatures statistical_features(const Histogram& h);

// ---------------------------------------------------------------------------
// Gabor texture features
// ---------------------------------------------------------------------------

struct GaborBankSpec
{
    double alpha = std::numbers::sqrt2;
    std::vector<int> scales{0, 1, 2};
    std::vector<double> orientations{0.0, std::numbers::pi / 6.0};
    double envelope_cutoff = 1e-3;

    std::size_t filter_count() const noexcept { return scales.size() * orientations.size(); }

    /// Single filter at scale 2, orientation 5*pi/3.
    static GaborBankSpec single_filter_preset();
};

/// Odd-sized complex kernel with its origin at the center tap.
struct ComplexKernel
{
    int radius_x = 0;
    int radius_y = 0;
    std::vector<std::complex<double>> taps; // row-major, (2*radius_y+1) x (2*radius_x+1)

    int width() const noexcept { return 2 * radius_x + 1; }
    int height() const noexcept { return 2 * radius_y + 1; }

    /// h(u, v) for u in [-radius_x, radius_x], v in [-radius_y, radius_y].
    std::complex<double> at(int u, int v) const
    {
        return taps[static_cast<std::size_t>(v + radius_y) * static_cast<std::size_t>(width())
                    + static_cast<std::size_t>(u + radius_x)];
    }
};

/// A Gabor filter h(x,y) = s exp(-s^2 (x^2+y^2)/2) exp(i pi s (x cos t + y sin t))
/// with s = alpha^-scale. The kernel factors as s * gx(x) * gy(y); the 1-D
/// factors are kept for separable convolution.
struct GaborFilter
{
    int scale = 0;
    double orientation = 0.0;
    double frequency_scale = 1.0; // s
    int radius = 0;
    ComplexKernel kernel;
    std::vector<std::complex<double>> x_factor; // includes s
    std::vector<std::complex<double>> y_factor;
};

/// Support radius is the smallest integer r with exp(-s^2 r^2 / 2) < cutoff.
int gabor_radius(double frequency_scale, double envelope_cutoff);

GaborFilter gabor_kernel(const GaborBankSpec& spec, int scale, double orientation);

struct ResponseImage
{
    int width = 0;
    int height = 0;
    std::vector<double> values; // row-major

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// m(x,y) = |sum_{u,v} i(x-u, y-v) h(u,v)| with replicate padding.
ResponseImage convolve(const GrayImage& img, const ComplexKernel& kernel);

/// Same response for a rank-one kernel h(u,v) = row_taps[u] * col_taps[v].
ResponseImage convolve_separable(const GrayImage& img, std::span<const std::complex<double>> row_taps,
                                 std::span<const std::complex<double>> col_taps);

/// Mean then population variance of each filter's magnitude response, filters
/// ordered by (scale, orientation) as listed in the spec.
std::vector<double> texture_features(const GrayImage& img, const GaborBankSpec& spec);

// ---------------------------------------------------------------------------
// Clinical features
// ---------------------------------------------------------------------------

inline constexpr std::size_t kClinicalCount = 9;

/// One-hot tissue {F, G, D} followed by one-hot abnormality
/// {CALC, CIRC, SPIC, MISC, ARCH, ASYM}.
std::array<double, kClinicalCount> clinical_features(const SampleRecord& record);

// ---------------------------------------------------------------------------
// Feature vectors
// ---------------------------------------------------------------------------

enum class FeatureGroup { Statistical, Texture, Clinical };

struct FeatureGroups
{
    bool statistical = false;
    bool texture = false;
    bool clinical = false;

    bool empty() const noexcept { return !statistical && !texture && !clinical; }
    static FeatureGroups all() { return {true, true, true}; }

    /// Parses "statistical,texture,clinical" (any non-empty subset, '+' or ',').
    static FeatureGroups parse(std::string_view text);
    std::string to_string() const;

    bool operator==(const FeatureGroups&) const = default;
};

std::vector<std::string> feature_schema(const FeatureGroups& groups, const GaborBankSpec& bank);

struct FeatureVector
{
    std::string id;
    Label label = Label::Benign;
    std::vector<double> values;
};

struct FeatureTable
{
    std::vector<std::string> schema;
    std::vector<FeatureVector> rows;
};

/// Features of a preprocessed ROI in schema order.
FeatureVector extract_features(const GrayImage& roi, const SampleRecord& record, const FeatureGroups& groups,
                               const GaborBankSpec& bank);

struct NormStats
{
    std::vector<std::string> names;
    std::vector<double> min;
    std::vector<double> max;
};

/// Min-max scaling per feature. Without `stats`, they are computed from
/// `table` (training path); with them, they are applied as-is and results
/// are not clipped. Constant features map to 0.
std::pair<FeatureTable, NormStats> normalize(const FeatureTable& table, const std::optional<NormStats>& stats);

std::string write_feature_csv(const FeatureTable& table);
FeatureTable parse_feature_csv(std::string_view text);

std::string write_norm_stats(const NormStats& stats);
NormStats parse_norm_stats(std::string_view text);

} // namespace wfsvm
