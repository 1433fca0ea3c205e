#pragma once

#include "wfsvm/dataset.hpp"
#include "wfsvm/image.hpp"

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace wfsvm {

/// Seeded generator for mammogram-like test images. Each class draws its
/// lesion texture parameters (ring period, contrast) from its own Gaussian,
/// so the classes form two separated blobs in texture-feature space.
struct SyntheticSpec
{
    std::size_t benign = 60;
    std::size_t malignant = 60;
    int image_size = 160;
    int lesion_radius = 26;
    std::uint64_t seed = 1;

    double benign_period = 14.0;
    double benign_period_sd = 1.5;
    double benign_amplitude = 10.0;
    double benign_amplitude_sd = 1.5;
    double malignant_period = 5.0;
    double malignant_period_sd = 0.4;
    double malignant_amplitude = 40.0;
    double malignant_amplitude_sd = 4.0;
};

struct SyntheticDataset
{
    std::vector<SampleRecord> records;
    std::vector<GrayImage> images; // images[i] belongs to records[i]
};

/// Benign and malignant records interleaved; ids "syn0001", "syn0002", ...
SyntheticDataset make_synthetic_dataset(const SyntheticSpec& spec);

/// Writes `<dir>/images/<id>.pgm` and `<dir>/manifest.txt`.
void write_synthetic_dataset(const std::filesystem::path& dir, const SyntheticDataset& data);

} // namespace wfsvm
