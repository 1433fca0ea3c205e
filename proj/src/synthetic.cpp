#include "wfsvm/synthetic.hpp"

#include "wfsvm/error.hpp"
#include "wfsvm/pgm.hpp"
#include "wfsvm/random.hpp"
#include "wfsvm/textio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace wfsvm {

namespace {

std::uint8_t to_pixel(double v)
{
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

GrayImage render(const SyntheticSpec& spec, Rng& rng, bool malignant, Roi& roi_out)
{
    const int n = spec.image_size;
    const double cx = n / 2.0, cy = n / 2.0;
    const double ax = 0.42 * n, ay = 0.46 * n;

    // Lesion center inside the central part of the breast ellipse.
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    const double dist = 0.15 * n * std::sqrt(rng.uniform());
    const int lx = static_cast<int>(std::lround(cx + dist * std::cos(angle)));
    const int ly = static_cast<int>(std::lround(cy + dist * std::sin(angle)));

    const double period = malignant
        ? std::max(3.0, spec.malignant_period + spec.malignant_period_sd * rng.normal())
        : std::max(3.0, spec.benign_period + spec.benign_period_sd * rng.normal());
    const double amplitude = malignant
        ? std::max(1.0, spec.malignant_amplitude + spec.malignant_amplitude_sd * rng.normal())
        : std::max(1.0, spec.benign_amplitude + spec.benign_amplitude_sd * rng.normal());
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    const double k = 2.0 * std::numbers::pi / period;
    const double tissue = 80.0 + 10.0 * rng.uniform();
    const double lesion = 140.0 + 10.0 * rng.uniform();
    const double r2 = static_cast<double>(spec.lesion_radius) * spec.lesion_radius;

    GrayImage img(n, n);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            const double ex = (x - cx) / ax, ey = (y - cy) / ay;
            double v;
            if (ex * ex + ey * ey > 1.0) {
                v = 4.0 + 2.0 * rng.uniform();
            } else {
                const double dx = x - lx, dy = y - ly;
                const double d2 = dx * dx + dy * dy;
                const double blend = std::exp(-d2 / (2.0 * r2 * 0.5));
                const double rings = amplitude * std::sin(k * std::sqrt(d2) + phase);
                v = tissue + blend * (lesion - tissue + rings) + 2.0 * rng.normal();
            }
            img.at(x, y) = to_pixel(v);
        }
    }
    roi_out.center_x = lx;
    roi_out.center_y = n - 1 - ly;
    roi_out.radius = spec.lesion_radius;
    return img;
}

} // namespace

SyntheticDataset make_synthetic_dataset(const SyntheticSpec& spec)
{
    if (spec.benign == 0 || spec.malignant == 0)
        throw ValidationError("synthetic dataset needs both classes");
    if (spec.image_size < 32 || spec.lesion_radius < 2 || 2 * spec.lesion_radius >= spec.image_size)
        throw ValidationError("synthetic image size / lesion radius out of range");

    Rng rng(spec.seed);
    SyntheticDataset data;
    std::size_t b = 0, m = 0;
    while (b < spec.benign || m < spec.malignant) {
        const bool malignant = b >= spec.benign || (m < spec.malignant && (b + m) % 2 == 1);
        (malignant ? m : b)++;

        char id[32];
        std::snprintf(id, sizeof id, "syn%04zu", data.records.size() + 1);
        SampleRecord rec;
        rec.id = id;
        rec.tissue = static_cast<Tissue>(rng.index(3));
        rec.abnormality = static_cast<Abnormality>(rng.index(6));
        rec.severity = malignant ? Severity::Malignant : Severity::Benign;
        Roi roi;
        data.images.push_back(render(spec, rng, malignant, roi));
        rec.roi = roi;
        data.records.push_back(std::move(rec));
    }
    return data;
}

void write_synthetic_dataset(const std::filesystem::path& dir, const SyntheticDataset& data)
{
    for (std::size_t i = 0; i < data.records.size(); ++i)
        write_pgm(dir / "images" / (data.records[i].id + ".pgm"), data.images[i]);
    write_text_file(dir / "manifest.txt", format_manifest(data.records));
}

} // namespace wfsvm
