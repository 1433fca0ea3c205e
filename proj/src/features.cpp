#include "wfsvm/features.hpp"

#include "wfsvm/error.hpp"
#include "wfsvm/textio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wfsvm {

Histogram histogram(const GrayImage& img)
{
    std::array<std::size_t, 256> counts{};
    for (auto v : img.pixels())
        ++counts[v];
    Histogram h{};
    const double total = static_cast<double>(img.size());
    for (std::size_t i = 0; i < 256; ++i)
        h[i] = static_cast<double>(counts[i]) / total;
    return h;
}

StatisticalFeatures moment_features(std::span<const double> z, std::span<const double> p)
{
    if (z.size() != p.size())
        throw ValidationError("moment_features: level and probability counts differ");

    double mean = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        mean += z[i] * p[i];

    double variance = 0.0, skewness = 0.0, kurtosis = 0.0;
    double uniformity = 0.0, entropy = 0.0, contrast = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double d = z[i] - mean;
        const double d2 = d * d;
        variance += d2 * p[i];
        skewness += d2 * d * p[i];
        kurtosis += d2 * d2 * p[i];
        uniformity += p[i] * p[i];
        if (p[i] > 0.0)
            entropy -= p[i] * std::log2(p[i]);
        contrast += std::sqrt(d2 * p[i]);
    }
    const double smoothness = 1.0 - 1.0 / (1.0 + variance);
    return {mean, variance, skewness, uniformity, entropy, kurtosis, contrast, smoothness};
}

StatisticalFeatures statistical_features(const Histogram& h)
{
    std::array<double, 256> levels{};
    for (std::size_t i = 0; i < levels.size(); ++i)
        levels[i] = static_cast<double>(i) / 255.0;
    return moment_features(levels, h);
}

GaborBankSpec GaborBankSpec::single_filter_preset()
{
    GaborBankSpec spec;
    spec.scales = {2};
    spec.orientations = {5.0 * std::numbers::pi / 3.0};
    return spec;
}

int gabor_radius(double s, double cutoff)
{
    if (!(s > 0.0) || !(cutoff > 0.0 && cutoff < 1.0))
        throw ValidationError("gabor_radius: scale must be positive and cutoff in (0, 1)");
    int r = 0;
    while (std::exp(-s * s * r * r / 2.0) >= cutoff)
        ++r;
    return r;
}

GaborFilter gabor_kernel(const GaborBankSpec& spec, int scale, double orientation)
{
    if (!(spec.alpha > 0.0))
        throw ValidationError("Gabor alpha must be positive");
    if (scale < 0)
        throw ValidationError("Gabor scale must be non-negative");

    GaborFilter f;
    f.scale = scale;
    f.orientation = orientation;
    f.frequency_scale = std::pow(spec.alpha, -static_cast<double>(scale));
    const double s = f.frequency_scale;
    f.radius = gabor_radius(s, spec.envelope_cutoff);
    const int r = f.radius;
    const double kx = std::numbers::pi * s * std::cos(orientation);
    const double ky = std::numbers::pi * s * std::sin(orientation);

    f.x_factor.resize(2 * r + 1);
    f.y_factor.resize(2 * r + 1);
    for (int t = -r; t <= r; ++t) {
        const double env = std::exp(-s * s * t * t / 2.0);
        f.x_factor[t + r] = s * env * std::polar(1.0, kx * t);
        f.y_factor[t + r] = env * std::polar(1.0, ky * t);
    }

    f.kernel.radius_x = r;
    f.kernel.radius_y = r;
    f.kernel.taps.resize(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1));
    for (int y = -r; y <= r; ++y) {
        for (int x = -r; x <= r; ++x) {
            const double env = s * std::exp(-s * s * (x * x + y * y) / 2.0);
            f.kernel.taps[static_cast<std::size_t>(y + r) * (2 * r + 1) + (x + r)] =
                env * std::polar(1.0, kx * x + ky * y);
        }
    }
    return f;
}

ResponseImage convolve(const GrayImage& img, const ComplexKernel& kernel)
{
    const int w = img.width(), h = img.height();
    const int rx = kernel.radius_x, ry = kernel.radius_y;
    const int pw = w + 2 * rx;
    const int ph = h + 2 * ry;

    std::vector<double> padded(static_cast<std::size_t>(pw) * ph);
    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x)
            padded[static_cast<std::size_t>(y) * pw + x] = img.clamped(x - rx, y - ry);

    // Kernel flipped so the inner loop walks the padded image forward.
    const int kw = kernel.width(), kh = kernel.height();
    std::vector<double> re(kernel.taps.size()), im(kernel.taps.size());
    for (int v = 0; v < kh; ++v) {
        for (int u = 0; u < kw; ++u) {
            const auto tap = kernel.taps[static_cast<std::size_t>(kh - 1 - v) * kw + (kw - 1 - u)];
            re[static_cast<std::size_t>(v) * kw + u] = tap.real();
            im[static_cast<std::size_t>(v) * kw + u] = tap.imag();
        }
    }

    ResponseImage out{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sr = 0.0, si = 0.0;
            for (int v = 0; v < kh; ++v) {
                const double* row = &padded[static_cast<std::size_t>(y + v) * pw + x];
                const double* kr = &re[static_cast<std::size_t>(v) * kw];
                const double* ki = &im[static_cast<std::size_t>(v) * kw];
                for (int u = 0; u < kw; ++u) {
                    sr += row[u] * kr[u];
                    si += row[u] * ki[u];
                }
            }
            out.values[static_cast<std::size_t>(y) * w + x] = std::hypot(sr, si);
        }
    }
    return out;
}

ResponseImage convolve_separable(const GrayImage& img, std::span<const std::complex<double>> row_taps,
                                 std::span<const std::complex<double>> col_taps)
{
    if (row_taps.size() % 2 == 0 || col_taps.size() % 2 == 0)
        throw ValidationError("separable kernel factors must have odd length");
    const int w = img.width(), h = img.height();
    const int rx = static_cast<int>(row_taps.size() / 2);
    const int ry = static_cast<int>(col_taps.size() / 2);

    // Horizontal pass over every source row: t(x, y) = sum_u i(x-u, y) g(u).
    std::vector<std::complex<double>> rows(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::complex<double> acc = 0.0;
            for (int u = -rx; u <= rx; ++u)
                acc += static_cast<double>(img.clamped(x - u, y)) * row_taps[u + rx];
            rows[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }

    ResponseImage out{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::complex<double> acc = 0.0;
            for (int v = -ry; v <= ry; ++v) {
                const int yy = std::clamp(y - v, 0, h - 1);
                acc += rows[static_cast<std::size_t>(yy) * w + x] * col_taps[v + ry];
            }
            out.values[static_cast<std::size_t>(y) * w + x] = std::abs(acc);
        }
    }
    return out;
}

std::vector<double> texture_features(const GrayImage& img, const GaborBankSpec& spec)
{
    std::vector<double> out;
    out.reserve(2 * spec.filter_count());
    const double n = static_cast<double>(img.size());
    for (int scale : spec.scales) {
        for (double theta : spec.orientations) {
            const auto filter = gabor_kernel(spec, scale, theta);
            const auto resp = convolve_separable(img, filter.x_factor, filter.y_factor);
            const double mean = std::accumulate(resp.values.begin(), resp.values.end(), 0.0) / n;
            double var = 0.0;
            for (double v : resp.values)
                var += (v - mean) * (v - mean);
            out.push_back(mean);
            out.push_back(var / n);
        }
    }
    return out;
}

std::array<double, kClinicalCount> clinical_features(const SampleRecord& record)
{
    if (record.abnormality == Abnormality::Norm || !record.label())
        throw ValidationError("clinical_features: record " + record.id + " is NORM / unlabeled");
    std::array<double, kClinicalCount> out{};
    out[static_cast<std::size_t>(record.tissue)] = 1.0;
    out[3 + static_cast<std::size_t>(record.abnormality)] = 1.0;
    return out;
}

FeatureGroups FeatureGroups::parse(std::string_view text)
{
    FeatureGroups g;
    std::string normalized(text);
    std::replace(normalized.begin(), normalized.end(), '+', ',');
    for (auto part : split_char(normalized, ',')) {
        auto tok = split_whitespace(part);
        if (tok.empty())
            continue;
        if (tok.size() != 1)
            throw ValidationError("invalid feature group list '" + std::string(text) + "'");
        if (tok[0] == "statistical")
            g.statistical = true;
        else if (tok[0] == "texture")
            g.texture = true;
        else if (tok[0] == "clinical")
            g.clinical = true;
        else if (tok[0] == "all")
            g = all();
        else
            throw ValidationError("unknown feature group '" + std::string(tok[0]) + "'");
    }
    if (g.empty())
        throw ValidationError("feature group selection must not be empty");
    return g;
}

std::string FeatureGroups::to_string() const
{
    std::string s;
    auto add = [&](bool on, const char* name) {
        if (!on)
            return;
        if (!s.empty())
            s += "+";
        s += name;
    };
    add(statistical, "statistical");
    add(texture, "texture");
    add(clinical, "clinical");
    return s;
}

std::vector<std::string> feature_schema(const FeatureGroups& groups, const GaborBankSpec& bank)
{
    if (groups.empty())
        throw ValidationError("feature group selection must not be empty");
    std::vector<std::string> names;
    if (groups.statistical) {
        for (const char* n :
             {"mean", "variance", "skewness", "uniformity", "entropy", "kurtosis", "contrast", "smoothness"})
            names.emplace_back(n);
    }
    if (groups.texture) {
        for (int scale : bank.scales) {
            for (std::size_t o = 0; o < bank.orientations.size(); ++o) {
                auto base = "gabor_w" + std::to_string(scale) + "_o" + std::to_string(o);
                names.push_back(base + "_mean");
                names.push_back(base + "_var");
            }
        }
    }
    if (groups.clinical) {
        for (const char* n : {"tissue_F", "tissue_G", "tissue_D", "abn_CALC", "abn_CIRC", "abn_SPIC", "abn_MISC",
                              "abn_ARCH", "abn_ASYM"})
            names.emplace_back(n);
    }
    return names;
}

FeatureVector extract_features(const GrayImage& roi, const SampleRecord& record, const FeatureGroups& groups,
                               const GaborBankSpec& bank)
{
    auto label = record.label();
    if (!label)
        throw ValidationError("extract_features: record " + record.id + " has no class label");
    if (groups.empty())
        throw ValidationError("feature group selection must not be empty");
    FeatureVector fv;
    fv.id = record.key();
    fv.label = *label;
    if (groups.statistical) {
        auto s = statistical_features(histogram(roi));
        fv.values.insert(fv.values.end(), s.begin(), s.end());
    }
    if (groups.texture) {
        auto t = texture_features(roi, bank);
        fv.values.insert(fv.values.end(), t.begin(), t.end());
    }
    if (groups.clinical) {
        auto c = clinical_features(record);
        fv.values.insert(fv.values.end(), c.begin(), c.end());
    }
    return fv;
}

std::pair<FeatureTable, NormStats> normalize(const FeatureTable& table, const std::optional<NormStats>& stats)
{
    const std::size_t n = table.schema.size();
    for (const auto& row : table.rows)
        if (row.values.size() != n)
            throw ValidationError("normalize: row " + row.id + " does not match the schema");

    NormStats st;
    if (stats) {
        if (stats->names != table.schema || stats->min.size() != n || stats->max.size() != n)
            throw ValidationError("normalize: normalization stats do not match the feature schema");
        st = *stats;
    } else {
        if (table.rows.empty())
            throw ValidationError("normalize: cannot compute stats from an empty table");
        st.names = table.schema;
        st.min.assign(n, 0.0);
        st.max.assign(n, 0.0);
        for (std::size_t p = 0; p < n; ++p) {
            auto [lo, hi] = std::minmax_element(table.rows.begin(), table.rows.end(),
                                                [p](const FeatureVector& a, const FeatureVector& b) {
                                                    return a.values[p] < b.values[p];
                                                });
            st.min[p] = lo->values[p];
            st.max[p] = hi->values[p];
        }
    }

    FeatureTable out = table;
    for (auto& row : out.rows) {
        for (std::size_t p = 0; p < n; ++p) {
            const double range = st.max[p] - st.min[p];
            row.values[p] = range > 0.0 ? (row.values[p] - st.min[p]) / range : 0.0;
        }
    }
    return {std::move(out), std::move(st)};
}

std::string write_feature_csv(const FeatureTable& table)
{
    std::string out = "id,label";
    for (const auto& name : table.schema)
        out += "," + name;
    out += "\n";
    for (const auto& row : table.rows) {
        if (row.values.size() != table.schema.size())
            throw ValidationError("feature row " + row.id + " does not match the schema");
        out += row.id;
        out += ",";
        out += label_code(row.label);
        for (double v : row.values)
            out += "," + format_double(v);
        out += "\n";
    }
    return out;
}

FeatureTable parse_feature_csv(std::string_view text)
{
    auto lines = split_lines(text);
    std::size_t n = 0;
    while (n < lines.size() && lines[n].empty())
        ++n;
    if (n == lines.size())
        throw ParseError("feature CSV: missing header");
    auto header = split_char(lines[n], ',');
    if (header.size() < 3 || header[0] != "id" || header[1] != "label")
        throw ParseError("feature CSV: header must start with id,label and name at least one feature");

    FeatureTable table;
    for (std::size_t i = 2; i < header.size(); ++i)
        table.schema.emplace_back(header[i]);

    for (std::size_t i = n + 1; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        auto fields = split_char(lines[i], ',');
        const auto where = "feature CSV line " + std::to_string(i + 1);
        if (fields.size() != header.size())
            throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields, found "
                             + std::to_string(fields.size()));
        FeatureVector fv;
        fv.id = std::string(fields[0]);
        try {
            fv.label = label_from_code(fields[1]);
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
        for (std::size_t k = 2; k < fields.size(); ++k)
            fv.values.push_back(parse_double(fields[k], where));
        table.rows.push_back(std::move(fv));
    }
    return table;
}

std::string write_norm_stats(const NormStats& stats)
{
    std::string out;
    for (std::size_t p = 0; p < stats.names.size(); ++p)
        out += stats.names[p] + " " + format_double(stats.min[p]) + " " + format_double(stats.max[p]) + "\n";
    return out;
}

NormStats parse_norm_stats(std::string_view text)
{
    NormStats st;
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto tok = split_whitespace(lines[i]);
        if (tok.empty())
            continue;
        const auto where = "norm stats line " + std::to_string(i + 1);
        if (tok.size() != 3)
            throw ParseError(where + ": expected name min max");
        st.names.emplace_back(tok[0]);
        st.min.push_back(parse_double(tok[1], where));
        st.max.push_back(parse_double(tok[2], where));
        if (st.min.back() > st.max.back())
            throw ParseError(where + ": min exceeds max");
    }
    return st;
}

} // namespace wfsvm
