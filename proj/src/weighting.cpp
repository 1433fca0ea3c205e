#include "wfsvm/weighting.hpp"

#include "wfsvm/error.hpp"
#include "wfsvm/textio.hpp"

#include <cmath>

namespace wfsvm {

WeightNorm parse_weight_norm(std::string_view text)
{
    if (text == "l1")
        return WeightNorm::L1;
    if (text == "l2")
        return WeightNorm::L2;
    throw ValidationError("unknown weight norm '" + std::string(text) + "' (expected l1 or l2)");
}

std::string_view to_string(WeightNorm norm)
{
    return norm == WeightNorm::L1 ? "l1" : "l2";
}

DeviationVector estimate_deviation(std::span<const FeatureVector> a, std::span<const FeatureVector> b)
{
    if (a.empty() || b.empty())
        throw ValidationError("estimate_deviation: both classes must be non-empty");
    const std::size_t n = a.front().values.size();
    auto check = [n](const FeatureVector& v) {
        if (v.values.size() != n)
            throw ValidationError("estimate_deviation: feature vector " + v.id + " does not match the schema");
    };
    for (const auto& v : a)
        check(v);
    for (const auto& v : b)
        check(v);

    DeviationVector d(n, 0.0);
    for (const auto& x : a)
        for (const auto& y : b)
            for (std::size_t p = 0; p < n; ++p)
                d[p] += std::abs(x.values[p] - y.values[p]);
    const double pairs = static_cast<double>(a.size()) * static_cast<double>(b.size());
    for (auto& v : d)
        v /= pairs;
    return d;
}

DeviationVector estimate_deviation(const FeatureTable& table)
{
    std::vector<FeatureVector> benign, malignant;
    for (const auto& row : table.rows)
        (row.label == Label::Benign ? benign : malignant).push_back(row);
    auto d = estimate_deviation(benign, malignant);
    if (d.size() != table.schema.size())
        throw ValidationError("estimate_deviation: rows do not match the schema");
    return d;
}

WeightVector solve_weights(std::span<const double> d, WeightNorm norm)
{
    double total = 0.0;
    for (double v : d) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw ValidationError("solve_weights: deviations must be finite and non-negative");
        total += norm == WeightNorm::L1 ? v : v * v;
    }
    if (total <= 0.0)
        throw ValidationError("solve_weights: all deviations are zero; classes are indistinguishable");
    const double denom = norm == WeightNorm::L1 ? total : std::sqrt(total);
    WeightVector w(d.size());
    for (std::size_t p = 0; p < d.size(); ++p)
        w[p] = d[p] / denom;
    return w;
}

std::string write_weights(std::span<const std::string> names, std::span<const double> weights)
{
    if (names.size() != weights.size())
        throw ValidationError("write_weights: names and weights differ in length");
    std::string out;
    for (std::size_t p = 0; p < names.size(); ++p)
        out += names[p] + " " + format_double(weights[p]) + "\n";
    return out;
}

NamedWeights parse_weights(std::string_view text)
{
    NamedWeights nw;
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto tok = split_whitespace(lines[i]);
        if (tok.empty())
            continue;
        const auto where = "weights line " + std::to_string(i + 1);
        if (tok.size() != 2)
            throw ParseError(where + ": expected name weight");
        double w = parse_double(tok[1], where);
        if (w < 0.0)
            throw ParseError(where + ": weight must be non-negative");
        nw.names.emplace_back(tok[0]);
        nw.weights.push_back(w);
    }
    return nw;
}

} // namespace wfsvm
