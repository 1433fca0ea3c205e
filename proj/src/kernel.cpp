#include "wfsvm/kernel.hpp"

#include "wfsvm/error.hpp"
#include "wfsvm/textio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace wfsvm {

KernelMode parse_kernel_mode(std::string_view text)
{
    if (text == "plain")
        return KernelMode::Plain;
    if (text == "weighted_diagonal")
        return KernelMode::WeightedDiagonal;
    if (text == "full_weighted")
        return KernelMode::FullWeighted;
    throw ValidationError("unknown kernel mode '" + std::string(text) + "'");
}

std::string_view to_string(KernelMode mode)
{
    switch (mode) {
    case KernelMode::Plain: return "plain";
    case KernelMode::WeightedDiagonal: return "weighted_diagonal";
    case KernelMode::FullWeighted: return "full_weighted";
    }
    return "?";
}

double linear_kernel(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw ValidationError("linear_kernel: feature vectors differ in length");
    double s = 0.0;
    for (std::size_t p = 0; p < x.size(); ++p)
        s += x[p] * y[p];
    return s;
}

double weighted_linear_kernel(std::span<const double> x, std::span<const double> y, std::span<const double> w)
{
    if (x.size() != y.size() || x.size() != w.size())
        throw ValidationError("weighted_linear_kernel: vector and weight lengths differ");
    double s = 0.0;
    for (std::size_t p = 0; p < x.size(); ++p)
        s += w[p] * x[p] * y[p];
    return s;
}

KernelMatrix build_train_matrix(std::span<const std::vector<double>> rows, std::span<const int> labels,
                                KernelMode mode, const std::optional<WeightVector>& weights)
{
    if (rows.size() != labels.size())
        throw ValidationError("build_train_matrix: row and label counts differ");
    if (mode != KernelMode::Plain && !weights)
        throw ValidationError("build_train_matrix: weighted mode requires feature weights");
    if (weights && !rows.empty() && weights->size() != rows.front().size())
        throw ValidationError("build_train_matrix: weight count does not match the feature schema");

    const std::size_t L = rows.size();
    KernelMatrix m;
    m.mode = mode;
    m.labels.assign(labels.begin(), labels.end());
    m.weights = mode == KernelMode::Plain ? std::nullopt : weights;
    m.entries.resize(L * L);
    for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = i; j < L; ++j) {
            double k;
            if (mode == KernelMode::FullWeighted || (mode == KernelMode::WeightedDiagonal && i == j))
                k = weighted_linear_kernel(rows[i], rows[j], *weights);
            else
                k = linear_kernel(rows[i], rows[j]);
            m.entries[i * L + j] = k;
            m.entries[j * L + i] = k;
        }
    }
    return m;
}

KernelMatrix build_train_matrix(std::span<const FeatureVector> train, KernelMode mode,
                                const std::optional<WeightVector>& weights)
{
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    rows.reserve(train.size());
    for (const auto& fv : train) {
        rows.push_back(fv.values);
        labels.push_back(label_sign(fv.label));
    }
    return build_train_matrix(rows, labels, mode, weights);
}

std::vector<TestKernelRow> build_test_rows(std::span<const FeatureVector> test, std::span<const FeatureVector> train)
{
    std::vector<TestKernelRow> out;
    out.reserve(test.size());
    for (const auto& q : test) {
        TestKernelRow row{q.id, {}};
        row.values.reserve(train.size());
        for (const auto& t : train)
            row.values.push_back(linear_kernel(q.values, t.values));
        out.push_back(std::move(row));
    }
    return out;
}

std::string write_precomputed(std::span<const PrecomputedRecord> records)
{
    std::string out;
    for (const auto& r : records) {
        if (r.label.empty() || std::any_of(r.label.begin(), r.label.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
            throw ValidationError("precomputed label must be a non-empty token");
        out += r.label;
        out += " 0:" + std::to_string(r.index);
        for (std::size_t j = 0; j < r.values.size(); ++j)
            out += " " + std::to_string(j + 1) + ":" + format_double(r.values[j]);
        out += "\n";
    }
    return out;
}

std::vector<PrecomputedRecord> read_precomputed(std::string_view text)
{
    std::vector<PrecomputedRecord> records;
    auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        auto tok = split_whitespace(lines[n]);
        if (tok.empty())
            continue;
        const auto where = "kernel line " + std::to_string(n + 1);
        if (tok.size() < 2)
            throw ParseError(where + ": malformed line");

        PrecomputedRecord r;
        r.label = std::string(tok[0]);
        for (std::size_t k = 1; k < tok.size(); ++k) {
            auto colon = tok[k].find(':');
            if (colon == std::string_view::npos)
                throw ParseError(where + ": malformed entry '" + std::string(tok[k]) + "'");
            auto idx = parse_int(tok[k].substr(0, colon), where);
            auto value = tok[k].substr(colon + 1);
            if (k == 1) {
                if (idx != 0)
                    throw ParseError(where + ": missing 0:<index> column");
                auto i = parse_int(value, where);
                if (i < 1)
                    throw ParseError(where + ": sample index must be >= 1");
                r.index = static_cast<std::size_t>(i);
                continue;
            }
            if (idx != static_cast<long long>(k - 1))
                throw ParseError(where + ": non-contiguous kernel index " + std::to_string(idx) + ", expected "
                                 + std::to_string(k - 1));
            r.values.push_back(parse_double(value, where));
        }
        if (!records.empty() && records.front().values.size() != r.values.size())
            throw ParseError(where + ": row length differs from the first row");
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<PrecomputedRecord> to_records(const KernelMatrix& m)
{
    const std::size_t L = m.size();
    std::vector<PrecomputedRecord> out(L);
    for (std::size_t i = 0; i < L; ++i) {
        out[i].label = std::to_string(m.labels[i]);
        out[i].index = i + 1;
        out[i].values.assign(m.entries.begin() + static_cast<std::ptrdiff_t>(i * L),
                             m.entries.begin() + static_cast<std::ptrdiff_t>((i + 1) * L));
    }
    return out;
}

std::vector<PrecomputedRecord> to_records(std::span<const TestKernelRow> rows, std::span<const std::string> labels)
{
    if (!labels.empty() && labels.size() != rows.size())
        throw ValidationError("to_records: label count does not match row count");
    std::vector<PrecomputedRecord> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out[i].label = labels.empty() ? "?" : labels[i];
        out[i].index = i + 1;
        out[i].values = rows[i].values;
    }
    return out;
}

KernelMatrix matrix_from_records(std::span<const PrecomputedRecord> records, KernelMode mode,
                                 const std::optional<WeightVector>& weights)
{
    if (mode != KernelMode::Plain && !weights)
        throw ValidationError("matrix_from_records: weighted mode requires feature weights");
    const std::size_t L = records.size();
    KernelMatrix m;
    m.mode = mode;
    m.weights = mode == KernelMode::Plain ? std::nullopt : weights;
    m.labels.assign(L, 0);
    m.entries.assign(L * L, 0.0);
    std::vector<char> seen(L, 0);
    for (const auto& r : records) {
        if (r.values.size() != L)
            throw ParseError("training kernel: row " + std::to_string(r.index) + " has " + std::to_string(r.values.size())
                             + " values for " + std::to_string(L) + " samples");
        if (r.index < 1 || r.index > L || seen[r.index - 1])
            throw ParseError("training kernel: sample indices must be a permutation of 1.." + std::to_string(L));
        seen[r.index - 1] = 1;
        m.labels[r.index - 1] = static_cast<int>(parse_int(r.label, "training label"));
        std::copy(r.values.begin(), r.values.end(), m.entries.begin() + static_cast<std::ptrdiff_t>((r.index - 1) * L));
    }
    for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = i + 1; j < L; ++j) {
            const double a = m.at(i, j), b = m.at(j, i);
            if (std::abs(a - b) > 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}))
                throw ParseError("training kernel is not symmetric at (" + std::to_string(i + 1) + ","
                                 + std::to_string(j + 1) + ")");
        }
    }
    return m;
}

} // namespace wfsvm
