#pragma once

#include "wfsvm/features.hpp"
#include "wfsvm/weighting.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wfsvm {

/// How feature weights enter a precomputed linear Gram matrix.
enum class KernelMode {
    Plain,            ///< K[i][j] = <x_i, x_j>
    WeightedDiagonal, ///< off-diagonal plain; K[i][i] = sum_p w_p x_ip^2
    FullWeighted,     ///< K[i][j] = sum_p w_p x_ip x_jp everywhere (PSD)
};

KernelMode parse_kernel_mode(std::string_view text);
std::string_view to_string(KernelMode mode);

/// Dot product; throws ValidationError on length mismatch.
double linear_kernel(std::span<const double> x, std::span<const double> y);
double weighted_linear_kernel(std::span<const double> x, std::span<const double> y, std::span<const double> weights);

/// Square training Gram matrix with one class label per row.
struct KernelMatrix
{
    KernelMode mode = KernelMode::Plain;
    std::vector<int> labels;
    std::vector<double> entries; // row-major L x L
    std::optional<WeightVector> weights;

    std::size_t size() const noexcept { return labels.size(); }
    double at(std::size_t i, std::size_t j) const { return entries[i * labels.size() + j]; }
};

KernelMatrix build_train_matrix(std::span<const std::vector<double>> rows, std::span<const int> labels,
                                KernelMode mode, const std::optional<WeightVector>& weights = std::nullopt);

/// Labels are encoded BENIGN = +1, MALIGNANT = -1.
KernelMatrix build_train_matrix(std::span<const FeatureVector> train, KernelMode mode,
                                const std::optional<WeightVector>& weights = std::nullopt);

/// Plain kernel values of one query against every training sample.
struct TestKernelRow
{
    std::string query_id;
    std::vector<double> values;
};

/// Test rows never carry weights, whatever mode the training matrix used.
std::vector<TestKernelRow> build_test_rows(std::span<const FeatureVector> test, std::span<const FeatureVector> train);

// ---------------------------------------------------------------------------
// Precomputed-kernel text format: "<label> 0:<i> 1:<K(x,x_1)> ... L:<K(x,x_L)>"
// with every value present, including zeros.
// ---------------------------------------------------------------------------

struct PrecomputedRecord
{
    std::string label; // arbitrary token for test rows, e.g. "?"
    std::size_t index = 0;
    std::vector<double> values;

    bool operator==(const PrecomputedRecord&) const = default;
};

std::string write_precomputed(std::span<const PrecomputedRecord> records);
std::vector<PrecomputedRecord> read_precomputed(std::string_view text);

std::vector<PrecomputedRecord> to_records(const KernelMatrix& matrix);

/// Test rows numbered 1..n; `labels` supplies one label token per row, or
/// "?" for all when empty.
std::vector<PrecomputedRecord> to_records(std::span<const TestKernelRow> rows,
                                          std::span<const std::string> labels = {});

/// Reassembles a training matrix. Rows may appear in any order; the 0:i
/// column places each row. Labels must be integers.
KernelMatrix matrix_from_records(std::span<const PrecomputedRecord> records, KernelMode mode,
                                 const std::optional<WeightVector>& weights = std::nullopt);

} // namespace wfsvm
