#pragma once

#include "wfsvm/dataset.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace wfsvm {

struct SvmModel;

/// Binary confusion counts with BENIGN as the positive class.
struct ConfusionMatrix
{
    std::size_t tp = 0; ///< benign predicted benign
    std::size_t tn = 0; ///< malignant predicted malignant
    std::size_t fp = 0; ///< malignant predicted benign
    std::size_t fn = 0; ///< benign predicted malignant

    std::size_t total() const noexcept { return tp + tn + fp + fn; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept
    {
        tp += o.tp;
        tn += o.tn;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix accumulate(Label truth, Label predicted, ConfusionMatrix cm);

struct MetricReport
{
    std::optional<double> sensitivity; ///< absent when tp + fn == 0
    std::optional<double> specificity; ///< absent when tn + fp == 0
    double accuracy = 0.0;
    std::size_t support_vector_count = 0;
    std::size_t misclassified_benign = 0;
    std::size_t misclassified_malignant = 0;
};

/// Throws ValidationError on an empty matrix.
MetricReport report(const ConfusionMatrix& cm, std::size_t support_vector_count);
MetricReport report(const ConfusionMatrix& cm, const SvmModel& model);

/// Ratio as a whole percentage, rounded half away from zero.
long rounded_percent(double ratio);

struct ReportRow
{
    std::string feature_type;
    std::string classifier;
    MetricReport metrics;
};

std::string format_report_table(std::span<const ReportRow> rows);
std::string format_report_csv(std::span<const ReportRow> rows);

} // namespace wfsvm
