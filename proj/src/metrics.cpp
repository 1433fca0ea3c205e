#include "wfsvm/metrics.hpp"

#include "wfsvm/error.hpp"
#include "wfsvm/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

namespace wfsvm {

ConfusionMatrix accumulate(Label truth, Label predicted, ConfusionMatrix cm)
{
    if (truth == Label::Benign)
        ++(predicted == Label::Benign ? cm.tp : cm.fn);
    else
        ++(predicted == Label::Malignant ? cm.tn : cm.fp);
    return cm;
}

MetricReport report(const ConfusionMatrix& cm, std::size_t support_vector_count)
{
    if (cm.total() == 0)
        throw ValidationError("report: confusion matrix is empty");
    MetricReport r;
    if (cm.tp + cm.fn > 0)
        r.sensitivity = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    if (cm.tn + cm.fp > 0)
        r.specificity = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    r.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    r.support_vector_count = support_vector_count;
    r.misclassified_benign = cm.fn;
    r.misclassified_malignant = cm.fp;
    return r;
}

MetricReport report(const ConfusionMatrix& cm, const SvmModel& model)
{
    return report(cm, model.support_vector_count());
}

long rounded_percent(double ratio)
{
    return std::lround(ratio * 100.0);
}

namespace {

std::string fixed4(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string ratio_cell(const std::optional<double>& v)
{
    return v ? fixed4(*v) + " (" + std::to_string(rounded_percent(*v)) + ")" : "n/a";
}

std::string pad(const std::string& s, std::size_t width)
{
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

} // namespace

std::string format_report_table(std::span<const ReportRow> rows)
{
    const std::vector<std::string> header{"Feature type", "Classifier", "Miscl. B", "Miscl. M",
                                          "Accuracy (%)", "Sensitivity (%)", "Specificity (%)", "SVs"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        cells.push_back({r.feature_type, r.classifier, std::to_string(m.misclassified_benign),
                         std::to_string(m.misclassified_malignant), ratio_cell(m.accuracy), ratio_cell(m.sensitivity),
                         ratio_cell(m.specificity), std::to_string(m.support_vector_count)});
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) {
        width[c] = header[c].size();
        for (const auto& row : cells)
            width[c] = std::max(width[c], row[c].size());
    }
    auto line = [&](const std::vector<std::string>& row) {
        std::string s;
        for (std::size_t c = 0; c < row.size(); ++c)
            s += (c ? "  " : "") + (c + 1 == row.size() ? row[c] : pad(row[c], width[c]));
        return s + "\n";
    };
    std::string out = line(header);
    std::size_t total = 0;
    for (auto w : width)
        total += w;
    out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
    for (const auto& row : cells)
        out += line(row);
    return out;
}

std::string format_report_csv(std::span<const ReportRow> rows)
{
    auto opt = [](const std::optional<double>& v) { return v ? fixed4(*v) : std::string("NA"); };
    auto pct = [](const std::optional<double>& v) { return v ? std::to_string(rounded_percent(*v)) : std::string("NA"); };
    std::string out = "feature_type,classifier,misclassified_benign,misclassified_malignant,accuracy,accuracy_pct,"
                      "sensitivity,sensitivity_pct,specificity,specificity_pct,support_vectors\n";
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        out += r.feature_type + "," + r.classifier + "," + std::to_string(m.misclassified_benign) + ","
            + std::to_string(m.misclassified_malignant) + "," + fixed4(m.accuracy) + ","
            + std::to_string(rounded_percent(m.accuracy)) + "," + opt(m.sensitivity) + "," + pct(m.sensitivity) + ","
            + opt(m.specificity) + "," + pct(m.specificity) + "," + std::to_string(m.support_vector_count) + "\n";
    }
    return out;
}

} // namespace wfsvm
