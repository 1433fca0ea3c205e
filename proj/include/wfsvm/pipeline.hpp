#pragma once

#include "wfsvm/features.hpp"
#include "wfsvm/kernel.hpp"
#include "wfsvm/metrics.hpp"
#include "wfsvm/svm.hpp"
#include "wfsvm/weighting.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wfsvm {

/// Classifier family: traditional SVM on raw features, or WFSVM on a
/// precomputed linear kernel in one of the weighting modes.
struct Classifier
{
    bool precomputed = false;
    KernelKind kernel = KernelKind::Linear; // when !precomputed
    KernelMode mode = KernelMode::WeightedDiagonal; // when precomputed

    /// "svm-linear", "svm-poly", "svm-rbf", "wfsvm-weighted_diagonal",
    /// "wfsvm-full_weighted", "wfsvm-plain".
    static Classifier parse(std::string_view text);
    std::string to_string() const;

    bool operator==(const Classifier&) const = default;
};

struct PipelineConfig
{
    std::filesystem::path image_dir;
    std::filesystem::path manifest;
    std::filesystem::path work_dir = "work";
    /// Shared-stage locations; default to work_dir/roi and work_dir/split.
    std::optional<std::filesystem::path> roi_dir;
    std::optional<std::filesystem::path> split_dir;

    std::uint64_t seed = 0;
    double train_fraction = 0.5;
    bool stratified = true;

    int median_window = 3;
    double noise_density = 0.0;
    std::uint64_t noise_seed = 0;
    std::optional<int> threshold; // Otsu when absent
    bool crop = true;
    int roi_side = 128;

    GaborBankSpec bank;
    FeatureGroups groups{false, true, false};
    Classifier classifier;
    TrainConfig train;
    double gamma = 1.0;
    int degree = 3;
    double coef0 = 0.0;
    WeightNorm weight_norm = WeightNorm::L1;

    /// Evaluation grid; empty lists mean "the configured single run".
    std::vector<FeatureGroups> eval_groups;
    std::vector<Classifier> eval_classifiers;

    bool verbose = false;

    /// Applies one `key=value` setting; keys match the CLI long flags.
    void set(std::string_view key, std::string_view value);
    void validate() const;

    KernelSpec kernel_spec() const;
    std::filesystem::path roi_path() const { return roi_dir.value_or(work_dir / "roi"); }
    std::filesystem::path split_path() const { return split_dir.value_or(work_dir / "split"); }
};

/// Every key accepted by PipelineConfig::set, in a stable order.
const std::vector<std::string>& config_keys();

/// Parses a flat key=value file ('#' comments, blank lines allowed).
void apply_config_file(PipelineConfig& config, std::string_view text);

void cmd_preprocess(const PipelineConfig& config, std::ostream* log = nullptr);
void cmd_extract(const PipelineConfig& config, std::ostream* log = nullptr);
void cmd_weights(const PipelineConfig& config, std::ostream* log = nullptr);
void cmd_kernel(const PipelineConfig& config, std::ostream* log = nullptr);
SvmModel cmd_train(const PipelineConfig& config, std::ostream* log = nullptr);
void cmd_predict(const PipelineConfig& config, std::ostream* log = nullptr);

/// Writes report.txt and report.csv; one row per grid cell, or a single row
/// from the existing predictions when no grid is configured.
std::vector<ReportRow> cmd_evaluate(const PipelineConfig& config, std::ostream* log = nullptr);

/// All stages in order, then evaluate.
std::vector<ReportRow> cmd_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

} // namespace wfsvm
