#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wfsvm {

enum class Tissue { Fatty, FattyGlandular, DenseGlandular };
enum class Abnormality { Calc, Circ, Spic, Misc, Arch, Asym, Norm };
enum class Severity { Benign, Malignant, None };

/// Class label used by every learning stage. Severity::None never reaches it.
enum class Label { Benign, Malignant };

char tissue_code(Tissue t);
std::string_view abnormality_code(Abnormality a);
char label_code(Label l);
Label label_from_code(std::string_view code);

/// +1 for BENIGN, -1 for MALIGNANT.
int label_sign(Label l);
Label label_from_sign(int sign);

struct Roi
{
    int center_x = 0;
    int center_y = 0; // MIAS convention: measured from the bottom edge
    int radius = 1;

    bool operator==(const Roi&) const = default;
};

struct SampleRecord
{
    std::string id;
    Tissue tissue = Tissue::Fatty;
    Abnormality abnormality = Abnormality::Norm;
    Severity severity = Severity::None;
    std::optional<Roi> roi;

    bool operator==(const SampleRecord&) const = default;

    std::optional<Label> label() const;

    /// File-name-safe key unique per abnormality: "<id>_<x>_<y>" or "<id>".
    std::string key() const;
};

/// Parses the whitespace-separated manifest format
/// `id tissue abnormality [severity [x y radius]]`. Blank lines and lines
/// starting with '#' are ignored. Errors carry the 1-based line number.
std::vector<SampleRecord> parse_manifest(std::string_view text);

std::string format_manifest_line(const SampleRecord& record);
std::string format_manifest(std::span<const SampleRecord> records);

struct SplitSpec
{
    std::uint64_t seed = 0;
    double train_fraction = 0.5;
    bool stratified = true;
};

struct Partition
{
    std::vector<SampleRecord> train;
    std::vector<SampleRecord> test;
};

/// Deterministic train/test partition of the labeled (non-NORM) records.
/// Each partition keeps the manifest order of its members.
Partition split(std::span<const SampleRecord> records, const SplitSpec& spec);

/// Plain-text summary of a split (seed, fraction, per-class counts).
std::string format_split_log(const SplitSpec& spec, const Partition& partition);

} // namespace wfsvm
