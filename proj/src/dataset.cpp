#include "wfsvm/dataset.hpp"

#include "wfsvm/error.hpp"
#include "wfsvm/random.hpp"
#include "wfsvm/textio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

namespace wfsvm {

namespace {

constexpr std::array<std::string_view, 7> kAbnormalityCodes{"CALC", "CIRC", "SPIC", "MISC", "ARCH", "ASYM", "NORM"};

[[noreturn]] void line_error(std::size_t line, const std::string& msg)
{
    throw ParseError("manifest line " + std::to_string(line) + ": " + msg);
}

int parse_coordinate(std::string_view token, std::size_t line, const char* what)
{
    long long v = 0;
    try {
        v = parse_int(token, what);
    } catch (const ParseError&) {
        line_error(line, "invalid " + std::string(what) + " '" + std::string(token) + "'");
    }
    if (v < 0 || v > 1'000'000)
        line_error(line, std::string(what) + " out of range");
    return static_cast<int>(v);
}

} // namespace

char tissue_code(Tissue t)
{
    switch (t) {
    case Tissue::Fatty: return 'F';
    case Tissue::FattyGlandular: return 'G';
    case Tissue::DenseGlandular: return 'D';
    }
    return '?';
}

std::string_view abnormality_code(Abnormality a)
{
    return kAbnormalityCodes[static_cast<std::size_t>(a)];
}

char label_code(Label l)
{
    return l == Label::Benign ? 'B' : 'M';
}

Label label_from_code(std::string_view code)
{
    if (code == "B")
        return Label::Benign;
    if (code == "M")
        return Label::Malignant;
    throw ParseError("unknown label code '" + std::string(code) + "'");
}

int label_sign(Label l)
{
    return l == Label::Benign ? 1 : -1;
}

Label label_from_sign(int sign)
{
    if (sign == 1)
        return Label::Benign;
    if (sign == -1)
        return Label::Malignant;
    throw ValidationError("class label must be +1 or -1, got " + std::to_string(sign));
}

std::optional<Label> SampleRecord::label() const
{
    switch (severity) {
    case Severity::Benign: return Label::Benign;
    case Severity::Malignant: return Label::Malignant;
    case Severity::None: return std::nullopt;
    }
    return std::nullopt;
}

std::string SampleRecord::key() const
{
    if (!roi)
        return id;
    return id + "_" + std::to_string(roi->center_x) + "_" + std::to_string(roi->center_y);
}

std::vector<SampleRecord> parse_manifest(std::string_view text)
{
    std::vector<SampleRecord> records;
    auto lines = split_lines(text);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::size_t line_no = n + 1;
        auto tokens = split_whitespace(lines[n]);
        if (tokens.empty() || tokens.front().front() == '#')
            continue;
        if (tokens.size() < 3)
            line_error(line_no, "expected at least id, tissue and abnormality");

        SampleRecord rec;
        rec.id = std::string(tokens[0]);

        if (tokens[1] == "F")
            rec.tissue = Tissue::Fatty;
        else if (tokens[1] == "G")
            rec.tissue = Tissue::FattyGlandular;
        else if (tokens[1] == "D")
            rec.tissue = Tissue::DenseGlandular;
        else
            line_error(line_no, "unknown tissue code '" + std::string(tokens[1]) + "'");

        auto abn = std::find(kAbnormalityCodes.begin(), kAbnormalityCodes.end(), tokens[2]);
        if (abn == kAbnormalityCodes.end())
            line_error(line_no, "unknown abnormality code '" + std::string(tokens[2]) + "'");
        rec.abnormality = static_cast<Abnormality>(abn - kAbnormalityCodes.begin());

        if (rec.abnormality == Abnormality::Norm) {
            if (tokens.size() != 3)
                line_error(line_no, "NORM record must not carry severity or coordinates");
            records.push_back(std::move(rec));
            continue;
        }

        if (tokens.size() < 4)
            line_error(line_no, "missing severity code");
        if (tokens[3] == "B")
            rec.severity = Severity::Benign;
        else if (tokens[3] == "M")
            rec.severity = Severity::Malignant;
        else
            line_error(line_no, "unknown severity code '" + std::string(tokens[3]) + "'");

        if (tokens.size() != 7)
            line_error(line_no, "missing coordinates: expected x y radius");
        Roi roi;
        roi.center_x = parse_coordinate(tokens[4], line_no, "x");
        roi.center_y = parse_coordinate(tokens[5], line_no, "y");
        roi.radius = parse_coordinate(tokens[6], line_no, "radius");
        if (roi.radius <= 0)
            line_error(line_no, "radius must be positive");
        rec.roi = roi;
        records.push_back(std::move(rec));
    }
    return records;
}

std::string format_manifest_line(const SampleRecord& r)
{
    std::string line = r.id + " " + tissue_code(r.tissue) + " " + std::string(abnormality_code(r.abnormality));
    if (auto l = r.label())
        line += std::string(" ") + label_code(*l);
    if (r.roi)
        line += " " + std::to_string(r.roi->center_x) + " " + std::to_string(r.roi->center_y) + " "
            + std::to_string(r.roi->radius);
    return line;
}

std::string format_manifest(std::span<const SampleRecord> records)
{
    std::string out;
    for (const auto& r : records)
        out += format_manifest_line(r) + "\n";
    return out;
}

namespace {

// Portable Fisher-Yates; std::shuffle's draw sequence is implementation-defined.
void shuffle(std::vector<std::size_t>& v, Rng& rng)
{
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng.index(i)]);
}

std::size_t train_count(std::size_t n, double fraction)
{
    return static_cast<std::size_t>(std::lround(fraction * static_cast<double>(n)));
}

} // namespace

Partition split(std::span<const SampleRecord> records, const SplitSpec& spec)
{
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw ValidationError("train_fraction must lie in (0, 1)");

    std::vector<std::size_t> benign, malignant;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (auto l = records[i].label())
            (*l == Label::Benign ? benign : malignant).push_back(i);
    }
    if (benign.empty())
        throw ValidationError("split: no BENIGN records after filtering");
    if (malignant.empty())
        throw ValidationError("split: no MALIGNANT records after filtering");

    Rng rng(spec.seed);
    std::vector<char> in_train(records.size(), 0);
    auto take = [&](std::vector<std::size_t> pool) {
        shuffle(pool, rng);
        std::size_t k = train_count(pool.size(), spec.train_fraction);
        for (std::size_t i = 0; i < k; ++i)
            in_train[pool[i]] = 1;
    };
    if (spec.stratified) {
        take(benign);
        take(malignant);
    } else {
        std::vector<std::size_t> all = benign;
        all.insert(all.end(), malignant.begin(), malignant.end());
        std::sort(all.begin(), all.end());
        take(std::move(all));
    }

    Partition p;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].label())
            continue;
        (in_train[i] ? p.train : p.test).push_back(records[i]);
    }
    return p;
}

std::string format_split_log(const SplitSpec& spec, const Partition& p)
{
    auto count = [](const std::vector<SampleRecord>& v, Label l) {
        return std::count_if(v.begin(), v.end(), [&](const SampleRecord& r) { return r.label() == l; });
    };
    std::ostringstream out;
    out << "seed " << spec.seed << "\n"
        << "train_fraction " << format_double(spec.train_fraction) << "\n"
        << "stratified " << (spec.stratified ? "true" : "false") << "\n"
        << "train " << p.train.size() << " benign " << count(p.train, Label::Benign) << " malignant "
        << count(p.train, Label::Malignant) << "\n"
        << "test " << p.test.size() << " benign " << count(p.test, Label::Benign) << " malignant "
        << count(p.test, Label::Malignant) << "\n";
    return out.str();
}

} // namespace wfsvm
