#include "wfsvm/pipeline.hpp"

#include "wfsvm/dataset.hpp"
#include "wfsvm/error.hpp"
#include "wfsvm/pgm.hpp"
#include "wfsvm/preprocess.hpp"
#include "wfsvm/textio.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace fs = std::filesystem;

namespace wfsvm {

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

Classifier Classifier::parse(std::string_view text)
{
    std::string t(text);
    std::replace(t.begin(), t.end(), '-', '_');
    Classifier c;
    if (t.rfind("svm_", 0) == 0) {
        c.precomputed = false;
        c.kernel = parse_kernel_kind(t.substr(4));
        if (c.kernel == KernelKind::Precomputed)
            throw ValidationError("use a wfsvm-* classifier for precomputed kernels");
        return c;
    }
    if (t.rfind("wfsvm_", 0) == 0) {
        c.precomputed = true;
        c.kernel = KernelKind::Precomputed;
        c.mode = parse_kernel_mode(t.substr(6));
        return c;
    }
    throw ValidationError("unknown classifier '" + std::string(text) + "'");
}

std::string Classifier::to_string() const
{
    if (precomputed)
        return "wfsvm-" + std::string(wfsvm::to_string(mode));
    return kernel == KernelKind::Polynomial ? "svm-poly" : "svm-" + std::string(wfsvm::to_string(kernel));
}

namespace {

bool parse_bool(std::string_view v, std::string_view key)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        return true;
    if (v == "false" || v == "0" || v == "no" || v == "off")
        return false;
    throw ValidationError("invalid boolean '" + std::string(v) + "' for " + std::string(key));
}

double as_double(std::string_view v, std::string_view key)
{
    try {
        return parse_double(v, key);
    } catch (const ParseError& e) {
        throw ValidationError(e.what());
    }
}

long long as_int(std::string_view v, std::string_view key)
{
    try {
        return parse_int(v, key);
    } catch (const ParseError& e) {
        throw ValidationError(e.what());
    }
}

std::vector<std::string_view> list_items(std::string_view v)
{
    std::vector<std::string_view> out;
    for (auto item : split_char(v, ',')) {
        auto tok = split_whitespace(item);
        if (tok.size() == 1)
            out.push_back(tok[0]);
        else if (tok.size() > 1)
            throw ValidationError("invalid list item '" + std::string(item) + "'");
    }
    return out;
}

} // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{
        "image-dir",     "manifest",        "work-dir",     "seed",          "train-fraction", "stratified",
        "median-window", "noise-density",   "noise-seed",   "threshold",     "crop",           "roi-side",
        "gabor-alpha",   "gabor-scales",    "gabor-orientations", "gabor-cutoff", "gabor-preset", "features",
        "classifier",    "C",               "tolerance",    "max-passes",    "gamma",          "degree",
        "coef0",         "weight-norm",     "eval-features", "eval-classifiers", "verbose"};
    return keys;
}

void PipelineConfig::set(std::string_view key, std::string_view value)
{
    if (key == "image-dir")
        image_dir = std::string(value);
    else if (key == "manifest")
        manifest = std::string(value);
    else if (key == "work-dir")
        work_dir = std::string(value);
    else if (key == "seed")
        seed = static_cast<std::uint64_t>(as_int(value, key));
    else if (key == "train-fraction")
        train_fraction = as_double(value, key);
    else if (key == "stratified")
        stratified = parse_bool(value, key);
    else if (key == "median-window")
        median_window = static_cast<int>(as_int(value, key));
    else if (key == "noise-density")
        noise_density = as_double(value, key);
    else if (key == "noise-seed")
        noise_seed = static_cast<std::uint64_t>(as_int(value, key));
    else if (key == "threshold")
        threshold = value == "otsu" ? std::nullopt : std::optional<int>(static_cast<int>(as_int(value, key)));
    else if (key == "crop")
        crop = parse_bool(value, key);
    else if (key == "roi-side")
        roi_side = static_cast<int>(as_int(value, key));
    else if (key == "gabor-alpha")
        bank.alpha = as_double(value, key);
    else if (key == "gabor-scales") {
        bank.scales.clear();
        for (auto item : list_items(value))
            bank.scales.push_back(static_cast<int>(as_int(item, key)));
    } else if (key == "gabor-orientations") {
        bank.orientations.clear();
        for (auto item : list_items(value))
            bank.orientations.push_back(as_double(item, key) * std::numbers::pi / 180.0);
    } else if (key == "gabor-cutoff")
        bank.envelope_cutoff = as_double(value, key);
    else if (key == "gabor-preset") {
        if (value == "single")
            bank = GaborBankSpec::single_filter_preset();
        else if (value == "bank")
            bank = GaborBankSpec{};
        else
            throw ValidationError("unknown gabor preset '" + std::string(value) + "' (expected bank or single)");
    } else if (key == "features")
        groups = FeatureGroups::parse(value);
    else if (key == "classifier")
        classifier = Classifier::parse(value);
    else if (key == "C")
        train.C = as_double(value, key);
    else if (key == "tolerance")
        train.tolerance = as_double(value, key);
    else if (key == "max-passes")
        train.max_passes = as_int(value, key);
    else if (key == "gamma")
        gamma = as_double(value, key);
    else if (key == "degree")
        degree = static_cast<int>(as_int(value, key));
    else if (key == "coef0")
        coef0 = as_double(value, key);
    else if (key == "weight-norm")
        weight_norm = parse_weight_norm(value);
    else if (key == "eval-features") {
        eval_groups.clear();
        for (auto item : split_char(value, ';'))
            if (!split_whitespace(item).empty())
                eval_groups.push_back(FeatureGroups::parse(item));
    } else if (key == "eval-classifiers") {
        eval_classifiers.clear();
        for (auto item : list_items(value))
            eval_classifiers.push_back(Classifier::parse(item));
    } else if (key == "verbose")
        verbose = parse_bool(value, key);
    else
        throw ValidationError("unknown configuration key '" + std::string(key) + "'");
}

void PipelineConfig::validate() const
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ValidationError("train-fraction must lie in (0, 1)");
    if (median_window < 3 || median_window % 2 == 0)
        throw ValidationError("median-window must be odd and >= 3");
    if (!(noise_density >= 0.0 && noise_density <= 1.0))
        throw ValidationError("noise-density must lie in [0, 1]");
    if (threshold && (*threshold < 0 || *threshold > 255))
        throw ValidationError("threshold must lie in [0, 255]");
    if (roi_side < 2 || roi_side % 2 != 0)
        throw ValidationError("roi-side must be a positive even integer");
    if (!(bank.alpha > 0.0) || bank.scales.empty() || bank.orientations.empty())
        throw ValidationError("Gabor bank needs alpha > 0 and at least one scale and orientation");
    for (int s : bank.scales)
        if (s < 0)
            throw ValidationError("Gabor scales must be non-negative");
    if (!(bank.envelope_cutoff > 0.0 && bank.envelope_cutoff < 1.0))
        throw ValidationError("gabor-cutoff must lie in (0, 1)");
    if (groups.empty())
        throw ValidationError("feature group selection must not be empty");
    train.validate();
    kernel_spec().validate();
}

KernelSpec PipelineConfig::kernel_spec() const
{
    if (classifier.precomputed)
        return KernelSpec::precomputed();
    switch (classifier.kernel) {
    case KernelKind::Polynomial: return KernelSpec::polynomial(degree, gamma, coef0);
    case KernelKind::Rbf: return KernelSpec::rbf(gamma);
    default: return KernelSpec::linear();
    }
}

void apply_config_file(PipelineConfig& config, std::string_view text)
{
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = lines[i];
        auto first = line.find_first_not_of(" \t");
        if (first == std::string_view::npos || line[first] == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ValidationError("config line " + std::to_string(i + 1) + ": expected key=value");
        auto key = split_whitespace(line.substr(0, eq));
        if (key.size() != 1)
            throw ValidationError("config line " + std::to_string(i + 1) + ": invalid key");
        auto value = line.substr(eq + 1);
        auto b = value.find_first_not_of(" \t");
        auto e = value.find_last_not_of(" \t");
        value = b == std::string_view::npos ? std::string_view{} : value.substr(b, e - b + 1);
        config.set(key[0], value);
    }
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

namespace {

struct Paths
{
    fs::path split_train, split_test, split_log;
    fs::path roi, preprocess_log;
    fs::path train_raw, test_raw, train_csv, test_csv, norm_stats;
    fs::path weights;
    fs::path train_kernel, test_kernel;
    fs::path model, predictions;
    fs::path report_txt, report_csv;
};

Paths paths_for(const PipelineConfig& c)
{
    Paths p;
    const fs::path split = c.split_path();
    p.split_train = split / "train.txt";
    p.split_test = split / "test.txt";
    p.split_log = split / "split.log";
    p.roi = c.roi_path();
    p.preprocess_log = p.roi / "preprocess.log";
    const fs::path feat = c.work_dir / "features";
    p.train_raw = feat / "train_raw.csv";
    p.test_raw = feat / "test_raw.csv";
    p.train_csv = feat / "train.csv";
    p.test_csv = feat / "test.csv";
    p.norm_stats = feat / "norm_stats.txt";
    p.weights = c.work_dir / "weights.txt";
    p.train_kernel = c.work_dir / "kernel" / "train.kernel";
    p.test_kernel = c.work_dir / "kernel" / "test.kernel";
    p.model = c.work_dir / "model.txt";
    p.predictions = c.work_dir / "predictions.csv";
    p.report_txt = c.work_dir / "report.txt";
    p.report_csv = c.work_dir / "report.csv";
    return p;
}

void note(std::ostream* log, const std::string& msg)
{
    if (log)
        *log << msg << "\n";
}

std::vector<SampleRecord> read_manifest_file(const fs::path& path)
{
    auto text = read_text_file(path);
    try {
        return parse_manifest(text);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

FeatureTable read_features(const fs::path& path)
{
    try {
        return parse_feature_csv(read_text_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string bank_description(const GaborBankSpec& bank)
{
    std::ostringstream s;
    s << "gabor alpha=" << format_double(bank.alpha) << " scales=";
    for (std::size_t i = 0; i < bank.scales.size(); ++i)
        s << (i ? "," : "") << bank.scales[i];
    s << " orientations_rad=";
    for (std::size_t i = 0; i < bank.orientations.size(); ++i)
        s << (i ? "," : "") << format_double(bank.orientations[i]);
    s << " cutoff=" << format_double(bank.envelope_cutoff);
    return s.str();
}

} // namespace

void cmd_preprocess(const PipelineConfig& config, std::ostream* log)
{
    config.validate();
    const Paths p = paths_for(config);
    auto records = read_manifest_file(config.manifest);

    SplitSpec spec{config.seed, config.train_fraction, config.stratified};
    auto partition = split(records, spec);
    write_text_file(p.split_train, format_manifest(partition.train));
    write_text_file(p.split_test, format_manifest(partition.test));
    write_text_file(p.split_log, format_split_log(spec, partition));
    note(log, "split: " + std::to_string(partition.train.size()) + " train / " + std::to_string(partition.test.size())
                  + " test");

    // Several records may share one image; decode and clean each image once.
    std::map<std::string, CropResult> cleaned;
    std::map<std::string, int> heights;
    std::size_t written = 0;
    for (const auto& rec : records) {
        if (!rec.label())
            continue;
        auto it = cleaned.find(rec.id);
        if (it == cleaned.end()) {
            const fs::path file = config.image_dir / (rec.id + ".pgm");
            if (!fs::exists(file))
                throw IoError("record " + rec.id + ": image file '" + file.string() + "' not found");
            GrayImage img = read_pgm(file);
            heights.emplace(rec.id, img.height());
            if (config.noise_density > 0.0)
                img = add_salt_pepper(img, config.noise_density, config.noise_seed);
            img = median_filter(img, MedianSpec{config.median_window});
            CropResult crop = config.crop ? crop_background(img, config.threshold) : CropResult{img, 0, 0};
            it = cleaned.emplace(rec.id, std::move(crop)).first;
        }
        const auto& crop = it->second;
        SampleRecord local = roi_in_crop(rec, heights.at(rec.id), crop);
        write_pgm(p.roi / (rec.key() + ".pgm"), extract_roi(crop.image, local, config.roi_side));
        ++written;
    }

    std::ostringstream stage;
    stage << "median_window " << config.median_window << "\n"
          << "noise_density " << format_double(config.noise_density) << "\n"
          << "noise_seed " << config.noise_seed << "\n"
          << "crop " << (config.crop ? "true" : "false") << "\n"
          << "threshold " << (config.threshold ? std::to_string(*config.threshold) : std::string("otsu")) << "\n"
          << "roi_side " << config.roi_side << "\n"
          << "roi_images " << written << "\n";
    write_text_file(p.preprocess_log, stage.str());
    note(log, "preprocess: wrote " + std::to_string(written) + " ROI images to " + p.roi.string());
}

void cmd_extract(const PipelineConfig& config, std::ostream* log)
{
    config.validate();
    const Paths p = paths_for(config);
    const auto schema = feature_schema(config.groups, config.bank);

    auto build = [&](const fs::path& manifest) {
        FeatureTable table;
        table.schema = schema;
        for (const auto& rec : read_manifest_file(manifest)) {
            const fs::path roi = p.roi / (rec.key() + ".pgm");
            if (!fs::exists(roi))
                throw IoError("record " + rec.id + ": ROI image '" + roi.string() + "' not found; run preprocess");
            auto fv = extract_features(read_pgm(roi), rec, config.groups, config.bank);
            if (fv.values.size() != schema.size())
                throw ValidationError("record " + rec.id + ": feature count does not match the schema");
            table.rows.push_back(std::move(fv));
        }
        return table;
    };
    auto train_raw = build(p.split_train);
    auto test_raw = build(p.split_test);
    auto [train, stats] = normalize(train_raw, std::nullopt);
    auto [test, unused] = normalize(test_raw, stats);

    write_text_file(p.train_raw, write_feature_csv(train_raw));
    write_text_file(p.test_raw, write_feature_csv(test_raw));
    write_text_file(p.train_csv, write_feature_csv(train));
    write_text_file(p.test_csv, write_feature_csv(test));
    write_text_file(p.norm_stats, write_norm_stats(stats));
    note(log, "extract: " + std::to_string(schema.size()) + " features (" + config.groups.to_string() + "), "
                  + bank_description(config.bank));
}

void cmd_weights(const PipelineConfig& config, std::ostream* log)
{
    config.validate();
    const Paths p = paths_for(config);
    auto train = read_features(p.train_csv);
    auto d = estimate_deviation(train);
    auto w = solve_weights(d, config.weight_norm);
    write_text_file(p.weights, write_weights(train.schema, w));
    note(log, "weights: " + std::to_string(w.size()) + " weights (" + std::string(to_string(config.weight_norm))
                  + ")");
}

namespace {

WeightVector load_weights_for(const Paths& p, const FeatureTable& train)
{
    auto nw = parse_weights(read_text_file(p.weights));
    if (nw.names != train.schema)
        throw ValidationError("weights file does not match the feature schema; rerun weights");
    return nw.weights;
}

} // namespace

void cmd_kernel(const PipelineConfig& config, std::ostream* log)
{
    config.validate();
    if (!config.classifier.precomputed) {
        note(log, "kernel: " + config.classifier.to_string() + " trains on raw features; nothing to do");
        return;
    }
    const Paths p = paths_for(config);
    auto train = read_features(p.train_csv);
    auto test = read_features(p.test_csv);
    if (train.schema != test.schema)
        throw ValidationError("train and test feature schemas differ");

    std::optional<WeightVector> weights;
    if (config.classifier.mode != KernelMode::Plain)
        weights = load_weights_for(p, train);
    auto matrix = build_train_matrix(train.rows, config.classifier.mode, weights);
    write_text_file(p.train_kernel, write_precomputed(to_records(matrix)));

    auto rows = build_test_rows(test.rows, train.rows);
    std::vector<std::string> labels;
    for (const auto& r : test.rows)
        labels.push_back(std::to_string(label_sign(r.label)));
    write_text_file(p.test_kernel, write_precomputed(to_records(rows, labels)));
    note(log, "kernel: " + std::string(to_string(config.classifier.mode)) + " " + std::to_string(matrix.size()) + "x"
                  + std::to_string(matrix.size()) + " training matrix, " + std::to_string(rows.size()) + " test rows");
}

SvmModel cmd_train(const PipelineConfig& config, std::ostream* log)
{
    config.validate();
    const Paths p = paths_for(config);
    auto train_table = read_features(p.train_csv);
    auto stats = parse_norm_stats(read_text_file(p.norm_stats));

    SvmModel model;
    if (config.classifier.precomputed) {
        std::optional<WeightVector> weights;
        if (config.classifier.mode != KernelMode::Plain)
            weights = load_weights_for(p, train_table);
        auto records = read_precomputed(read_text_file(p.train_kernel));
        auto matrix = matrix_from_records(records, config.classifier.mode, weights);
        if (matrix.size() != train_table.rows.size())
            throw ValidationError("training kernel size does not match the training features");
        model = train(matrix, config.train);
        model.feature_names = train_table.schema;
    } else {
        model = train(train_table, config.train, config.kernel_spec());
    }
    model.norm_stats = stats;
    write_text_file(p.model, save_model(model));
    note(log, "train: " + config.classifier.to_string() + ", " + std::to_string(model.support_vector_count())
                  + " support vectors, " + std::to_string(model.iterations) + " SMO iterations");
    return model;
}

void cmd_predict(const PipelineConfig& config, std::ostream* log)
{
    config.validate();
    const Paths p = paths_for(config);
    auto model = load_model(read_text_file(p.model));
    auto test = read_features(p.test_csv);
    if (model.feature_names != test.schema)
        throw ValidationError("model feature schema does not match the test features");

    std::vector<Prediction> preds;
    if (model.kernel.kind == KernelKind::Precomputed) {
        auto records = read_precomputed(read_text_file(p.test_kernel));
        if (records.size() != test.rows.size())
            throw ValidationError("test kernel row count does not match the test features");
        for (const auto& r : records)
            preds.push_back(predict(model, TestKernelRow{std::to_string(r.index), r.values}));
    } else {
        for (const auto& row : test.rows)
            preds.push_back(predict(model, row.values));
    }

    std::string out = "id,truth,predicted,decision_value\n";
    for (std::size_t i = 0; i < preds.size(); ++i)
        out += test.rows[i].id + "," + label_code(test.rows[i].label) + "," + label_code(preds[i].label) + ","
            + format_double(preds[i].decision_value) + "\n";
    write_text_file(p.predictions, out);
    note(log, "predict: " + std::to_string(preds.size()) + " predictions");
}

namespace {

ReportRow evaluate_single(const PipelineConfig& config)
{
    const Paths p = paths_for(config);
    auto model = load_model(read_text_file(p.model));
    auto text = read_text_file(p.predictions);
    auto lines = split_lines(text);
    ConfusionMatrix cm;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty())
            continue;
        auto f = split_char(lines[i], ',');
        if (f.size() != 4)
            throw ParseError(p.predictions.string() + " line " + std::to_string(i + 1) + ": expected 4 fields");
        cm = accumulate(label_from_code(f[1]), label_from_code(f[2]), cm);
    }
    return {config.groups.to_string(), config.classifier.to_string(), report(cm, model)};
}

void write_reports(const PipelineConfig& config, const std::vector<ReportRow>& rows)
{
    const Paths p = paths_for(config);
    write_text_file(p.report_txt, format_report_table(rows));
    write_text_file(p.report_csv, format_report_csv(rows));
}

} // namespace

std::vector<ReportRow> cmd_evaluate(const PipelineConfig& config, std::ostream* log)
{
    config.validate();
    std::vector<ReportRow> rows;
    if (config.eval_groups.empty() && config.eval_classifiers.empty()) {
        rows.push_back(evaluate_single(config));
    } else {
        auto groups = config.eval_groups.empty() ? std::vector<FeatureGroups>{config.groups} : config.eval_groups;
        auto classifiers =
            config.eval_classifiers.empty() ? std::vector<Classifier>{config.classifier} : config.eval_classifiers;
        for (const auto& g : groups) {
            for (const auto& c : classifiers) {
                PipelineConfig sub = config;
                sub.groups = g;
                sub.classifier = c;
                sub.eval_groups.clear();
                sub.eval_classifiers.clear();
                sub.roi_dir = config.roi_path();
                sub.split_dir = config.split_path();
                sub.work_dir = config.work_dir / "runs" / (g.to_string() + "__" + c.to_string());
                note(log, "evaluate: " + g.to_string() + " / " + c.to_string());
                cmd_extract(sub, log);
                cmd_weights(sub, log);
                cmd_kernel(sub, log);
                cmd_train(sub, log);
                cmd_predict(sub, log);
                rows.push_back(evaluate_single(sub));
            }
        }
    }
    write_reports(config, rows);
    if (log)
        *log << format_report_table(rows);
    return rows;
}

std::vector<ReportRow> cmd_pipeline(const PipelineConfig& config, std::ostream* log)
{
    cmd_preprocess(config, log);
    if (config.eval_groups.empty() && config.eval_classifiers.empty()) {
        cmd_extract(config, log);
        cmd_weights(config, log);
        cmd_kernel(config, log);
        cmd_train(config, log);
        cmd_predict(config, log);
    }
    return cmd_evaluate(config, log);
}

} // namespace wfsvm
