// Batch driver for the mammogram classification pipeline.
//
// Exit codes: 0 success, 1 validation error, 2 runtime or convergence error.

#include "wfsvm/error.hpp"
#include "wfsvm/pipeline.hpp"
#include "wfsvm/synthetic.hpp"
#include "wfsvm/textio.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv)
{
    CLI::App app{"Weighted-feature SVM classification of mammogram ROIs"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    bool verbose = false;
    app.add_option("--config", config_file, "key=value configuration file (flags override it)");
    app.add_flag("--verbose,-v", verbose, "Log stage progress to stderr");

    std::map<std::string, std::string> flags;
    for (const auto& key : wfsvm::config_keys()) {
        if (key == "verbose")
            continue;
        app.add_option("--" + key, flags[key]);
    }

    std::map<std::string, CLI::App*> stages;
    for (const char* name : {"preprocess", "extract", "weights", "kernel", "train", "predict", "evaluate", "pipeline"})
        stages[name] = app.add_subcommand(name);
    stages["preprocess"]->description("Split the manifest, denoise, crop and cut ROI images");
    stages["extract"]->description("Compute and normalize feature CSVs");
    stages["weights"]->description("Feature weights by maximal inter-class deviation");
    stages["kernel"]->description("Precomputed-kernel training and test files (wfsvm-* classifiers)");
    stages["train"]->description("Train and save the model");
    stages["predict"]->description("Classify the test split");
    stages["evaluate"]->description("Metrics report, optionally over a features x classifier grid");
    stages["pipeline"]->description("Run every stage in order");

    auto* synth = app.add_subcommand("synth", "Write a seeded synthetic image fixture and manifest");
    wfsvm::SyntheticSpec synth_spec;
    std::string synth_out = "synthetic";
    synth->add_option("--out", synth_out, "Output directory");
    synth->add_option("--benign", synth_spec.benign);
    synth->add_option("--malignant", synth_spec.malignant);
    synth->add_option("--image-size", synth_spec.image_size);
    synth->add_option("--synth-seed", synth_spec.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) {
            wfsvm::write_synthetic_dataset(synth_out, wfsvm::make_synthetic_dataset(synth_spec));
            std::cout << "wrote " << synth_spec.benign + synth_spec.malignant << " samples to " << synth_out << "\n";
            return 0;
        }

        wfsvm::PipelineConfig config;
        if (!config_file.empty())
            wfsvm::apply_config_file(config, wfsvm::read_text_file(config_file));
        for (const auto& key : wfsvm::config_keys()) {
            if (key != "verbose" && app.get_option("--" + key)->count() > 0)
                config.set(key, flags[key]);
        }
        if (verbose)
            config.verbose = true;
        std::ostream* log = config.verbose ? &std::cerr : nullptr;

        if (stages["preprocess"]->parsed())
            wfsvm::cmd_preprocess(config, log);
        else if (stages["extract"]->parsed())
            wfsvm::cmd_extract(config, log);
        else if (stages["weights"]->parsed())
            wfsvm::cmd_weights(config, log);
        else if (stages["kernel"]->parsed())
            wfsvm::cmd_kernel(config, log);
        else if (stages["train"]->parsed())
            wfsvm::cmd_train(config, log);
        else if (stages["predict"]->parsed())
            wfsvm::cmd_predict(config, log);
        else {
            auto rows = stages["pipeline"]->parsed() ? wfsvm::cmd_pipeline(config, log)
                                                     : wfsvm::cmd_evaluate(config, log);
            std::cout << wfsvm::format_report_table(rows);
        }
        return 0;
    } catch (const wfsvm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
