// Runs every acceptance criterion and prints one PASS/FAIL/SKIP line each.
// Exit status is nonzero when any criterion fails.

#include "oracles.hpp"

#include "wfsvm/dataset.hpp"
#include "wfsvm/error.hpp"
#include "wfsvm/features.hpp"
#include "wfsvm/kernel.hpp"
#include "wfsvm/metrics.hpp"
#include "wfsvm/pipeline.hpp"
#include "wfsvm/random.hpp"
#include "wfsvm/svm.hpp"
#include "wfsvm/synthetic.hpp"
#include "wfsvm/textio.hpp"
#include "wfsvm/weighting.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

using namespace wfsvm;
namespace fs = std::filesystem;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Result
{
    Outcome outcome = Outcome::Pass;
    std::string detail;
};

/// Collects failed checks; the first few messages end up in the detail.
class Checker
{
public:
    void expect(bool ok, const std::string& what)
    {
        if (ok)
            return;
        if (++failures_ <= 3)
            messages_ += (messages_.empty() ? "" : "; ") + what;
    }
    void near(double actual, double expected, double tol, const std::string& what)
    {
        if (!(std::abs(actual - expected) <= tol)) {
            std::ostringstream os;
            os.precision(12);
            os << what << ": " << actual << " vs " << expected;
            expect(false, os.str());
        }
    }
    Result result(std::string detail) const
    {
        if (failures_ > 0)
            return {Outcome::Fail, std::to_string(failures_) + " check(s) failed: " + messages_};
        return {Outcome::Pass, std::move(detail)};
    }

private:
    int failures_ = 0;
    std::string messages_;
};

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v, const char* spec = "%.3g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// 1. Worked precomputed-kernel example.
Result worked_kernel_example()
{
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::vector<double>> rows{{1, 1, 1, 1}, {0, 3, 0, 3}, {0, 0, 1, 0}};
    const std::vector<int> labels{10, 40, 20};
    auto m = build_train_matrix(rows, labels, KernelMode::Plain);
    auto text = write_precomputed(to_records(m));
    const double elapsed = seconds_since(start);
    c.expect(m.entries == std::vector<double>{4, 6, 1, 6, 18, 0, 1, 0, 1}, "matrix entries");
    c.expect(text == "10 0:1 1:4 2:6 3:1\n40 0:2 1:6 2:18 3:0\n20 0:3 1:1 2:0 3:1\n", "serialized lines");
    c.expect(elapsed < 1e-3, "took " + fmt(elapsed) + " s");
    return c.result("entries [[4,6,1],[6,18,0],[1,0,1]] and lines exact, " + fmt(elapsed * 1e6) + " us");
}

// 2. Weight solver normalization, scale invariance, rank preservation.
Result weight_solver()
{
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    Rng rng(2);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> d(1 + rng.index(30));
        for (auto& v : d)
            v = rng.uniform() * std::pow(10.0, 4.0 * rng.uniform() - 2.0);
        if (trial % 7 == 0)
            d[rng.index(d.size())] = 0.0;
        d[rng.index(d.size())] += 1e-3;
        auto w = solve_weights(d);
        c.near(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12, "sum of weights");
        const double scale = std::pow(10.0, 6.0 * rng.uniform() - 3.0);
        std::vector<double> scaled(d);
        for (auto& v : scaled)
            v *= scale;
        auto ws = solve_weights(scaled);
        for (std::size_t p = 0; p < d.size(); ++p) {
            c.near(ws[p], w[p], 1e-12, "scale invariance");
            for (std::size_t q = 0; q < d.size(); ++q)
                if (d[p] > d[q])
                    c.expect(w[p] >= w[q], "rank preservation");
        }
    }
    const double elapsed = seconds_since(start);
    c.expect(elapsed < 1.0, "took " + fmt(elapsed) + " s");
    return c.result("1000 random deviation vectors, " + fmt(elapsed) + " s");
}

// 3. SMO against exhaustive dual optimization.
Result smo_oracle()
{
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    Rng rng(3);
    double worst_gap = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t L = 2 + rng.index(5);
        const std::size_t dim = 1 + rng.index(3);
        std::vector<std::vector<double>> x;
        std::vector<int> y;
        for (std::size_t i = 0; i < L; ++i) {
            y.push_back(i == 0 ? 1 : (i == 1 ? -1 : (rng.uniform() < 0.5 ? 1 : -1)));
            std::vector<double> v;
            for (std::size_t d = 0; d < dim; ++d)
                v.push_back(rng.normal() + 0.7 * y.back());
            x.push_back(std::move(v));
        }
        const KernelSpec spec = trial % 2 ? KernelSpec::rbf(0.5) : KernelSpec::linear();
        const double C = std::array{0.1, 1.0, 100.0}[static_cast<std::size_t>(trial / 2) % 3];
        std::vector<double> gram;
        for (const auto& a : x)
            for (const auto& b : x)
                gram.push_back(kernel_eval(spec, a, b));

        TrainConfig cfg;
        cfg.C = C;
        cfg.tolerance = 1e-8;
        cfg.seed = static_cast<std::uint64_t>(trial);
        auto sol = solve_dual(gram, y, cfg);
        auto best = oracle::solve_dual_exhaustive(gram, y, C);
        const double obj = oracle::dual_objective(gram, y, sol.alpha);
        worst_gap = std::max(worst_gap, std::abs(obj - best.objective));
        c.expect(sol.converged, "trial " + std::to_string(trial) + " did not converge");
        c.near(obj, best.objective, 1e-6, "trial " + std::to_string(trial) + " objective");

        // KKT on the returned multipliers and bias.
        const double tol = 1e-3;
        for (std::size_t i = 0; i < L; ++i) {
            double f = sol.bias;
            for (std::size_t j = 0; j < L; ++j)
                f += sol.alpha[j] * y[j] * gram[i * L + j];
            const double margin = y[i] * f;
            const double a = sol.alpha[i];
            if (a <= kAlphaCutoff)
                c.expect(margin >= 1.0 - tol, "KKT at alpha=0");
            else if (a >= C - kAlphaCutoff)
                c.expect(margin <= 1.0 + tol, "KKT at alpha=C");
            else
                c.near(margin, 1.0, tol, "KKT on free multiplier");
        }
    }
    const double elapsed = seconds_since(start);
    c.expect(elapsed < 30.0, "took " + fmt(elapsed) + " s");
    return c.result("50 instances, worst objective gap " + fmt(worst_gap) + ", " + fmt(elapsed) + " s");
}

// 4. Two-point analytic solution.
Result two_point()
{
    Checker c;
    const std::vector<std::vector<double>> x{{-1}, {1}};
    const std::vector<int> y{-1, 1};
    TrainConfig cfg;
    cfg.C = 10;
    auto model = train(x, y, cfg, KernelSpec::linear());
    c.expect(model.support_vector_count() == 2, "support vector count");
    if (model.support_vector_count() == 2) {
        c.near(std::abs(model.alpha_y[0]), 0.5, 1e-9, "alpha_1");
        c.near(std::abs(model.alpha_y[1]), 0.5, 1e-9, "alpha_2");
    }
    c.near(model.bias, 0.0, 1e-9, "bias");
    const double f3 = predict(model, std::vector<double>{3}).decision_value;
    c.near(f3, 3.0, 1e-9, "f(3)");
    return c.result("alpha=(0.5,0.5), b=" + fmt(model.bias) + ", f(3)=" + fmt(f3, "%.12g"));
}

// 5. Gabor convolution against the double loop.
Result convolution_oracle()
{
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    Rng rng(5);
    GaborBankSpec spec;
    spec.envelope_cutoff = 0.2; // radius 2 at scale 0: 5x5 taps
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        GrayImage img(8, 8);
        for (auto& px : img.pixels())
            px = static_cast<std::uint8_t>(rng.index(256));
        auto f = gabor_kernel(spec, 0, 2.0 * std::numbers::pi * rng.uniform());
        c.expect(f.kernel.width() == 5 && f.kernel.height() == 5, "kernel is not 5x5");
        auto direct = convolve(img, f.kernel);
        auto separable = convolve_separable(img, f.x_factor, f.y_factor);
        auto reference = oracle::convolve(img, f.kernel);
        for (std::size_t i = 0; i < reference.size(); ++i) {
            worst = std::max(worst, std::abs(direct.values[i] - reference[i]));
            c.near(direct.values[i], reference[i], 1e-12, "direct");
            c.near(separable.values[i], reference[i], 1e-12 * std::max(1.0, reference[i]), "separable");
        }
    }
    const double elapsed = seconds_since(start);
    c.expect(elapsed < 10.0, "took " + fmt(elapsed) + " s");
    return c.result("100 trials, worst abs error " + fmt(worst) + ", " + fmt(elapsed) + " s");
}

// 6. Statistical-feature identities.
Result statistical_identities()
{
    Checker c;
    Rng rng(6);
    for (int trial = 0; trial < 1000; ++trial) {
        Histogram h{};
        const std::size_t support = 1 + rng.index(trial % 3 ? 256 : 4);
        double total = 0.0;
        for (std::size_t k = 0; k < support; ++k) {
            const double w = rng.uniform() + 1e-6;
            h[rng.index(256)] += w;
            total += w;
        }
        for (auto& p : h)
            p /= total;
        auto f = statistical_features(h);
        double ez2 = 0.0;
        for (int z = 0; z < 256; ++z)
            ez2 += (z / 255.0) * (z / 255.0) * h[static_cast<std::size_t>(z)];
        c.near(f[1], ez2 - f[0] * f[0], 1e-9, "variance identity");
        c.expect(f[4] >= 0.0 && f[4] <= 8.0 + 1e-12, "entropy range");
        c.expect(f[3] > 0.0 && f[3] <= 1.0 + 1e-12, "uniformity range");
    }
    const double z[] = {0.5}, p[] = {1.0};
    c.expect(moment_features(z, p) == StatisticalFeatures{0.5, 0, 0, 1, 0, 0, 0, 0}, "delta at 0.5");
    Histogram delta{};
    delta[51] = 1.0;
    auto d = statistical_features(delta);
    c.near(d[0], 0.2, 1e-15, "delta mean");
    c.expect(d[3] == 1.0 && d[4] == 0.0 && d[7] == 0.0, "delta uniformity/entropy/smoothness");
    return c.result("1000 random histograms plus delta cases");
}

// 7. Precomputed PLAIN kernel vs LINEAR on raw features.
Result precomputed_equivalence()
{
    Checker c;
    Rng rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<FeatureVector> rows;
        std::vector<std::vector<double>> x;
        std::vector<int> y;
        const std::size_t dim = 2 + rng.index(4);
        for (std::size_t i = 0; i < 40; ++i) {
            const int label = i % 2 ? -1 : 1;
            std::vector<double> v;
            for (std::size_t d = 0; d < dim; ++d)
                v.push_back(rng.normal() + 3.0 * label);
            x.push_back(v);
            y.push_back(label);
            rows.push_back({"s" + std::to_string(i), label_from_sign(label), v});
        }
        TrainConfig cfg;
        cfg.seed = static_cast<std::uint64_t>(trial);
        auto raw = train(x, y, cfg, KernelSpec::linear());
        auto pre = train(build_train_matrix(rows, KernelMode::Plain), cfg);
        auto test_rows = build_test_rows(rows, rows);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double a = predict(raw, x[i]).decision_value;
            const double b = predict(pre, test_rows[i]).decision_value;
            worst = std::max(worst, std::abs(a - b));
            c.near(b, a, 1e-9, "decision value");
            c.expect(label_of(a) == rows[i].label, "dataset not separated");
        }
    }
    return c.result("20 datasets of 40 points, worst difference " + fmt(worst));
}

// 8. End to end on the bundled synthetic fixture.
Result synthetic_end_to_end()
{
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    const fs::path root = fs::temp_directory_path() / "wfsvm_acceptance_synthetic";
    fs::remove_all(root);
    write_synthetic_dataset(root / "data", make_synthetic_dataset(SyntheticSpec{}));

    PipelineConfig cfg;
    cfg.image_dir = root / "data" / "images";
    cfg.manifest = root / "data" / "manifest.txt";
    cfg.work_dir = root / "work";
    cfg.groups = FeatureGroups::parse("texture");
    cfg.eval_groups = {cfg.groups};
    cfg.eval_classifiers = {Classifier::parse("svm-linear"), Classifier::parse("wfsvm-weighted_diagonal")};
    auto rows = cmd_pipeline(cfg);
    const double elapsed = seconds_since(start);
    fs::remove_all(root);

    c.expect(rows.size() == 2, "expected two report rows");
    if (rows.size() != 2)
        return c.result("");
    const auto& lin = rows[0].metrics;
    const auto& wf = rows[1].metrics;
    c.expect(lin.accuracy == 1.0, "svm-linear accuracy " + fmt(lin.accuracy));
    c.expect(wf.accuracy >= 0.95, "wfsvm-weighted_diagonal accuracy " + fmt(wf.accuracy));
    c.expect(wf.support_vector_count <= lin.support_vector_count,
             "support vectors " + std::to_string(wf.support_vector_count) + " > "
                 + std::to_string(lin.support_vector_count));
    c.expect(elapsed < 120.0, "took " + fmt(elapsed) + " s");
    return c.result("svm-linear acc " + fmt(lin.accuracy, "%.4f") + " SVs " + std::to_string(lin.support_vector_count)
                    + ", wfsvm-weighted_diagonal acc " + fmt(wf.accuracy, "%.4f") + " SVs "
                    + std::to_string(wf.support_vector_count) + ", " + fmt(elapsed) + " s");
}

// 9. Metrics from reference confusion counts.
Result reference_metrics()
{
    Checker c;
    ConfusionMatrix cm;
    cm.tp = 34;
    cm.fn = 0;
    cm.tn = 23;
    cm.fp = 1;
    auto r = report(cm, 0);
    c.near(r.accuracy, 57.0 / 58.0, 0.0, "accuracy");
    c.near(r.accuracy * 100.0, 98.28, 5e-3, "accuracy percent");
    c.expect(r.sensitivity && *r.sensitivity == 1.0, "sensitivity");
    c.expect(r.specificity && std::abs(*r.specificity * 100.0 - 95.83) < 5e-3, "specificity");
    c.expect(rounded_percent(r.accuracy) == 98, "rounded accuracy");
    c.expect(r.sensitivity && rounded_percent(*r.sensitivity) == 100, "rounded sensitivity");
    c.expect(r.specificity && rounded_percent(*r.specificity) == 96, "rounded specificity");
    return c.result("accuracy 98.28%, sensitivity 100%, specificity 95.83% -> (98, 100, 96)");
}

// 10. Genuine MIAS data, when supplied.
Result mias_accuracy()
{
    const char* dir_env = std::getenv("WFSVM_MIAS_DIR");
    if (!dir_env || !*dir_env)
        return {Outcome::Skip, "set WFSVM_MIAS_DIR to a directory with Info.txt and mdb*.pgm"};
    const fs::path dir = dir_env;
    const fs::path info = fs::exists(dir / "Info.txt") ? dir / "Info.txt" : dir / "info.txt";
    if (!fs::exists(info))
        return {Outcome::Skip, "no Info.txt under " + dir.string()};

    // Keep only record lines; the distributed file carries prose and a few
    // abnormal entries without coordinates.
    std::string manifest;
    std::size_t dropped = 0;
    const auto text = read_text_file(info);
    for (auto line : split_lines(text)) {
        auto tok = split_whitespace(line);
        if (tok.empty() || tok[0].substr(0, 3) != "mdb")
            continue;
        if ((tok.size() == 3 && tok[2] == "NORM") || tok.size() == 7)
            manifest += std::string(line) + "\n";
        else
            ++dropped;
    }
    const fs::path root = fs::temp_directory_path() / "wfsvm_acceptance_mias";
    fs::remove_all(root);
    write_text_file(root / "manifest.txt", manifest);

    Checker c;
    PipelineConfig cfg;
    cfg.image_dir = dir;
    cfg.manifest = root / "manifest.txt";
    cfg.work_dir = root / "work";
    cfg.groups = FeatureGroups::parse("texture");
    cfg.classifier = Classifier::parse("svm-linear");
    auto rows = cmd_pipeline(cfg);
    fs::remove_all(root);
    c.expect(rows.size() == 1, "expected one report row");
    if (rows.empty())
        return c.result("");
    const auto& m = rows[0].metrics;
    c.expect(m.accuracy >= 0.90, "accuracy " + fmt(m.accuracy));
    return c.result("svm-linear texture accuracy " + fmt(m.accuracy, "%.4f") + " (" + std::to_string(dropped)
                    + " info lines without coordinates dropped)");
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
        {"worked precomputed-kernel example", worked_kernel_example},
        {"weight solver properties", weight_solver},
        {"SMO matches exhaustive dual optimum", smo_oracle},
        {"two-point analytic solution", two_point},
        {"Gabor convolution oracle", convolution_oracle},
        {"statistical-feature identities", statistical_identities},
        {"precomputed PLAIN equals LINEAR", precomputed_equivalence},
        {"synthetic fixture end to end", synthetic_end_to_end},
        {"metrics from reference counts", reference_metrics},
        {"MIAS dataset accuracy", mias_accuracy},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Result r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r = {Outcome::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = r.outcome == Outcome::Pass ? "PASS" : (r.outcome == Outcome::Fail ? "FAIL" : "SKIP");
        std::printf("criterion %2zu %s  %s: %s\n", i + 1, tag, criteria[i].first.c_str(), r.detail.c_str());
        failed += r.outcome == Outcome::Fail;
    }
    std::printf("%d failed\n", failed);
    return failed == 0 ? 0 : 1;
}
