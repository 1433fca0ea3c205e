#include "wfsvm/svm.hpp"

#include "wfsvm/random.hpp"
#include "wfsvm/textio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wfsvm {

std::string_view to_string(KernelKind kind)
{
    switch (kind) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Polynomial: return "polynomial";
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Precomputed: return "precomputed";
    }
    return "?";
}

KernelKind parse_kernel_kind(std::string_view text)
{
    if (text == "linear")
        return KernelKind::Linear;
    if (text == "polynomial" || text == "poly")
        return KernelKind::Polynomial;
    if (text == "rbf")
        return KernelKind::Rbf;
    if (text == "precomputed")
        return KernelKind::Precomputed;
    throw ValidationError("unknown kernel kind '" + std::string(text) + "'");
}

void KernelSpec::validate() const
{
    if (kind == KernelKind::Polynomial && degree < 1)
        throw ValidationError("polynomial kernel degree must be >= 1");
    if (kind == KernelKind::Rbf && !(gamma > 0.0))
        throw ValidationError("RBF gamma must be positive");
    if (!std::isfinite(gamma) || !std::isfinite(coef0))
        throw ValidationError("kernel parameters must be finite");
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw ValidationError("kernel_eval: feature vectors differ in length");
    switch (spec.kind) {
    case KernelKind::Linear:
        return linear_kernel(x, y);
    case KernelKind::Polynomial:
        return std::pow(spec.gamma * linear_kernel(x, y) + spec.coef0, spec.degree);
    case KernelKind::Rbf: {
        double d2 = 0.0;
        for (std::size_t p = 0; p < x.size(); ++p)
            d2 += (x[p] - y[p]) * (x[p] - y[p]);
        return std::exp(-spec.gamma * d2);
    }
    case KernelKind::Precomputed:
        break;
    }
    throw ValidationError("kernel_eval: PRECOMPUTED kernels take values from a kernel matrix");
}

void TrainConfig::validate() const
{
    if (!(C > 0.0) || !std::isfinite(C))
        throw ValidationError("penalty C must be positive and finite");
    if (!(tolerance > 0.0))
        throw ValidationError("tolerance must be positive");
    if (max_passes < 1)
        throw ValidationError("max_passes must be >= 1");
}

double dual_objective(std::span<const double> gram, std::span<const int> y, std::span<const double> alpha)
{
    const std::size_t L = y.size();
    double linear = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
        linear += alpha[i];
        for (std::size_t j = 0; j < L; ++j)
            quad += alpha[i] * alpha[j] * y[i] * y[j] * gram[i * L + j];
    }
    return linear - 0.5 * quad;
}

namespace {

bool in_up(int y, double a, double C) { return (y > 0 && a < C) || (y < 0 && a > 0.0); }
bool in_low(int y, double a, double C) { return (y > 0 && a > 0.0) || (y < 0 && a < C); }

// Picks uniformly among the candidates tied at the best score.
std::size_t pick(const std::vector<std::size_t>& ties, Rng& rng)
{
    return ties.size() == 1 ? ties.front() : ties[rng.index(ties.size())];
}

} // namespace

DualSolution solve_dual(std::span<const double> gram, std::span<const int> y, const TrainConfig& config)
{
    config.validate();
    const std::size_t L = y.size();
    if (gram.size() != L * L)
        throw ValidationError("solve_dual: Gram matrix is not L x L");
    bool pos = false, neg = false;
    for (int v : y) {
        if (v != 1 && v != -1)
            throw ValidationError("solve_dual: labels must be +1 or -1");
        (v > 0 ? pos : neg) = true;
    }
    if (!pos || !neg)
        throw ValidationError("training data must contain both classes");

    const double C = config.C;
    auto K = [&](std::size_t i, std::size_t j) { return gram[i * L + j]; };

    DualSolution sol;
    sol.alpha.assign(L, 0.0);
    sol.gradient.assign(L, -1.0);
    auto& alpha = sol.alpha;
    auto& G = sol.gradient;

    const long long cap = config.max_passes > std::numeric_limits<long long>::max() / static_cast<long long>(L)
        ? std::numeric_limits<long long>::max()
        : config.max_passes * static_cast<long long>(L);

    Rng rng(config.seed);
    std::vector<std::size_t> ties;
    for (;;) {
        // First index: maximal violation -y_t G_t over the "up" set.
        double m = -std::numeric_limits<double>::infinity();
        ties.clear();
        for (std::size_t t = 0; t < L; ++t) {
            if (!in_up(y[t], alpha[t], C))
                continue;
            const double v = -y[t] * G[t];
            if (v > m) {
                m = v;
                ties.assign(1, t);
            } else if (v == m) {
                ties.push_back(t);
            }
        }
        if (ties.empty()) {
            sol.converged = true;
            break;
        }
        const std::size_t i = pick(ties, rng);

        // Second index: largest |E_i - E_j| among violating partners, i.e. the
        // minimum of -y_t G_t over the "low" set.
        double M = std::numeric_limits<double>::infinity();
        ties.clear();
        for (std::size_t t = 0; t < L; ++t) {
            if (!in_low(y[t], alpha[t], C))
                continue;
            const double v = -y[t] * G[t];
            if (v < M) {
                M = v;
                ties.assign(1, t);
            } else if (v == M) {
                ties.push_back(t);
            }
        }
        sol.gap = ties.empty() ? 0.0 : m - M;
        if (ties.empty() || sol.gap <= config.tolerance) {
            sol.converged = true;
            break;
        }
        if (static_cast<long long>(sol.iterations) >= cap)
            break;
        const std::size_t j = pick(ties, rng);

        // Move along alpha_i += y_i t, alpha_j -= y_j t, keeping y^T alpha fixed.
        // Objective change: delta * t - eta * t^2 / 2.
        const double delta = m - M;
        const double eta = K(i, i) + K(j, j) - 2.0 * K(i, j);
        const double room_i = y[i] > 0 ? C - alpha[i] : alpha[i];
        const double room_j = y[j] > 0 ? alpha[j] : C - alpha[j];
        const double t_max = std::min(room_i, room_j);

        double t;
        if (eta > 0.0) {
            t = std::min(delta / eta, t_max);
        } else {
            // Non-convex along this direction: take the better endpoint.
            const double gain_end = delta * t_max - 0.5 * eta * t_max * t_max;
            t = gain_end > 0.0 ? t_max : 0.0;
        }
        if (t <= 0.0) {
            // Cannot happen for a violating pair with room; guards a stall.
            sol.converged = false;
            break;
        }

        alpha[i] += y[i] * t;
        alpha[j] -= y[j] * t;
        if (t == t_max) {
            if (room_i == t_max)
                alpha[i] = y[i] > 0 ? C : 0.0;
            if (room_j == t_max)
                alpha[j] = y[j] > 0 ? 0.0 : C;
        }
        alpha[i] = std::clamp(alpha[i], 0.0, C);
        alpha[j] = std::clamp(alpha[j], 0.0, C);

        for (std::size_t k = 0; k < L; ++k)
            G[k] += y[k] * t * (K(k, i) - K(k, j));
        ++sol.iterations;
    }

    // Bias: mean of -y_i G_i over free multipliers. Without any, the midpoint
    // of the interval every bounded multiplier allows.
    double sum = 0.0;
    std::size_t count = 0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < L; ++t) {
        const double v = -y[t] * G[t];
        if (alpha[t] > kAlphaCutoff && alpha[t] < C - kAlphaCutoff) {
            sum += v;
            ++count;
        } else {
            if (in_up(y[t], alpha[t], C))
                lower = std::max(lower, v);
            if (in_low(y[t], alpha[t], C))
                upper = std::min(upper, v);
        }
    }
    if (count > 0)
        sol.bias = sum / static_cast<double>(count);
    else if (std::isfinite(lower) && std::isfinite(upper))
        sol.bias = 0.5 * (lower + upper);
    else
        sol.bias = std::isfinite(lower) ? lower : (std::isfinite(upper) ? upper : 0.0);
    return sol;
}

namespace {

SvmModel finish(SvmModel model, const DualSolution& sol, std::span<const int> y,
                std::span<const std::vector<double>> raw)
{
    model.training_size = y.size();
    model.bias = sol.bias;
    model.iterations = sol.iterations;
    model.converged = sol.converged;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (sol.alpha[i] <= kAlphaCutoff)
            continue;
        model.support_indices.push_back(i);
        model.alpha_y.push_back(y[i] * sol.alpha[i]);
        if (!raw.empty())
            model.support_vectors.push_back(raw[i]);
    }
    if (!sol.converged)
        throw ConvergenceError("SMO did not converge within max_passes (gap " + format_double(sol.gap) + ")",
                               std::move(model));
    return model;
}

} // namespace

SvmModel train(std::span<const std::vector<double>> x, std::span<const int> y, const TrainConfig& config,
               const KernelSpec& spec)
{
    spec.validate();
    if (spec.kind == KernelKind::Precomputed)
        throw ValidationError("train: PRECOMPUTED models are trained from a kernel matrix");
    if (x.size() != y.size())
        throw ValidationError("train: feature and label counts differ");
    const std::size_t L = x.size();
    std::vector<double> gram(L * L);
    for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = i; j < L; ++j) {
            const double k = kernel_eval(spec, x[i], x[j]);
            gram[i * L + j] = k;
            gram[j * L + i] = k;
        }
    }
    auto sol = solve_dual(gram, y, config);
    SvmModel model;
    model.kernel = spec;
    model.C = config.C;
    return finish(std::move(model), sol, y, x);
}

SvmModel train(const FeatureTable& table, const TrainConfig& config, const KernelSpec& spec)
{
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (const auto& row : table.rows) {
        if (row.values.size() != table.schema.size())
            throw ValidationError("train: row " + row.id + " does not match the schema");
        x.push_back(row.values);
        y.push_back(label_sign(row.label));
    }
    try {
        auto model = train(x, y, config, spec);
        model.feature_names = table.schema;
        return model;
    } catch (const ConvergenceError& e) {
        auto model = e.model();
        model.feature_names = table.schema;
        throw ConvergenceError(e.what(), std::move(model));
    }
}

SvmModel train(const KernelMatrix& matrix, const TrainConfig& config)
{
    if (matrix.entries.size() != matrix.size() * matrix.size())
        throw ValidationError("train: kernel matrix is not square");
    auto sol = solve_dual(matrix.entries, matrix.labels, config);
    SvmModel model;
    model.kernel = KernelSpec::precomputed();
    model.mode = matrix.mode;
    model.weights = matrix.weights;
    model.C = config.C;
    return finish(std::move(model), sol, matrix.labels, {});
}

Label label_of(double decision_value)
{
    return decision_value >= 0.0 ? Label::Benign : Label::Malignant;
}

Prediction predict(const SvmModel& model, std::span<const double> features)
{
    if (model.kernel.kind == KernelKind::Precomputed)
        throw ValidationError("predict: PRECOMPUTED model needs a test kernel row, not raw features");
    if (!model.feature_names.empty() && features.size() != model.feature_names.size())
        throw ValidationError("predict: query has " + std::to_string(features.size()) + " features, model expects "
                              + std::to_string(model.feature_names.size()));
    if (!model.support_vectors.empty() && features.size() != model.support_vectors.front().size())
        throw ValidationError("predict: query dimension does not match the model");
    double f = model.bias;
    for (std::size_t k = 0; k < model.support_vectors.size(); ++k)
        f += model.alpha_y[k] * kernel_eval(model.kernel, model.support_vectors[k], features);
    return {label_of(f), f};
}

Prediction predict(const SvmModel& model, const TestKernelRow& row)
{
    if (model.kernel.kind != KernelKind::Precomputed)
        throw ValidationError("predict: kernel row given to a model trained on raw features");
    if (row.values.size() != model.training_size)
        throw ValidationError("predict: kernel row has " + std::to_string(row.values.size())
                              + " values, model was trained on " + std::to_string(model.training_size));
    double f = model.bias;
    for (std::size_t k = 0; k < model.support_indices.size(); ++k)
        f += model.alpha_y[k] * row.values[model.support_indices[k]];
    return {label_of(f), f};
}

// ---------------------------------------------------------------------------
// Model file
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kModelMagic = "wfsvm-model";
constexpr int kModelVersion = 1;

std::string join_doubles(std::span<const double> v)
{
    std::string s;
    for (double d : v)
        s += " " + format_double(d);
    return s;
}

class ModelReader
{
public:
    explicit ModelReader(std::string_view text) : lines_(split_lines(text)) {}

    std::vector<std::string_view> next()
    {
        while (pos_ < lines_.size()) {
            auto tok = split_whitespace(lines_[pos_++]);
            if (!tok.empty())
                return tok;
        }
        fail("unexpected end of file");
    }

    std::vector<std::string_view> expect(std::string_view key, std::size_t min_tokens)
    {
        auto tok = next();
        if (tok[0] != key || tok.size() < min_tokens)
            fail("expected '" + std::string(key) + "'");
        return tok;
    }

    double real(std::string_view token) { return parse_double(token, where()); }
    std::size_t count(std::string_view token)
    {
        auto v = parse_int(token, where());
        if (v < 0)
            fail("negative count");
        return static_cast<std::size_t>(v);
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(where() + ": " + msg); }
    std::string where() const { return "model line " + std::to_string(pos_); }

private:
    std::vector<std::string_view> lines_;
    std::size_t pos_ = 0;
};

} // namespace

std::string save_model(const SvmModel& m)
{
    std::string out;
    out += std::string(kModelMagic) + " " + std::to_string(kModelVersion) + "\n";
    out += "kernel " + std::string(to_string(m.kernel.kind)) + "\n";
    out += "degree " + std::to_string(m.kernel.degree) + "\n";
    out += "gamma " + format_double(m.kernel.gamma) + "\n";
    out += "coef0 " + format_double(m.kernel.coef0) + "\n";
    out += "mode " + std::string(to_string(m.mode)) + "\n";
    out += "C " + format_double(m.C) + "\n";
    out += "training_size " + std::to_string(m.training_size) + "\n";
    out += "bias " + format_double(m.bias) + "\n";
    out += "iterations " + std::to_string(m.iterations) + "\n";
    out += std::string("converged ") + (m.converged ? "1" : "0") + "\n";
    out += "features " + std::to_string(m.feature_names.size());
    for (const auto& n : m.feature_names)
        out += " " + n;
    out += "\n";
    const std::size_t dimension = m.support_vectors.empty() ? m.feature_names.size() : m.support_vectors.front().size();
    out += "dimension " + std::to_string(dimension) + "\n";
    if (m.weights)
        out += "weights " + std::to_string(m.weights->size()) + join_doubles(*m.weights) + "\n";
    else
        out += "weights none\n";
    if (m.norm_stats) {
        out += "norm_stats " + std::to_string(m.norm_stats->names.size()) + "\n";
        for (std::size_t p = 0; p < m.norm_stats->names.size(); ++p)
            out += m.norm_stats->names[p] + " " + format_double(m.norm_stats->min[p]) + " "
                + format_double(m.norm_stats->max[p]) + "\n";
    } else {
        out += "norm_stats none\n";
    }
    out += "support_vectors " + std::to_string(m.support_indices.size()) + "\n";
    for (std::size_t k = 0; k < m.support_indices.size(); ++k) {
        out += std::to_string(m.support_indices[k]) + " " + format_double(m.alpha_y[k]);
        if (!m.support_vectors.empty())
            out += join_doubles(m.support_vectors[k]);
        out += "\n";
    }
    out += "end\n";
    return out;
}

SvmModel load_model(std::string_view text)
{
    ModelReader r(text);
    auto header = r.next();
    if (header.size() != 2 || header[0] != kModelMagic)
        r.fail("not a model file");
    if (header[1] != std::to_string(kModelVersion))
        r.fail("unsupported model version '" + std::string(header[1]) + "'");

    SvmModel m;
    m.kernel.kind = parse_kernel_kind(r.expect("kernel", 2)[1]);
    m.kernel.degree = static_cast<int>(parse_int(r.expect("degree", 2)[1], r.where()));
    m.kernel.gamma = r.real(r.expect("gamma", 2)[1]);
    m.kernel.coef0 = r.real(r.expect("coef0", 2)[1]);
    m.mode = parse_kernel_mode(r.expect("mode", 2)[1]);
    m.C = r.real(r.expect("C", 2)[1]);
    m.training_size = r.count(r.expect("training_size", 2)[1]);
    m.bias = r.real(r.expect("bias", 2)[1]);
    m.iterations = r.count(r.expect("iterations", 2)[1]);
    auto conv = r.expect("converged", 2)[1];
    if (conv != "0" && conv != "1")
        r.fail("converged must be 0 or 1");
    m.converged = conv == "1";

    auto feats = r.expect("features", 2);
    const std::size_t n_features = r.count(feats[1]);
    if (feats.size() != n_features + 2)
        r.fail("feature name count mismatch");
    for (std::size_t p = 0; p < n_features; ++p)
        m.feature_names.emplace_back(feats[p + 2]);

    const std::size_t dimension = r.count(r.expect("dimension", 2)[1]);
    if (n_features != 0 && dimension != n_features)
        r.fail("dimension does not match the feature count");

    auto w = r.expect("weights", 2);
    if (w[1] != "none") {
        const std::size_t n = r.count(w[1]);
        if (w.size() != n + 2)
            r.fail("weight count mismatch");
        WeightVector weights;
        for (std::size_t p = 0; p < n; ++p)
            weights.push_back(r.real(w[p + 2]));
        m.weights = std::move(weights);
    }

    auto ns = r.expect("norm_stats", 2);
    if (ns[1] != "none") {
        const std::size_t n = r.count(ns[1]);
        NormStats st;
        for (std::size_t p = 0; p < n; ++p) {
            auto line = r.next();
            if (line.size() != 3)
                r.fail("malformed norm_stats entry");
            st.names.emplace_back(line[0]);
            st.min.push_back(r.real(line[1]));
            st.max.push_back(r.real(line[2]));
        }
        m.norm_stats = std::move(st);
    }

    const std::size_t n_sv = r.count(r.expect("support_vectors", 2)[1]);
    const bool raw = m.kernel.kind != KernelKind::Precomputed;
    for (std::size_t k = 0; k < n_sv; ++k) {
        auto line = r.next();
        const std::size_t expected = raw ? 2 + dimension : 2;
        if (line.size() != expected)
            r.fail("support vector entry has " + std::to_string(line.size()) + " fields, expected "
                   + std::to_string(expected));
        const std::size_t idx = r.count(line[0]);
        if (idx >= m.training_size)
            r.fail("support vector index out of range");
        m.support_indices.push_back(idx);
        m.alpha_y.push_back(r.real(line[1]));
        if (raw) {
            std::vector<double> sv;
            for (std::size_t p = 0; p < dimension; ++p)
                sv.push_back(r.real(line[p + 2]));
            m.support_vectors.push_back(std::move(sv));
        }
    }
    auto end = r.next();
    if (end.size() != 1 || end[0] != "end")
        r.fail("expected 'end'");
    m.kernel.validate();
    return m;
}

} // namespace wfsvm
