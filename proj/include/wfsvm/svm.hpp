#pragma once

#include "wfsvm/error.hpp"
#include "wfsvm/features.hpp"
#include "wfsvm/kernel.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wfsvm {

enum class KernelKind { Linear, Polynomial, Rbf, Precomputed };

struct KernelSpec
{
    KernelKind kind = KernelKind::Linear;
    int degree = 3;
    double gamma = 1.0;
    double coef0 = 0.0;

    static KernelSpec linear() { return {}; }
    static KernelSpec polynomial(int degree, double gamma, double coef0)
    {
        return {KernelKind::Polynomial, degree, gamma, coef0};
    }
    static KernelSpec rbf(double gamma) { return {KernelKind::Rbf, 3, gamma, 0.0}; }
    static KernelSpec precomputed() { return {KernelKind::Precomputed, 3, 1.0, 0.0}; }

    void validate() const;
    bool operator==(const KernelSpec&) const = default;
};

std::string_view to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view text);

/// LINEAR <x,y>; POLYNOMIAL (gamma <x,y> + coef0)^degree; RBF exp(-gamma |x-y|^2).
/// PRECOMPUTED is rejected: those values come from a KernelMatrix.
double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

struct TrainConfig
{
    double C = 1.0;
    double tolerance = 1e-3;     ///< maximal KKT violation accepted at convergence
    long long max_passes = 10000; ///< cap on pair updates, in units of the training-set size
    std::uint64_t seed = 0;       ///< tie-breaking among equally violating candidates

    void validate() const;
};

/// Dual coefficients at or below this are treated as zero.
inline constexpr double kAlphaCutoff = 1e-8;

/// Output of the SMO solver on an explicit Gram matrix.
struct DualSolution
{
    std::vector<double> alpha;
    std::vector<double> gradient; ///< (Q alpha - 1), Q_ij = y_i y_j K_ij
    double bias = 0.0;
    std::size_t iterations = 0;
    double gap = 0.0; ///< final maximal violating-pair gap
    bool converged = false;
};

/// Maximizes sum(alpha) - 1/2 alpha^T Q alpha subject to 0 <= alpha <= C and
/// y^T alpha = 0. `gram` is row-major L x L; `y` holds +1/-1. No positive
/// semi-definiteness is assumed.
DualSolution solve_dual(std::span<const double> gram, std::span<const int> y, const TrainConfig& config);

double dual_objective(std::span<const double> gram, std::span<const int> y, std::span<const double> alpha);

struct SvmModel
{
    KernelSpec kernel;
    KernelMode mode = KernelMode::Plain; ///< meaningful for PRECOMPUTED only
    std::optional<WeightVector> weights;
    std::vector<std::string> feature_names;
    std::optional<NormStats> norm_stats;

    double C = 1.0;
    std::size_t training_size = 0;
    std::vector<std::size_t> support_indices; ///< 0-based, into the training set
    std::vector<double> alpha_y;              ///< y_i * alpha_i per support vector
    std::vector<std::vector<double>> support_vectors; ///< raw features; empty when PRECOMPUTED
    double bias = 0.0;

    std::size_t iterations = 0;
    bool converged = true;

    std::size_t support_vector_count() const noexcept { return support_indices.size(); }
};

/// Raised when SMO exhausts max_passes. Carries the best-effort model.
class ConvergenceError : public Error
{
public:
    ConvergenceError(const std::string& what, SvmModel model) : Error(what), model_(std::move(model)) {}
    const SvmModel& model() const noexcept { return model_; }

private:
    SvmModel model_;
};

/// Traditional SVM on raw feature rows; labels +1 (BENIGN) / -1 (MALIGNANT).
SvmModel train(std::span<const std::vector<double>> x, std::span<const int> y, const TrainConfig& config,
               const KernelSpec& spec);
SvmModel train(const FeatureTable& table, const TrainConfig& config, const KernelSpec& spec);

/// Precomputed-kernel SVM. Matrix labels must be +1 / -1.
SvmModel train(const KernelMatrix& matrix, const TrainConfig& config);

struct Prediction
{
    Label label = Label::Benign;
    double decision_value = 0.0;
};

/// sgn of the decision value, with 0 mapped to BENIGN (+1).
Label label_of(double decision_value);

Prediction predict(const SvmModel& model, std::span<const double> features);
Prediction predict(const SvmModel& model, const TestKernelRow& row);

std::string save_model(const SvmModel& model);
SvmModel load_model(std::string_view text);

} // namespace wfsvm
