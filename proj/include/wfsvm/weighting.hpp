#pragma once

#include "wfsvm/features.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wfsvm {

/// Per-feature expected absolute difference between the two classes.
using DeviationVector = std::vector<double>;

/// Per-feature relevance weights, all non-negative.
using WeightVector = std::vector<double>;

enum class WeightNorm {
    L1, ///< lambda_p = d_p / sum d (weights sum to 1)
    L2, ///< lambda_p = d_p / sqrt(sum d^2) (unit Euclidean norm)
};

WeightNorm parse_weight_norm(std::string_view text);
std::string_view to_string(WeightNorm norm);

/// Empirical deviation: the mean of |a_p - b_p| over every cross-class pair.
DeviationVector estimate_deviation(std::span<const FeatureVector> class_a, std::span<const FeatureVector> class_b);

/// Splits a table by label and estimates deviations between BENIGN and MALIGNANT rows.
DeviationVector estimate_deviation(const FeatureTable& table);

/// Weights proportional to the deviations. Throws ValidationError when every
/// deviation is zero or any is negative.
WeightVector solve_weights(std::span<const double> deviation, WeightNorm norm = WeightNorm::L1);

std::string write_weights(std::span<const std::string> names, std::span<const double> weights);

struct NamedWeights
{
    std::vector<std::string> names;
    WeightVector weights;
};

NamedWeights parse_weights(std::string_view text);

} // namespace wfsvm
