#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pearsonq {

/// Base for errors caused by the data at hand (degenerate samples, bad files).
/// CLI maps these to exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Base for numerical failures (singular systems, non-convergence).
/// CLI maps these to exit code 4.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The sample concentrates on too few points: Theta-hat is (numerically) zero
/// and the moment estimators are undefined.
class ThetaDegenerate : public DataError {
public:
    ThetaDegenerate(std::size_t distinct_values, double theta)
        : DataError("degenerate sample: theta=" + std::to_string(theta) +
                    " with " + std::to_string(distinct_values) + " distinct value(s); "
                    "estimators require >= 3 distinct values and theta > 0"),
          distinct_values(distinct_values),
          theta(theta) {}

    std::size_t distinct_values;
    double theta;
};

/// The 3x3 moment system is numerically singular.
class SingularSystem : public NumericError {
public:
    explicit SingularSystem(double condition_estimate)
        : NumericError("moment system is numerically singular (condition estimate " +
                       std::to_string(condition_estimate) + ")"),
          condition_estimate(condition_estimate) {}

    double condition_estimate;
};

/// The estimated null covariance matrix cannot be inverted.
class SingularCovariance : public NumericError {
public:
    SingularCovariance(double det, double scale)
        : NumericError("estimated null covariance is singular (det=" +
                       std::to_string(det) + ", scale=" + std::to_string(scale) + ")"),
          det(det),
          scale(scale) {}

    double det;
    double scale;
};

/// A plugged-in variance estimate came out non-positive; the sample is too
/// degenerate for the requested test.
class NonpositiveVariance : public DataError {
public:
    explicit NonpositiveVariance(double value)
        : DataError("estimated variance is non-positive (" + std::to_string(value) + ")"),
          value(value) {}

    double value;
};

/// Significance level outside the tabulated grid of the small-sample table.
class UnsupportedAlpha : public std::invalid_argument {
public:
    explicit UnsupportedAlpha(double alpha)
        : std::invalid_argument("alpha=" + std::to_string(alpha) +
                                " is not tabulated; use one of 0.10, 0.05, 0.025, 0.01"),
          alpha(alpha) {}

    double alpha;
};

}  // namespace pearsonq
