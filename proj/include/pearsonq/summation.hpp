#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace pearsonq {

/// Neumaier-compensated accumulator. Tracks the rounding error of every
/// addition so that long reductions keep near-full double precision.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    [[nodiscard]] double value() const { return sum_ + comp_; }

    void reset() { sum_ = 0.0; comp_ = 0.0; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

[[nodiscard]] inline double compensated_sum(std::span<const double> xs) {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

}  // namespace pearsonq
