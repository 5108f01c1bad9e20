#pragma once

#include <cmath>
#include <span>

namespace maillet {

// Neumaier's variant of Kahan summation. Order-sensitive like any float sum;
// callers that need thread-independent results must feed terms in a fixed order.
class NeumaierSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
        abs_ += std::fabs(x);
    }

    NeumaierSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }

    // Folds another partial in. Adds its rounded value and its correction as
    // two separate terms so the result only depends on the order of merges.
    void merge(const NeumaierSum& other) noexcept {
        add(other.sum_);
        add(other.comp_);
        abs_ += other.abs_ - std::fabs(other.sum_) - std::fabs(other.comp_);
    }

    double value() const noexcept { return sum_ + comp_; }

    // Sum of |terms|; feeds rounding-error allowances.
    double abs_total() const noexcept { return abs_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double abs_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

} // namespace maillet
