#pragma once
/// Fixed-order floating point reductions.

#include <cstddef>
#include <vector>

namespace bloch {

/// Pairwise (cascade) summation with a fixed split; error O(log n eps), order independent of threads.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

/// Neumaier-compensated running sum for sequential accumulation in a fixed order.
class CompensatedSum {
public:
    void add(double v);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0, comp_ = 0.0;
};

}  // namespace bloch
