#pragma once

// Internal numeric helpers shared by the engine sources.

#include <cmath>
#include <cstddef>
#include <vector>

namespace ethos::detail {

/// Kahan compensated summation.
struct KahanAccumulator {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }

    double value() const { return sum; }
};

/// Numerically stable softmax of scores/temperature. Temperature must be > 0.
inline std::vector<double> stable_softmax(const std::vector<double>& scores,
                                          double temperature) {
    std::vector<double> out(scores.size(), 0.0);
    if (scores.empty()) return out;
    double peak = scores[0];
    for (double s : scores) peak = std::max(peak, s);
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp((scores[i] - peak) / temperature);
        total += out[i];
    }
    for (double& p : out) p /= total;
    return out;
}

inline double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

}  // namespace ethos::detail
