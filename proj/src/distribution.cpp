#include "aep/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace aep {

Distribution::Distribution(std::vector<double> weights) : weights_(std::move(weights)) {
    for (double &w : weights_) {
        if (!std::isfinite(w)) throw std::invalid_argument("Distribution: non-finite weight");
        if (w < -kNormTolerance) throw std::invalid_argument("Distribution: negative weight");
        if (w < 0.0) w = 0.0;
    }
}

Distribution Distribution::uniform(std::size_t m) {
    if (m == 0) throw std::invalid_argument("Distribution::uniform: empty");
    return Distribution(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

Distribution Distribution::dirac(std::size_t m, std::size_t at) {
    if (at >= m) throw std::invalid_argument("Distribution::dirac: index out of range");
    std::vector<double> w(m, 0.0);
    w[at] = 1.0;
    return Distribution(std::move(w));
}

double Distribution::sum() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

bool Distribution::is_normalized(double tol) const { return std::abs(sum() - 1.0) <= tol; }

std::size_t Distribution::support_size() const {
    return static_cast<std::size_t>(
        std::count_if(weights_.begin(), weights_.end(), [](double w) { return w > kSupportThreshold; }));
}

Distribution Distribution::normalized() const {
    const double s = sum();
    if (!(s > 0.0)) throw std::invalid_argument("Distribution::normalized: zero mass");
    std::vector<double> w(weights_);
    for (double &x : w) x /= s;
    return Distribution(std::move(w));
}

Distribution Distribution::support_only() const {
    std::vector<double> w;
    std::copy_if(weights_.begin(), weights_.end(), std::back_inserter(w),
                 [](double x) { return x > kSupportThreshold; });
    return Distribution(std::move(w));
}

Distribution Distribution::sorted_descending() const {
    std::vector<double> w(weights_);
    std::sort(w.begin(), w.end(), std::greater<>());
    return Distribution(std::move(w));
}

}  // namespace aep
