#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aep {

/// Finite nonnegative weight vector. Subnormalized vectors are allowed; the
/// entropy functions check normalization themselves.
class Distribution {
  public:
    /// Weight below which an atom counts as outside the support.
    static constexpr double kSupportThreshold = 1e-15;
    static constexpr double kNormTolerance = 1e-12;

    Distribution() = default;
    /// Throws std::invalid_argument on negative (below -1e-12) or non-finite
    /// weights. Negatives within rounding are clamped to zero.
    explicit Distribution(std::vector<double> weights);

    static Distribution uniform(std::size_t m);
    static Distribution dirac(std::size_t m, std::size_t at = 0);

    [[nodiscard]] std::size_t size() const { return weights_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return weights_[i]; }
    [[nodiscard]] std::span<const double> weights() const { return weights_; }
    [[nodiscard]] double sum() const;
    [[nodiscard]] bool is_normalized(double tol = kNormTolerance) const;
    [[nodiscard]] std::size_t support_size() const;

    /// Copy rescaled to total mass one. Throws on a zero vector.
    [[nodiscard]] Distribution normalized() const;
    /// Atoms with weight > kSupportThreshold, in original order.
    [[nodiscard]] Distribution support_only() const;
    [[nodiscard]] Distribution sorted_descending() const;

    auto begin() const { return weights_.begin(); }
    auto end() const { return weights_.end(); }

  private:
    std::vector<double> weights_;
};

}  // namespace aep
