#pragma once

// Weighted marginal-entropy entanglement measures and the checkers for the
// properties they are expected to satisfy.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "aep/tensor_core.hpp"

namespace aep {

enum class MeasureKind {
    weighted_marginal_renyi,            ///< sum_j theta_j H_{alpha_j}(Tr over single party j)
    weighted_marginal_shannon_general,  ///< sum_b theta_b H(marginal on subset b)
};

std::string to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(const std::string &name);

struct MeasureTerm {
    Bipartition cut;
    double weight = 0.0;
    double alpha = 1.0;
};

class MeasureSpec {
  public:
    static constexpr double kWeightTolerance = 1e-9;

    /// Validates: weights nonnegative and summing to one, alphas in [0,1],
    /// single-party cuts for the Renyi kind, alpha == 1 for the general kind.
    /// For the general kind, a subset and its complement are merged onto the
    /// side containing party 0.
    MeasureSpec(MeasureKind kind, std::size_t parties, std::vector<MeasureTerm> terms);

    /// E^theta: theta over single parties, one alpha for all cuts.
    static MeasureSpec weighted_renyi(std::span<const double> theta, double alpha = 1.0);
    static MeasureSpec weighted_renyi(std::span<const double> theta, std::span<const double> alphas);
    /// H^theta over arbitrary subsets.
    static MeasureSpec weighted_general(std::size_t parties,
                                        const std::vector<std::pair<std::vector<std::size_t>, double>> &theta);

    [[nodiscard]] MeasureKind kind() const { return kind_; }
    [[nodiscard]] std::size_t parties() const { return parties_; }
    [[nodiscard]] const std::vector<MeasureTerm> &terms() const { return terms_; }
    /// True when every term uses the Shannon entropy.
    [[nodiscard]] bool shannon_type() const;
    /// Single-party weights theta_j (zero for parties without a term); Renyi kind only.
    [[nodiscard]] std::vector<double> single_party_weights() const;
    /// Same weights and cuts, every alpha replaced.
    [[nodiscard]] MeasureSpec with_alpha(double alpha) const;

  private:
    MeasureKind kind_;
    std::size_t parties_;
    std::vector<MeasureTerm> terms_;
};

void to_json(nlohmann::json &j, const MeasureSpec &spec);
/// `parties` overrides the optional "parties" field; 0 means infer from the JSON.
MeasureSpec measure_from_json(const nlohmann::json &j, std::size_t parties = 0);

/// sum_b theta_b H_{alpha_b}(marginal(psi/||psi||, b)). Throws on the zero vector
/// or a party-count mismatch.
double evaluate(const MeasureSpec &spec, const MultipartiteState &psi);

/// The smoothing limit sum_b theta_b H(marginal b), i.e. evaluate() with every alpha set to 1.
double shannon_limit(const MeasureSpec &spec, const MultipartiteState &psi);

struct SandwichBounds {
    double lower = 0.0;  ///< sum_j theta_j H(Tr_j)
    double upper = 0.0;  ///< sum_j theta_j H_0(Tr_j)
};
SandwichBounds sandwich_bounds(const MultipartiteState &psi, std::span<const double> theta);

struct ContinuityBound {
    std::size_t parties = 0;
    double delta = 0.0;
    double a = 0.0;
    double b = 0.0;

    /// a * log2(dim) + b
    [[nodiscard]] double at(double log2_dim) const { return a * log2_dim + b; }
};

/// Bound functions for |E(phi) - E(psi)| in terms of delta = trace distance.
/// Throws std::invalid_argument unless delta in [0,1).
ContinuityBound continuity_bound(std::size_t parties, double delta);

/// a(delta) log2(total dim) + b(delta) - |E(phi) - E(psi)|; +inf when psi and
/// phi are orthogonal (the bound diverges).
double continuity_slack(const MeasureSpec &spec, const MultipartiteState &psi, const MultipartiteState &phi);

/// |E(sqrt(p) phi (+) sqrt(1-p) psi) - p E(phi) - (1-p) E(psi) - h(p)|. Requires a Shannon-type spec.
double check_direct_sum_identity(const MeasureSpec &spec, const MultipartiteState &psi, const MultipartiteState &phi,
                                 double p);

/// max_i E(psi_i/||psi_i||) + log2 l - E((+)_i psi_i). Summands must carry total
/// squared norm one.
double check_log_boundedness(const MeasureSpec &spec, std::span<const MultipartiteState> summands);

/// |E(psi (x) phi) - E(psi) - E(phi)|
double check_additivity(const MeasureSpec &spec, const MultipartiteState &psi, const MultipartiteState &phi);

}  // namespace aep
