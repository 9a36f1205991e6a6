#pragma once

// Remembering one-step LOCC channels acting on conditionally pure ensembles.
//
// The classical register is kept as an explicit label on every branch. A
// channel maps a branch with label x to branches labelled y for every y with
// f(y) == x, applying Kraus operator K_y to one party.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "aep/measures.hpp"
#include "aep/parallel.hpp"
#include "aep/tensor_core.hpp"

namespace aep {

struct Branch {
    double weight = 0.0;
    std::size_t label = 0;
    MultipartiteState state;  ///< unit vector
};

class ConditionallyPureState {
  public:
    static constexpr double kTolerance = 1e-12;

    /// Throws std::invalid_argument on negative weights, total weight above
    /// 1 + 1e-12, repeated labels, non-unit branch states, or mixed party counts.
    explicit ConditionallyPureState(std::vector<Branch> branches);
    /// The single branch (1, label 0, psi).
    static ConditionallyPureState pure(const MultipartiteState &psi);

    [[nodiscard]] const std::vector<Branch> &branches() const { return branches_; }
    [[nodiscard]] std::size_t size() const { return branches_.size(); }
    [[nodiscard]] double total_weight() const;
    /// Branch with this label, or nullptr.
    [[nodiscard]] const Branch *find(std::size_t label) const;

    /// Density matrix sum_x P(x) |psi_x><psi_x| with the register traced out.
    /// Requires all branches to share dims.
    [[nodiscard]] DensityMatrix discard_register() const;

  private:
    std::vector<Branch> branches_;  // sorted by label
};

class OneStepChannel {
  public:
    static constexpr double kTolerance = 1e-10;

    /// kraus[y] maps the party's space to its output space; register_map[y] is
    /// f(y). `in_alphabet` is |X|; 0 means max(f) + 1. Throws when the family
    /// is not trace non-increasing for some x.
    OneStepChannel(std::size_t party, std::vector<std::size_t> register_map, std::vector<Eigen::MatrixXcd> kraus,
                   std::size_t in_alphabet = 0);

    [[nodiscard]] std::size_t party() const { return party_; }
    [[nodiscard]] std::size_t in_alphabet() const { return in_alphabet_; }
    [[nodiscard]] std::size_t out_alphabet() const { return kraus_.size(); }
    [[nodiscard]] const std::vector<std::size_t> &register_map() const { return map_; }
    [[nodiscard]] const std::vector<Eigen::MatrixXcd> &kraus() const { return kraus_; }
    [[nodiscard]] std::size_t input_dim() const { return static_cast<std::size_t>(kraus_.front().cols()); }
    /// sum_{f(y)=x} K_y^dagger K_y == I for every x, within kTolerance.
    [[nodiscard]] bool trace_preserving() const { return trace_preserving_; }

  private:
    std::size_t party_;
    std::vector<std::size_t> map_;
    std::vector<Eigen::MatrixXcd> kraus_;
    std::size_t in_alphabet_;
    bool trace_preserving_ = false;
};

using Protocol = std::vector<OneStepChannel>;

/// Branch weight below which an outcome is dropped.
inline constexpr double kDropWeight = 1e-15;

ConditionallyPureState apply(const OneStepChannel &channel, const ConditionallyPureState &rho);
/// Applies the steps in order to the single branch (1, 0, psi). Labels are kept.
ConditionallyPureState compose_and_discard(const Protocol &protocol, const MultipartiteState &psi);

/// Haar isometry from in_dim to out_dim * branches, sliced into `branches` Kraus
/// operators. With in_alphabet > 1 an independent isometry is drawn for each
/// register value x, and output label y = x * branches + s maps back to x.
OneStepChannel random_one_step(std::size_t party, std::size_t in_dim, std::size_t out_dim, std::size_t branches,
                               std::uint64_t seed, std::size_t in_alphabet = 1);

/// Random multi-step trace-preserving protocol for states with the given dims.
/// Local dimensions may change along the way but stay within [1, max_dim].
Protocol random_protocol(const Dims &dims, std::size_t steps, std::size_t max_branches, std::size_t max_dim,
                         std::uint64_t seed);

/// Discard-and-prepare: every party measured out and reset to |0>.
Protocol discard_and_prepare(const Dims &dims);

/// Register alphabet size after running `protocol` (1 for the empty protocol).
std::size_t final_alphabet(const Protocol &protocol);

/// Protocol on psi (x) psi that runs `protocol` on the first copy and then on
/// the second. Joint register value is x_first * |X_second| + x_second.
/// The first step must have input alphabet 1.
Protocol two_copy_protocol(const Protocol &protocol, const Dims &dims);

/// Ensemble {(P(x) Q(y), x * b_alphabet + y, psi_x (x) phi_y)}.
ConditionallyPureState product_ensemble(const ConditionallyPureState &a, const ConditionallyPureState &b,
                                        std::size_t b_alphabet);

struct MonotoneCheck {
    double initial = 0.0;              ///< E(psi)
    double average = 0.0;              ///< sum_x P(x) E(psi_x)
    double slack = 0.0;                ///< initial - average
    double weakest_branch_slack = 0.0; ///< min_x E(psi) - P(x) E(psi_x)
    std::size_t branches = 0;
};
MonotoneCheck monotone_avg_check(const MeasureSpec &spec, const MultipartiteState &psi, const Protocol &protocol);

struct CondPureDistance {
    double trace_distance = 0.0;  ///< T(rho, sigma) with the register kept
    double tv = 0.0;              ///< TV(P, Q)
    double avg_branch = 0.0;      ///< sum_x P(x) T(psi_x, phi_x)
    bool tv_bound_ok = false;     ///< tv <= T
    bool avg_branch_bound_ok = false;  ///< avg_branch <= 2T
};
/// T is computed per label from the two-dimensional span of psi_x and phi_x.
/// A label present on one side only contributes T(psi_x, phi_x) = 1.
CondPureDistance check_cond_pure_distance(const ConditionallyPureState &rho, const ConditionallyPureState &sigma);

/// Reference trace distance with the register kept, from the explicit
/// block-diagonal operator. Used to cross-check the closed form.
double cond_pure_trace_distance_dense(const ConditionallyPureState &rho, const ConditionallyPureState &sigma);

struct OutcomeMass {
    double epsilon = 0.0;  ///< measured 1 - |<phi|psi>|^2
    double mass = 0.0;     ///< Q-mass of labels with |<phi_x|psi_x>|^2 >= 1 - eps'
    double bound = 0.0;    ///< 1 - 2 sqrt(eps) (1 + 1/sqrt(eps'))
    bool ok = false;
};
OutcomeMass check_outcome_prob_lower(const MultipartiteState &psi, const MultipartiteState &phi,
                                     const Protocol &protocol, double eps_prime);

struct MaxEigCheck {
    double gap = 0.0;             ///< |lambda_max(rho) - lambda_max(sigma)|
    double trace_distance = 0.0;
    bool ok = false;
};
MaxEigCheck check_max_eig(const DensityMatrix &rho, const DensityMatrix &sigma);

void to_json(nlohmann::json &j, const OneStepChannel &channel);
OneStepChannel channel_from_json(const nlohmann::json &j);
nlohmann::json protocol_to_json(const Protocol &protocol);
Protocol protocol_from_json(const nlohmann::json &j);

}  // namespace aep
