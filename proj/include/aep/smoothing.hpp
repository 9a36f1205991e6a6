#pragma once

// Epsilon-smoothing of entanglement measures and the type-class machinery for
// tensor powers.
//
// Smoothing ball: phi is admissible for psi when |<phi|psi>|^2 >= 1 - eps.
// Classical smoothing of a spectrum removes the least probable atoms whose
// total mass stays within the budget; only the surviving support size is used.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aep/distribution.hpp"
#include "aep/measures.hpp"
#include "aep/parallel.hpp"
#include "aep/tensor_core.hpp"

namespace aep {

// ---------------------------------------------------------------------------
// Type classes

inline constexpr std::size_t kMaxTypeSupport = 6;
inline constexpr std::size_t kMaxTypeCopies = 200;
/// Entry-count cap: C(n+m-1, m-1) above this is rejected.
inline constexpr std::size_t kMaxTypeEntries = 10'000'000;

struct TypeClassEntry {
    std::vector<std::uint32_t> type;  ///< letter counts, summing to n
    double log2_probability = 0.0;    ///< log2 of one string's probability
    double probability = 0.0;         ///< 2^log2_probability (may underflow to 0)
    double multiplicity = 0.0;        ///< multinomial(n; type); exact below 2^53
    double log2_multiplicity = 0.0;

    /// multiplicity * probability, evaluated in the log domain.
    [[nodiscard]] double mass() const;
};

/// Spectrum of P^{(x)n} grouped by type. `base` is the support of P (zero
/// atoms dropped); entries are in lexicographically descending type order.
struct TypeClassSpectrum {
    Distribution base;
    std::size_t n = 0;
    std::vector<TypeClassEntry> entries;

    [[nodiscard]] double total_mass() const;
    [[nodiscard]] double total_multiplicity() const;
};

/// Throws std::invalid_argument when |supp P| > kMaxTypeSupport, n > kMaxTypeCopies,
/// n == 0, or the entry count exceeds kMaxTypeEntries.
TypeClassSpectrum product_type_spectrum(const Distribution &p, std::size_t n, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Classical smoothing

/// Outcome of dropping the least probable strings within a mass budget.
struct Truncation {
    double kept = 0.0;        ///< surviving support size (may exceed 2^53)
    double log2_kept = 0.0;
    double removed_mass = 0.0;
    double full_support = 0.0;
};

/// Minimal support size over the TV ball of radius eps around P. Requires a
/// normalized P and eps in [0,1). Result >= 1.
std::size_t smooth_support(const Distribution &p, double eps);

/// Same truncation on the spectrum of P^{(x)n}; strings of equal probability
/// are interchangeable, so partial type classes keep the minimal count.
Truncation truncate_product(const Distribution &p, std::size_t n, double eps, Exec exec = Exec::parallel);

/// (1/n) H_0^eps(P^{(x)n}).
double regularized_smooth_h0(const Distribution &p, double eps, std::size_t n, Exec exec = Exec::parallel);

/// sum_{m = floor(n(p - delta))}^{floor(n(p + delta))} C(n,m) p^m (1-p)^(n-m), with the
/// window clipped to [0, n]. Terms are evaluated through lgamma.
double binomial_window_mass(std::size_t n, double p, double delta);

// ---------------------------------------------------------------------------
// Typical projector

enum class AchieverMode { automatic, explicit_state, spectral };

struct CutRank {
    std::size_t party = 0;
    double rank = 0.0;        ///< r'_j
    double log2_rank = 0.0;
    double tail = 0.0;        ///< eigenvalue mass dropped on this cut, <= eps/k
    double full_rank = 0.0;   ///< rank of the untruncated marginal of psi^{(x)n}
};

struct SmoothingResult {
    double value = 0.0;             ///< upper bound on E^eps (not divided by n)
    double unsmoothed_value = 0.0;  ///< E at the unsmoothed state
    double epsilon = 0.0;
    std::size_t n = 1;
    double certificate = 1.0;       ///< proven lower bound on the achiever's squared overlap
    std::vector<CutRank> cuts;      ///< filled by typical_projector
    std::optional<MultipartiteState> achiever;
    std::optional<double> measured_fidelity;  ///< |<achiever|psi^{(x)n}>|^2 in explicit mode
    bool converged = true;
    std::size_t iterations = 0;
};

/// Projects psi^{(x)n} onto the top r'_j eigenvectors of every single-party
/// marginal, where r'_j is the smallest count leaving eigenvalue tail <= eps/k.
/// `value` is sum_j theta_j log2 r'_j (theta uniform when empty), an upper bound
/// on the smoothed weighted H_0 measure. Explicit mode needs (dim psi)^n <= 2^16;
/// requesting it beyond that throws std::length_error.
SmoothingResult typical_projector(const MultipartiteState &psi, std::size_t n, double eps,
                                  AchieverMode mode = AchieverMode::automatic, std::span<const double> theta = {});

// ---------------------------------------------------------------------------
// Infimum estimate

struct OptConfig {
    std::size_t restarts = 32;
    std::size_t max_iterations = 5000;
    double relative_tolerance = 1e-8;
    double initial_step = 0.25;
    double min_step = 1e-12;
    std::uint64_t seed = 0x5eed;
    Exec exec = Exec::parallel;
};

/// Total dimension accepted by smooth_infimum_estimate.
inline constexpr std::size_t kMaxOptimizerDim = std::size_t{1} << 10;

/// Certified upper bound on E^eps(psi): best feasible point found by projected
/// gradient descent on the sphere intersected with the fidelity cap, started
/// from psi, Schmidt truncations across each cut, the typical projector
/// achiever, `seeds` and random feasible points. The returned achiever always
/// satisfies |<phi|psi>|^2 >= 1 - eps - 1e-9.
SmoothingResult smooth_infimum_estimate(const MeasureSpec &measure, const MultipartiteState &psi, double eps,
                                        const OptConfig &config = {},
                                        std::span<const MultipartiteState> seeds = {});

/// Runs smooth_infimum_estimate over ascending eps, feeding every achiever into
/// the later runs, so values are nonincreasing in eps.
std::vector<SmoothingResult> smooth_infimum_profile(const MeasureSpec &measure, const MultipartiteState &psi,
                                                    std::span<const double> eps_list, const OptConfig &config = {});

// ---------------------------------------------------------------------------
// Regularization

struct PhiRow {
    std::size_t n = 0;
    double epsilon = 0.0;
    double value = 0.0;        ///< (1/n) upper bound on E^eps(psi^{(x)n})
    std::string source;        ///< "additivity", "typical_projector" or "optimizer"
    double limit = 0.0;        ///< sum_b theta_b H(marginal b)
    double gap = 0.0;          ///< value - limit
    double certificate = 1.0;
    std::vector<double> log2_ranks;  ///< per-party log2 r'_j (single-party measures)
};

struct PhiOptions {
    bool use_optimizer = false;  ///< also run the optimizer when (dim psi)^n <= kMaxOptimizerDim
    OptConfig optimizer{};
    Exec exec = Exec::parallel;
};

/// Per-copy upper bounds on E^eps(psi^{(x)n}) for each n, with the smoothing
/// limit sum_b theta_b H(marginal b). Rows follow the order of n_list.
std::vector<PhiRow> phi_estimate(const MeasureSpec &measure, const MultipartiteState &psi, double eps,
                                 std::span<const std::size_t> n_list, const PhiOptions &options = {});

/// Shared CSV writer: '.' decimal point, '\n' line endings, 17 significant digits.
std::string format_double(double x);

}  // namespace aep
