#pragma once

// Classical entropic quantities. All logarithms are base 2.

#include <cstddef>
#include <limits>

#include "aep/distribution.hpp"
#include "aep/parallel.hpp"
#include "aep/tensor_core.hpp"

namespace aep {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// -sum P log2 P with 0 log 0 = 0. Throws std::invalid_argument unless P is normalized.
double shannon(const Distribution &p);

/// Renyi entropy of order alpha in [0, inf]. alpha == 1 dispatches to shannon,
/// alpha == 0 counts atoms above Distribution::kSupportThreshold, alpha == inf
/// gives -log2 max P.
double renyi(const Distribution &p, double alpha);

/// Relative entropy D(P||Q); +inf when supp P is not contained in supp Q.
double kl(const Distribution &p, const Distribution &q);
double tv(const Distribution &p, const Distribution &q);
double binary_h(double p);
double binary_d(double p, double q);

struct VariationalCheck {
    double lhs = 0.0;        ///< H_alpha(P)
    double rhs = 0.0;        ///< max over the grid of H(Q) - alpha/(1-alpha) D(Q||P)
    double gap = 0.0;        ///< lhs - rhs
    double tolerance = 0.0;  ///< admissible gap for this grid resolution
    Distribution maximizer;
    std::size_t grid_points = 0;

    [[nodiscard]] bool ok() const { return gap >= -1e-9 && gap <= tolerance; }
};

/// Largest support the simplex grid search accepts.
inline constexpr std::size_t kVariationalMaxSupport = 4;
/// Grid points beyond this count are rejected.
inline constexpr std::size_t kVariationalMaxGridPoints = std::size_t{50'000'000};

/// Grid search for the maximizer in the variational form of H_alpha, alpha in (0,1).
/// The grid is the lattice {Q : Q(x) in step * N} on supp P with step ~ grid_resolution.
/// Gap tolerance is 10 * grid_resolution.
VariationalCheck variational_renyi_check(const Distribution &p, double alpha, double grid_resolution,
                                         Exec exec = Exec::parallel);

/// Renyi entropy of the spectrum of the marginal of psi/||psi|| on `cut`.
double marginal_entropy(const MultipartiteState &psi, const Bipartition &cut, double alpha);

}  // namespace aep
