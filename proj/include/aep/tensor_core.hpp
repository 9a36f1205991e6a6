#pragma once

// Dense k-partite pure states.
//
// Amplitudes are stored in row-major multi-index order: for dims (d_0, ..., d_{k-1})
// the basis vector |i_0 ... i_{k-1}> sits at flat index
//   ((i_0 * d_1 + i_1) * d_2 + i_2) ... * d_{k-1} + i_{k-1},
// so party 0 is the most significant digit. Every embedding below (tensor
// products, direct sums, bipartition reshapes) is defined against this layout.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "aep/distribution.hpp"
#include "aep/parallel.hpp"

namespace aep {

using cplx = std::complex<double>;
using Dims = std::vector<std::size_t>;

/// Largest total dimension an explicit state may have.
inline constexpr std::size_t kMaxExplicitDim = std::size_t{1} << 16;
inline constexpr double kUnitTolerance = 1e-12;

class MultipartiteState {
  public:
    /// Throws std::invalid_argument when dims is empty, contains a zero, or does
    /// not match amps.size(); std::length_error when the product exceeds kMaxExplicitDim.
    MultipartiteState(Dims dims, Eigen::VectorXcd amps);

    /// Computational basis vector |index_0 ... index_{k-1}>.
    static MultipartiteState basis(Dims dims, std::span<const std::size_t> index);
    static MultipartiteState zero(Dims dims);

    [[nodiscard]] const Dims &dims() const { return dims_; }
    [[nodiscard]] std::size_t parties() const { return dims_.size(); }
    [[nodiscard]] std::size_t total_dim() const { return static_cast<std::size_t>(amps_.size()); }
    [[nodiscard]] const Eigen::VectorXcd &amps() const { return amps_; }
    [[nodiscard]] cplx operator[](std::size_t flat) const { return amps_[static_cast<Eigen::Index>(flat)]; }

    [[nodiscard]] double norm_sq() const { return amps_.squaredNorm(); }
    [[nodiscard]] double norm() const { return amps_.norm(); }
    [[nodiscard]] bool is_unit(double tol = kUnitTolerance) const;

    /// Throws std::invalid_argument on the zero vector.
    [[nodiscard]] MultipartiteState normalized() const;
    [[nodiscard]] MultipartiteState scaled(cplx factor) const;

    [[nodiscard]] std::size_t flat_index(std::span<const std::size_t> multi) const;
    [[nodiscard]] std::vector<std::size_t> multi_index(std::size_t flat) const;

  private:
    Dims dims_;
    Eigen::VectorXcd amps_;
};

std::size_t product(const Dims &dims);

/// Hermitian PSD matrix with trace at most one (up to 1e-12).
class DensityMatrix {
  public:
    static constexpr double kTolerance = 1e-12;

    /// Validates Hermiticity, positivity and trace; stores the Hermitian part.
    explicit DensityMatrix(const Eigen::MatrixXcd &matrix);

    [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
    [[nodiscard]] const Eigen::MatrixXcd &matrix() const { return matrix_; }
    [[nodiscard]] double trace() const { return matrix_.trace().real(); }
    /// Eigenvalues in descending order, values within rounding of zero clamped to 0.
    [[nodiscard]] std::vector<double> spectrum() const;
    [[nodiscard]] double max_eigenvalue() const;

  private:
    Eigen::MatrixXcd matrix_;
};

/// Nonempty proper subset of the k parties, stored sorted.
class Bipartition {
  public:
    Bipartition(std::size_t parties, std::vector<std::size_t> subset);
    static Bipartition single(std::size_t parties, std::size_t party);

    [[nodiscard]] std::size_t parties() const { return parties_; }
    [[nodiscard]] const std::vector<std::size_t> &subset() const { return subset_; }
    [[nodiscard]] bool contains(std::size_t party) const;
    [[nodiscard]] Bipartition complement() const;
    /// The side of the cut that contains party 0.
    [[nodiscard]] Bipartition canonical() const;

    friend bool operator==(const Bipartition &, const Bipartition &) = default;
    friend auto operator<=>(const Bipartition &, const Bipartition &) = default;

  private:
    std::size_t parties_;
    std::vector<std::size_t> subset_;
};

struct SchmidtData {
    Distribution coefficients;  ///< squared Schmidt coefficients, descending
    Eigen::MatrixXcd left;      ///< columns: orthonormal vectors on the parties of the cut
    Eigen::MatrixXcd right;     ///< columns: orthonormal vectors on the complement

    /// sum_i sqrt(lambda_i) left_i (x) right_i, re-embedded into `dims`.
    [[nodiscard]] MultipartiteState reconstruct(const Dims &dims, const Bipartition &cut) const;
};

/// Amplitudes reshaped into a (dim of cut) x (dim of complement) matrix.
Eigen::MatrixXcd bipartite_matrix(const MultipartiteState &psi, const Bipartition &cut);
MultipartiteState from_bipartite_matrix(const Eigen::MatrixXcd &m, const Dims &dims, const Bipartition &cut);

MultipartiteState tensor_product(const MultipartiteState &psi, const MultipartiteState &phi);
MultipartiteState tensor_power(const MultipartiteState &psi, std::size_t n);
MultipartiteState direct_sum(const MultipartiteState &psi, const MultipartiteState &phi);

/// Reduced operator on the parties of `cut`; its trace equals ||psi||^2.
DensityMatrix marginal(const MultipartiteState &psi, const Bipartition &cut);
/// Eigenvalues of marginal(psi, cut), descending, via singular values of the
/// bipartite reshape. Sums to ||psi||^2.
std::vector<double> marginal_spectrum(const MultipartiteState &psi, const Bipartition &cut);
SchmidtData schmidt(const MultipartiteState &psi, const Bipartition &cut);
/// Number of Schmidt coefficients above rel_tol * (largest coefficient).
std::size_t schmidt_rank(const MultipartiteState &psi, const Bipartition &cut, double rel_tol = 1e-10);

double fidelity_sq(const MultipartiteState &psi, const MultipartiteState &phi);
/// 1 - |<phi|psi>|^2 computed as ||phi - <psi|phi> psi||^2, accurate when the
/// overlap is close to one.
double infidelity(const MultipartiteState &psi, const MultipartiteState &phi);
double trace_distance_pure(const MultipartiteState &psi, const MultipartiteState &phi);
double trace_distance(const DensityMatrix &rho, const DensityMatrix &sigma);
DensityMatrix projector(const MultipartiteState &psi);

MultipartiteState ghz(std::size_t parties, std::size_t levels);

/// Applies `op` (out_dim x d_party) to one party. `op` may be rectangular, so
/// the party's local dimension can change.
MultipartiteState apply_local(const MultipartiteState &psi, std::size_t party, const Eigen::MatrixXcd &op,
                              Exec exec = Exec::parallel);

/// Reorders parties: party p of the result is party perm[p] of psi.
MultipartiteState permute_parties(const MultipartiteState &psi, std::span<const std::size_t> perm);

void to_json(nlohmann::json &j, const MultipartiteState &psi);
MultipartiteState state_from_json(const nlohmann::json &j);

}  // namespace aep
