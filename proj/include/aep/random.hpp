#pragma once

// Seeded samplers. Variates are derived from raw std::mt19937_64 output with
// fixed conversions (53-bit uniforms, Box-Muller normals), so streams do not
// depend on the standard library's distribution implementations.

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "aep/distribution.hpp"
#include "aep/tensor_core.hpp"

namespace aep {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform();
    /// Uniform integer in [lo, hi].
    std::size_t integer(std::size_t lo, std::size_t hi);
    double normal();
    /// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
    cplx complex_normal();

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Haar-random unit vector on the given dims.
MultipartiteState random_state(const Dims &dims, Rng &rng);
/// Random local dims in [lo, hi] for `parties` parties.
Dims random_dims(std::size_t parties, std::size_t lo, std::size_t hi, Rng &rng);
/// Uniform on the simplex with m atoms.
Distribution random_distribution(std::size_t m, Rng &rng);
/// rows x cols matrix with orthonormal columns (rows >= cols), Haar distributed.
/// Q from Householder QR of a complex Gaussian matrix, columns rescaled by the
/// phase of the matching diagonal entry of R.
Eigen::MatrixXcd haar_isometry(std::size_t rows, std::size_t cols, Rng &rng);
/// G G^dagger / Tr with G a dim x rank complex Gaussian matrix.
Eigen::MatrixXcd random_density(std::size_t dim, std::size_t rank, Rng &rng);
/// Unit vector close to psi: normalize(psi + scale * gaussian noise).
MultipartiteState perturb(const MultipartiteState &psi, double scale, Rng &rng);

}  // namespace aep
