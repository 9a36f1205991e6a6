#include "aep/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aep {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::integer(std::size_t lo, std::size_t hi) {
    if (hi < lo) throw std::invalid_argument("Rng::integer: empty range");
    const std::uint64_t span = hi - lo + 1;
    return lo + static_cast<std::size_t>(engine_() % span);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
}

cplx Rng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

MultipartiteState random_state(const Dims &dims, Rng &rng) {
    const std::size_t total = product(dims);
    if (total > kMaxExplicitDim) throw std::length_error("random_state: dimension exceeds explicit-state cap");
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(total));
    for (Eigen::Index i = 0; i < amps.size(); ++i) amps[i] = rng.complex_normal();
    return MultipartiteState(dims, amps / amps.norm());
}

Dims random_dims(std::size_t parties, std::size_t lo, std::size_t hi, Rng &rng) {
    Dims d(parties);
    for (auto &x : d) x = rng.integer(lo, hi);
    return d;
}

Distribution random_distribution(std::size_t m, Rng &rng) {
    std::vector<double> w(m);
    double s = 0.0;
    for (auto &x : w) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        s += (x = -std::log(u));
    }
    for (auto &x : w) x /= s;
    return Distribution(std::move(w));
}

Eigen::MatrixXcd haar_isometry(std::size_t rows, std::size_t cols, Rng &rng) {
    if (rows < cols || cols == 0) throw std::invalid_argument("haar_isometry: need rows >= cols > 0");
    Eigen::MatrixXcd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index c = 0; c < g.cols(); ++c)
        for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = rng.complex_normal();
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(g.rows(), g.cols());
    const Eigen::MatrixXcd &r = qr.matrixQR();
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
        const cplx d = r(c, c);
        const double a = std::abs(d);
        if (a > 0.0) q.col(c) *= d / a;
    }
    return q;
}

Eigen::MatrixXcd random_density(std::size_t dim, std::size_t rank, Rng &rng) {
    Eigen::MatrixXcd g(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rank));
    for (Eigen::Index c = 0; c < g.cols(); ++c)
        for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, c) = rng.complex_normal();
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    return (rho + rho.adjoint()) * 0.5;
}

MultipartiteState perturb(const MultipartiteState &psi, double scale, Rng &rng) {
    Eigen::VectorXcd amps = psi.amps();
    for (Eigen::Index i = 0; i < amps.size(); ++i) amps[i] += scale * rng.complex_normal();
    return MultipartiteState(psi.dims(), amps / amps.norm());
}

}  // namespace aep
