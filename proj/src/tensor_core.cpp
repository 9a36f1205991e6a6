#include "aep/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace aep {

namespace {

std::vector<std::size_t> strides_of(const Dims &dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t p = dims.size(); p-- > 1;) s[p - 1] = s[p] * dims[p];
    return s;
}

// For every flat index of `dims` (row-major), returns sum_p digit_p * coef[p] + add[p].
std::vector<std::size_t> affine_offsets(const Dims &dims, const std::vector<std::size_t> &coef,
                                        const std::vector<std::size_t> &add) {
    const std::size_t total = product(dims);
    const std::size_t k = dims.size();
    std::vector<std::size_t> out(total);
    std::vector<std::size_t> digit(k, 0);
    std::size_t base = std::accumulate(add.begin(), add.end(), std::size_t{0});
    std::size_t value = base;
    for (std::size_t flat = 0; flat < total; ++flat) {
        out[flat] = value;
        for (std::size_t p = k; p-- > 0;) {
            if (++digit[p] < dims[p]) {
                value += coef[p];
                break;
            }
            value -= coef[p] * (dims[p] - 1);
            digit[p] = 0;
        }
    }
    return out;
}

std::vector<std::size_t> sub_strides(const Dims &dims, const std::vector<std::size_t> &parties) {
    // Row-major strides restricted to `parties`; zero for parties not listed.
    std::vector<std::size_t> coef(dims.size(), 0);
    std::size_t s = 1;
    for (std::size_t idx = parties.size(); idx-- > 0;) {
        coef[parties[idx]] = s;
        s *= dims[parties[idx]];
    }
    return coef;
}

void require_same_parties(const MultipartiteState &a, const MultipartiteState &b, const char *what) {
    if (a.parties() != b.parties())
        throw std::invalid_argument(std::string(what) + ": party count mismatch (" + std::to_string(a.parties()) +
                                    " vs " + std::to_string(b.parties()) + ")");
}

void require_unit(const MultipartiteState &psi, const char *what) {
    if (!psi.is_unit(1e-10)) throw std::invalid_argument(std::string(what) + ": expected a unit vector");
}

}  // namespace

std::size_t product(const Dims &dims) {
    // saturates instead of wrapping; callers compare against kMaxExplicitDim
    constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
    std::size_t p = 1;
    for (std::size_t d : dims) {
        if (d != 0 && p > kMax / d) return kMax;
        p *= d;
    }
    return p;
}

// ---------------------------------------------------------------------------
// MultipartiteState

MultipartiteState::MultipartiteState(Dims dims, Eigen::VectorXcd amps) : dims_(std::move(dims)), amps_(std::move(amps)) {
    if (dims_.empty()) throw std::invalid_argument("MultipartiteState: at least one party required");
    if (std::find(dims_.begin(), dims_.end(), std::size_t{0}) != dims_.end())
        throw std::invalid_argument("MultipartiteState: zero local dimension");
    const std::size_t total = product(dims_);
    if (total > kMaxExplicitDim)
        throw std::length_error("MultipartiteState: total dimension exceeds explicit-state cap");
    if (static_cast<std::size_t>(amps_.size()) != total)
        throw std::invalid_argument("MultipartiteState: amplitude count " + std::to_string(amps_.size()) +
                                    " does not match product of dims " + std::to_string(total));
}

MultipartiteState MultipartiteState::basis(Dims dims, std::span<const std::size_t> index) {
    MultipartiteState s = zero(std::move(dims));
    s.amps_[static_cast<Eigen::Index>(s.flat_index(index))] = 1.0;
    return s;
}

MultipartiteState MultipartiteState::zero(Dims dims) {
    const std::size_t total = product(dims);
    if (total > kMaxExplicitDim) throw std::length_error("MultipartiteState: total dimension exceeds explicit-state cap");
    return MultipartiteState(std::move(dims), Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total)));
}

bool MultipartiteState::is_unit(double tol) const { return std::abs(norm_sq() - 1.0) <= tol; }

MultipartiteState MultipartiteState::normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw std::invalid_argument("MultipartiteState::normalized: zero vector");
    return MultipartiteState(dims_, amps_ / n);
}

MultipartiteState MultipartiteState::scaled(cplx factor) const { return MultipartiteState(dims_, amps_ * factor); }

std::size_t MultipartiteState::flat_index(std::span<const std::size_t> multi) const {
    if (multi.size() != dims_.size()) throw std::invalid_argument("flat_index: wrong number of coordinates");
    std::size_t flat = 0;
    for (std::size_t p = 0; p < dims_.size(); ++p) {
        if (multi[p] >= dims_[p]) throw std::out_of_range("flat_index: coordinate out of range");
        flat = flat * dims_[p] + multi[p];
    }
    return flat;
}

std::vector<std::size_t> MultipartiteState::multi_index(std::size_t flat) const {
    if (flat >= total_dim()) throw std::out_of_range("multi_index: flat index out of range");
    std::vector<std::size_t> multi(dims_.size());
    for (std::size_t p = dims_.size(); p-- > 0;) {
        multi[p] = flat % dims_[p];
        flat /= dims_[p];
    }
    return multi;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(const Eigen::MatrixXcd &matrix) {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
        throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > kTolerance)
        throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
    matrix_ = (matrix + matrix.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(matrix_, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kTolerance)
        throw std::invalid_argument("DensityMatrix: matrix is not positive semidefinite");
    if (trace() > 1.0 + kTolerance) throw std::invalid_argument("DensityMatrix: trace exceeds one");
}

std::vector<double> DensityMatrix::spectrum() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(matrix_, Eigen::EigenvaluesOnly);
    std::vector<double> ev(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
    for (double &x : ev) x = std::max(x, 0.0);
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

double DensityMatrix::max_eigenvalue() const { return spectrum().front(); }

// ---------------------------------------------------------------------------
// Bipartition

Bipartition::Bipartition(std::size_t parties, std::vector<std::size_t> subset)
    : parties_(parties), subset_(std::move(subset)) {
    std::sort(subset_.begin(), subset_.end());
    subset_.erase(std::unique(subset_.begin(), subset_.end()), subset_.end());
    if (subset_.empty() || subset_.size() >= parties_)
        throw std::invalid_argument("Bipartition: subset must be nonempty and proper");
    if (subset_.back() >= parties_) throw std::invalid_argument("Bipartition: party index out of range");
}

Bipartition Bipartition::single(std::size_t parties, std::size_t party) { return Bipartition(parties, {party}); }

bool Bipartition::contains(std::size_t party) const {
    return std::binary_search(subset_.begin(), subset_.end(), party);
}

Bipartition Bipartition::complement() const {
    std::vector<std::size_t> rest;
    for (std::size_t p = 0; p < parties_; ++p)
        if (!contains(p)) rest.push_back(p);
    return Bipartition(parties_, std::move(rest));
}

Bipartition Bipartition::canonical() const { return contains(0) ? *this : complement(); }

// ---------------------------------------------------------------------------
// Reshapes

Eigen::MatrixXcd bipartite_matrix(const MultipartiteState &psi, const Bipartition &cut) {
    if (cut.parties() != psi.parties()) throw std::invalid_argument("bipartite_matrix: cut has wrong party count");
    const Bipartition rest = cut.complement();
    const auto &dims = psi.dims();
    const std::vector<std::size_t> zero(dims.size(), 0);
    const auto rows = affine_offsets(dims, sub_strides(dims, cut.subset()), zero);
    const auto cols = affine_offsets(dims, sub_strides(dims, rest.subset()), zero);
    std::size_t nr = 1, nc = 1;
    for (std::size_t p : cut.subset()) nr *= dims[p];
    for (std::size_t p : rest.subset()) nc *= dims[p];
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
    for (std::size_t flat = 0; flat < psi.total_dim(); ++flat)
        m(static_cast<Eigen::Index>(rows[flat]), static_cast<Eigen::Index>(cols[flat])) = psi[flat];
    return m;
}

MultipartiteState from_bipartite_matrix(const Eigen::MatrixXcd &m, const Dims &dims, const Bipartition &cut) {
    const Bipartition rest = cut.complement();
    const std::vector<std::size_t> zero(dims.size(), 0);
    const auto rows = affine_offsets(dims, sub_strides(dims, cut.subset()), zero);
    const auto cols = affine_offsets(dims, sub_strides(dims, rest.subset()), zero);
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t flat = 0; flat < rows.size(); ++flat)
        amps[static_cast<Eigen::Index>(flat)] =
            m(static_cast<Eigen::Index>(rows[flat]), static_cast<Eigen::Index>(cols[flat]));
    return MultipartiteState(dims, std::move(amps));
}

// ---------------------------------------------------------------------------
// Products and sums

MultipartiteState tensor_product(const MultipartiteState &psi, const MultipartiteState &phi) {
    require_same_parties(psi, phi, "tensor_product");
    const std::size_t k = psi.parties();
    Dims out(k);
    for (std::size_t p = 0; p < k; ++p) out[p] = psi.dims()[p] * phi.dims()[p];
    MultipartiteState result = MultipartiteState::zero(out);
    const auto stride = strides_of(out);
    std::vector<std::size_t> coef_a(k), coef_b(stride), zero(k, 0);
    for (std::size_t p = 0; p < k; ++p) coef_a[p] = phi.dims()[p] * stride[p];
    const auto off_a = affine_offsets(psi.dims(), coef_a, zero);
    const auto off_b = affine_offsets(phi.dims(), coef_b, zero);
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(result.total_dim()));
    for (std::size_t a = 0; a < off_a.size(); ++a) {
        const cplx va = psi[a];
        for (std::size_t b = 0; b < off_b.size(); ++b) amps[static_cast<Eigen::Index>(off_a[a] + off_b[b])] = va * phi[b];
    }
    return MultipartiteState(out, std::move(amps));
}

MultipartiteState tensor_power(const MultipartiteState &psi, std::size_t n) {
    if (n == 0) throw std::invalid_argument("tensor_power: n must be positive");
    MultipartiteState acc = psi;
    for (std::size_t i = 1; i < n; ++i) acc = tensor_product(acc, psi);
    return acc;
}

MultipartiteState direct_sum(const MultipartiteState &psi, const MultipartiteState &phi) {
    require_same_parties(psi, phi, "direct_sum");
    const std::size_t k = psi.parties();
    Dims out(k);
    for (std::size_t p = 0; p < k; ++p) out[p] = psi.dims()[p] + phi.dims()[p];
    const auto stride = strides_of(out);
    std::vector<std::size_t> zero(k, 0), shift(k);
    for (std::size_t p = 0; p < k; ++p) shift[p] = psi.dims()[p] * stride[p];
    const auto off_a = affine_offsets(psi.dims(), stride, zero);
    const auto off_b = affine_offsets(phi.dims(), stride, shift);
    if (product(out) > kMaxExplicitDim) throw std::length_error("direct_sum: result exceeds explicit-state cap");
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(product(out)));
    for (std::size_t a = 0; a < off_a.size(); ++a) amps[static_cast<Eigen::Index>(off_a[a])] = psi[a];
    for (std::size_t b = 0; b < off_b.size(); ++b) amps[static_cast<Eigen::Index>(off_b[b])] = phi[b];
    return MultipartiteState(out, std::move(amps));
}

// ---------------------------------------------------------------------------
// Marginals and Schmidt decompositions

DensityMatrix marginal(const MultipartiteState &psi, const Bipartition &cut) {
    const Eigen::MatrixXcd m = bipartite_matrix(psi, cut);
    return DensityMatrix(m * m.adjoint());
}

std::vector<double> marginal_spectrum(const MultipartiteState &psi, const Bipartition &cut) {
    const Eigen::MatrixXcd m = bipartite_matrix(psi, cut);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto &sv = svd.singularValues();
    std::vector<double> out(static_cast<std::size_t>(sv.size()));
    for (Eigen::Index i = 0; i < sv.size(); ++i) out[static_cast<std::size_t>(i)] = sv[i] * sv[i];
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

SchmidtData schmidt(const MultipartiteState &psi, const Bipartition &cut) {
    require_unit(psi, "schmidt");
    const Eigen::MatrixXcd m = bipartite_matrix(psi, cut);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &sv = svd.singularValues();  // already descending
    std::vector<double> coeffs(static_cast<std::size_t>(sv.size()));
    for (Eigen::Index i = 0; i < sv.size(); ++i) coeffs[static_cast<std::size_t>(i)] = sv[i] * sv[i];
    return SchmidtData{Distribution(std::move(coeffs)), svd.matrixU(), svd.matrixV().conjugate()};
}

MultipartiteState SchmidtData::reconstruct(const Dims &dims, const Bipartition &cut) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(left.rows(), right.rows());
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        const auto c = static_cast<Eigen::Index>(i);
        m += std::sqrt(coefficients[i]) * left.col(c) * right.col(c).transpose();
    }
    return from_bipartite_matrix(m, dims, cut);
}

std::size_t schmidt_rank(const MultipartiteState &psi, const Bipartition &cut, double rel_tol) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(bipartite_matrix(psi, cut));
    const auto &sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    return static_cast<std::size_t>((sv.array() > rel_tol * sv[0]).count());
}

// ---------------------------------------------------------------------------
// Distances

double fidelity_sq(const MultipartiteState &psi, const MultipartiteState &phi) {
    if (psi.dims() != phi.dims()) throw std::invalid_argument("fidelity_sq: dimension mismatch");
    require_unit(psi, "fidelity_sq");
    require_unit(phi, "fidelity_sq");
    return std::min(1.0, std::norm(phi.amps().dot(psi.amps())));
}

double infidelity(const MultipartiteState &psi, const MultipartiteState &phi) {
    if (psi.dims() != phi.dims()) throw std::invalid_argument("infidelity: dimension mismatch");
    require_unit(psi, "infidelity");
    require_unit(phi, "infidelity");
    const cplx overlap = psi.amps().dot(phi.amps());
    const double orth = (phi.amps() - overlap * psi.amps()).squaredNorm();
    return std::clamp(orth, 0.0, 1.0);
}

double trace_distance_pure(const MultipartiteState &psi, const MultipartiteState &phi) {
    return std::sqrt(infidelity(psi, phi));
}

double trace_distance(const DensityMatrix &rho, const DensityMatrix &sigma) {
    if (rho.dim() != sigma.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho.matrix() - sigma.matrix(), Eigen::EigenvaluesOnly);
    return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

DensityMatrix projector(const MultipartiteState &psi) { return DensityMatrix(psi.amps() * psi.amps().adjoint()); }

MultipartiteState ghz(std::size_t parties, std::size_t levels) {
    if (parties == 0 || levels == 0) throw std::invalid_argument("ghz: parties and levels must be positive");
    MultipartiteState s = MultipartiteState::zero(Dims(parties, levels));
    std::size_t step = 0;
    for (std::size_t p = 0; p < parties; ++p) step = step * levels + 1;
    Eigen::VectorXcd amps = s.amps();
    const double a = 1.0 / std::sqrt(static_cast<double>(levels));
    for (std::size_t i = 0; i < levels; ++i) amps[static_cast<Eigen::Index>(i * step)] = a;
    return MultipartiteState(s.dims(), std::move(amps));
}

// ---------------------------------------------------------------------------
// Local operators

MultipartiteState apply_local(const MultipartiteState &psi, std::size_t party, const Eigen::MatrixXcd &op, Exec exec) {
    if (party >= psi.parties()) throw std::invalid_argument("apply_local: party out of range");
    const auto &dims = psi.dims();
    if (static_cast<std::size_t>(op.cols()) != dims[party])
        throw std::invalid_argument("apply_local: operator input dimension does not match party dimension");
    std::size_t left = 1, right = 1;
    for (std::size_t p = 0; p < party; ++p) left *= dims[p];
    for (std::size_t p = party + 1; p < dims.size(); ++p) right *= dims[p];
    const std::size_t in = dims[party];
    const auto out_d = static_cast<std::size_t>(op.rows());
    Dims out_dims = dims;
    out_dims[party] = out_d;
    if (product(out_dims) > kMaxExplicitDim) throw std::length_error("apply_local: result exceeds explicit-state cap");

    Eigen::VectorXcd out(static_cast<Eigen::Index>(left * out_d * right));
    const cplx *src = psi.amps().data();
    cplx *dst = out.data();
    // One (l, o) row of the output; identical arithmetic on both paths.
    auto row = [&](std::size_t lo) {
        const std::size_t l = lo / out_d, o = lo % out_d;
        cplx *d = dst + (l * out_d + o) * right;
        for (std::size_t r = 0; r < right; ++r) d[r] = 0.0;
        for (std::size_t m = 0; m < in; ++m) {
            const cplx w = op(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(m));
            if (w == cplx{}) continue;
            const cplx *s = src + (l * in + m) * right;
            for (std::size_t r = 0; r < right; ++r) d[r] += w * s[r];
        }
    };
    const auto rows = static_cast<std::int64_t>(left * out_d);
    if (exec == Exec::parallel && psi.total_dim() >= 4096) {
#pragma omp parallel for schedule(static)
        for (std::int64_t lo = 0; lo < rows; ++lo) row(static_cast<std::size_t>(lo));
    } else {
        for (std::int64_t lo = 0; lo < rows; ++lo) row(static_cast<std::size_t>(lo));
    }
    return MultipartiteState(std::move(out_dims), std::move(out));
}

MultipartiteState permute_parties(const MultipartiteState &psi, std::span<const std::size_t> perm) {
    const std::size_t k = psi.parties();
    if (perm.size() != k) throw std::invalid_argument("permute_parties: permutation has wrong length");
    std::vector<bool> seen(k, false);
    for (std::size_t p : perm) {
        if (p >= k || seen[p]) throw std::invalid_argument("permute_parties: not a permutation");
        seen[p] = true;
    }
    Dims out(k);
    for (std::size_t p = 0; p < k; ++p) out[p] = psi.dims()[perm[p]];
    const auto stride = strides_of(out);
    // digit of old party perm[p] lands at new position p
    std::vector<std::size_t> coef(k), zero(k, 0);
    for (std::size_t p = 0; p < k; ++p) coef[perm[p]] = stride[p];
    const auto off = affine_offsets(psi.dims(), coef, zero);
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(psi.total_dim()));
    for (std::size_t a = 0; a < off.size(); ++a) amps[static_cast<Eigen::Index>(off[a])] = psi[a];
    return MultipartiteState(out, std::move(amps));
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json &j, const MultipartiteState &psi) {
    std::vector<double> re(psi.total_dim()), im(psi.total_dim());
    for (std::size_t i = 0; i < psi.total_dim(); ++i) {
        re[i] = psi[i].real();
        im[i] = psi[i].imag();
    }
    j = nlohmann::json{{"dims", psi.dims()}, {"re", re}, {"im", im}};
}

MultipartiteState state_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("dims") || !j.contains("re"))
        throw std::invalid_argument("state JSON: expected object with dims and re");
    const auto dims = j.at("dims").get<Dims>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
    if (re.size() != im.size()) throw std::invalid_argument("state JSON: re and im lengths differ");
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(re.size()));
    for (std::size_t i = 0; i < re.size(); ++i) amps[static_cast<Eigen::Index>(i)] = cplx(re[i], im[i]);
    return MultipartiteState(dims, std::move(amps));
}

}  // namespace aep
