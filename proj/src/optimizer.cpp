// Upper bounds on the smoothed measure E^eps(psi) by descent over the
// fidelity cap { phi : |phi| = 1, |<phi|psi>|^2 >= 1 - eps }.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aep/entropy.hpp"
#include "aep/random.hpp"
#include "aep/smoothing.hpp"

namespace aep {

namespace {

constexpr double kEigenFloor = 1e-30;

struct Run {
    double value = kInfinity;
    std::optional<MultipartiteState> state;
    std::size_t iterations = 0;
    bool converged = true;
};

class CapProblem {
  public:
    CapProblem(const MeasureSpec &measure, const MultipartiteState &psi, double eps)
        : measure_(measure), psi_(psi), eps_(eps), radius_(eps * (1.0 - 1e-12)) {}

    [[nodiscard]] double value(const MultipartiteState &phi) const { return evaluate(measure_, phi); }

    /// Nearest point of the cap along the great circle through psi.
    [[nodiscard]] MultipartiteState project(const MultipartiteState &phi) const {
        const cplx c = psi_.amps().dot(phi.amps());
        const double ac = std::abs(c);
        const cplx phase = ac > 0.0 ? std::conj(c) / ac : cplx{1.0};
        Eigen::VectorXcd v = phi.amps() * phase;  // now <psi|v> = |c| >= 0
        if (ac * ac >= 1.0 - radius_) return MultipartiteState(phi.dims(), v);
        Eigen::VectorXcd w = v - ac * psi_.amps();
        const double wn = w.norm();
        if (!(wn > 0.0)) return psi_;
        Eigen::VectorXcd out = std::sqrt(1.0 - radius_) * psi_.amps() + std::sqrt(radius_) * (w / wn);
        return MultipartiteState(phi.dims(), out / out.norm());
    }

    /// Euclidean gradient of the measure at unit phi, projected onto the tangent space.
    [[nodiscard]] Eigen::VectorXcd gradient(const MultipartiteState &phi) const {
        Eigen::VectorXcd g = Eigen::VectorXcd::Zero(phi.amps().size());
        for (const auto &term : measure_.terms()) {
            if (term.weight == 0.0) continue;
            const Eigen::MatrixXcd m = bipartite_matrix(phi, term.cut);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m * m.adjoint());
            const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(kEigenFloor);
            Eigen::VectorXd d(lam.size());
            // H_0 has no useful derivative; its terms follow the Shannon gradient.
            const double alpha = term.alpha == 0.0 ? 1.0 : term.alpha;
            if (alpha == 1.0) {
                for (Eigen::Index i = 0; i < lam.size(); ++i) d[i] = -(std::log(lam[i]) + 1.0) / std::numbers::ln2;
            } else {
                double tr = 0.0;
                for (Eigen::Index i = 0; i < lam.size(); ++i) tr += std::pow(lam[i], alpha);
                const double c = alpha / ((1.0 - alpha) * std::numbers::ln2 * tr);
                for (Eigen::Index i = 0; i < lam.size(); ++i) d[i] = c * std::pow(lam[i], alpha - 1.0);
            }
            const Eigen::MatrixXcd gm = eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().adjoint();
            const Eigen::MatrixXcd dm = 2.0 * term.weight * gm * m;
            g += from_bipartite_matrix(dm, phi.dims(), term.cut).amps();
        }
        const cplx radial = phi.amps().dot(g);
        g -= radial.real() * phi.amps();
        return g;
    }

    [[nodiscard]] Run descend(MultipartiteState start, const OptConfig &cfg) const {
        Run run;
        MultipartiteState phi = project(start);
        double f = value(phi);
        double step = cfg.initial_step;
        run.converged = false;
        for (run.iterations = 0; run.iterations < cfg.max_iterations; ++run.iterations) {
            const Eigen::VectorXcd g = gradient(phi);
            const double gn = g.norm();
            if (!(gn > 0.0) || !std::isfinite(gn)) {
                run.converged = true;
                break;
            }
            bool accepted = false;
            while (step >= cfg.min_step) {
                Eigen::VectorXcd trial = phi.amps() - (step / gn) * g;
                const MultipartiteState cand = project(MultipartiteState(phi.dims(), trial / trial.norm()));
                const double fc = value(cand);
                if (fc < f) {
                    const double improvement = (f - fc) / std::max(std::abs(f), 1e-300);
                    phi = cand;
                    f = fc;
                    accepted = true;
                    if (improvement < cfg.relative_tolerance) run.converged = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) run.converged = true;
            if (run.converged) break;
        }
        run.value = f;
        run.state = std::move(phi);
        return run;
    }

    [[nodiscard]] MultipartiteState random_feasible(Rng &rng) const {
        Eigen::VectorXcd w(psi_.amps().size());
        for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = rng.complex_normal();
        w -= psi_.amps().dot(w) * psi_.amps();
        const double wn = w.norm();
        if (!(wn > 0.0)) return psi_;
        const double s = rng.uniform() * radius_;
        Eigen::VectorXcd v = std::sqrt(1.0 - s) * psi_.amps() + std::sqrt(s) * (w / wn);
        return MultipartiteState(psi_.dims(), v / v.norm());
    }

    [[nodiscard]] bool feasible(const MultipartiteState &phi) const {
        return phi.dims() == psi_.dims() && fidelity_sq(phi, psi_) >= 1.0 - eps_ - 1e-9;
    }

  private:
    const MeasureSpec &measure_;
    const MultipartiteState &psi_;
    double eps_;
    double radius_;
};

// Truncates the Schmidt decomposition across `cut` to the fewest terms whose
// dropped weight stays within eps.
MultipartiteState schmidt_truncation(const MultipartiteState &psi, const Bipartition &cut, double eps) {
    const SchmidtData sd = schmidt(psi, cut);
    const std::size_t keep = smooth_support(sd.coefficients.normalized(), eps);
    std::vector<double> kept(sd.coefficients.size(), 0.0);
    for (std::size_t i = 0; i < keep; ++i) kept[i] = sd.coefficients[i];
    SchmidtData truncated{Distribution(kept), sd.left, sd.right};
    return truncated.reconstruct(psi.dims(), cut).normalized();
}

}  // namespace

SmoothingResult smooth_infimum_estimate(const MeasureSpec &measure, const MultipartiteState &psi, double eps,
                                        const OptConfig &config, std::span<const MultipartiteState> seeds) {
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("smooth_infimum_estimate: eps must lie in [0,1)");
    if (!psi.is_unit(1e-10)) throw std::invalid_argument("smooth_infimum_estimate: expected a unit vector");
    if (psi.total_dim() > kMaxOptimizerDim)
        throw std::invalid_argument("smooth_infimum_estimate: total dimension exceeds 2^10");

    SmoothingResult res;
    res.epsilon = eps;
    res.n = 1;
    res.unsmoothed_value = evaluate(measure, psi);
    res.value = res.unsmoothed_value;
    res.achiever = psi;
    res.certificate = 1.0;
    if (eps == 0.0) return res;

    const CapProblem problem(measure, psi, eps);
    std::vector<MultipartiteState> starts{psi};
    for (std::size_t j = 0; j < psi.parties(); ++j) starts.push_back(schmidt_truncation(psi, Bipartition::single(psi.parties(), j), eps));
    for (const auto &t : measure.terms()) starts.push_back(schmidt_truncation(psi, t.cut, eps));
    if (psi.parties() >= 2) {
        const SmoothingResult tp = typical_projector(psi, 1, eps);
        if (tp.achiever) starts.push_back(*tp.achiever);
    }
    for (const auto &s : seeds)
        if (problem.feasible(s)) starts.push_back(s);
    const std::size_t fixed = starts.size();

    auto run_one = [&](std::size_t i) -> Run {
        if (i < fixed) {
            // fixed starts are evaluated as-is and also used as descent seeds
            Run direct;
            direct.value = problem.value(starts[i]);
            direct.state = starts[i];
            Run desc = problem.descend(starts[i], config);
            return desc.value < direct.value ? desc : direct;
        }
        Rng rng(derive_seed(config.seed, i - fixed));
        return problem.descend(problem.random_feasible(rng), config);
    };
    const std::vector<Run> runs = map_indexed<Run>(fixed + config.restarts, run_one, config.exec);

    for (const auto &run : runs) {
        res.iterations += run.iterations;
        if (run.state && run.value < res.value && problem.feasible(*run.state)) {
            res.value = run.value;
            res.achiever = run.state;
            res.converged = run.converged;
        }
    }
    res.certificate = fidelity_sq(*res.achiever, psi);
    res.measured_fidelity = res.certificate;
    return res;
}

std::vector<SmoothingResult> smooth_infimum_profile(const MeasureSpec &measure, const MultipartiteState &psi,
                                                    std::span<const double> eps_list, const OptConfig &config) {
    std::vector<std::size_t> order(eps_list.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps_list[a] < eps_list[b]; });
    std::vector<SmoothingResult> out(eps_list.size());
    std::vector<MultipartiteState> carried;
    for (std::size_t i : order) {
        out[i] = smooth_infimum_estimate(measure, psi, eps_list[i], config, carried);
        if (out[i].achiever) carried.push_back(*out[i].achiever);
    }
    return out;
}

}  // namespace aep
