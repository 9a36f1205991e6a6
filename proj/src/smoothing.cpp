#include "aep/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <locale>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "aep/entropy.hpp"

namespace aep {

namespace {

constexpr double kBudgetSlack = 1e-12;  // relative slack on "mass <= budget"

double binomial_count(std::size_t n, std::size_t r) {
    double c = 1.0;
    for (std::size_t i = 1; i <= r; ++i) c = c * static_cast<double>(n - r + i) / static_cast<double>(i);
    return c;
}

struct ProbClass {
    double log2_probability;
    double count;
};

double class_mass(const ProbClass &c) { return std::exp2(std::log2(c.count) + c.log2_probability); }

// Classes sorted by descending probability. Removes whole classes from the
// bottom while the removed mass fits the budget, then as many strings of the
// boundary class as still fit.
Truncation truncate_sorted(const std::vector<ProbClass> &classes, double eps) {
    Truncation t;
    for (const auto &c : classes) t.full_support += c.count;
    const double budget = eps * (1.0 + kBudgetSlack);
    std::size_t boundary = classes.size();
    double partial_removed = 0.0;
    while (boundary > 0) {
        const ProbClass &c = classes[boundary - 1];
        const double m = class_mass(c);
        if (t.removed_mass + m <= budget) {
            t.removed_mass += m;
            --boundary;
            continue;
        }
        const double p = std::exp2(c.log2_probability);
        double r = p > 0.0 ? std::floor((budget - t.removed_mass) / p) : 0.0;
        r = std::clamp(r, 0.0, c.count - 1.0);
        partial_removed = r;
        t.removed_mass += r * p;
        break;
    }
    if (boundary == 0) {
        // The whole spectrum fit the budget (eps within rounding of 1): keep one string.
        t.kept = 1.0;
        t.removed_mass -= std::exp2(classes.front().log2_probability);
    } else {
        double kept = 0.0;
        for (std::size_t i = 0; i + 1 < boundary; ++i) kept += classes[i].count;
        kept += classes[boundary - 1].count - partial_removed;
        t.kept = kept;
    }
    t.log2_kept = std::log2(t.kept);
    return t;
}

void require_eps(double eps, const char *what) {
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument(std::string(what) + ": eps must lie in [0,1)");
}

void require_normalized(const Distribution &p, const char *what) {
    if (p.size() == 0 || !p.is_normalized()) throw std::invalid_argument(std::string(what) + ": distribution is not normalized");
}

void enumerate_types(std::vector<std::uint32_t> &type, std::size_t from, std::uint32_t remaining,
                     const std::vector<double> &log_p, std::size_t n, std::vector<TypeClassEntry> &out) {
    const std::size_t m = type.size();
    if (from + 1 == m) {
        type[from] = remaining;
        TypeClassEntry e;
        e.type = type;
        double lp = 0.0, mult = 1.0;
        std::size_t partial = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (type[i] > 0) lp += static_cast<double>(type[i]) * log_p[i];
            partial += type[i];
            mult *= binomial_count(partial, type[i]);
        }
        (void)n;
        e.log2_probability = lp;
        e.probability = std::exp2(lp);
        e.multiplicity = mult;
        e.log2_multiplicity = std::log2(mult);
        out.push_back(std::move(e));
        return;
    }
    for (std::uint32_t c = remaining + 1; c-- > 0;) {
        type[from] = c;
        enumerate_types(type, from + 1, remaining - c, log_p, n, out);
    }
}

}  // namespace

double TypeClassEntry::mass() const { return std::exp2(log2_multiplicity + log2_probability); }

double TypeClassSpectrum::total_mass() const {
    double s = 0.0;
    for (const auto &e : entries) s += e.mass();
    return s;
}

double TypeClassSpectrum::total_multiplicity() const {
    double s = 0.0;
    for (const auto &e : entries) s += e.multiplicity;
    return s;
}

TypeClassSpectrum product_type_spectrum(const Distribution &p, std::size_t n, Exec exec) {
    require_normalized(p, "product_type_spectrum");
    if (n == 0 || n > kMaxTypeCopies) throw std::invalid_argument("product_type_spectrum: n outside [1, 200]");
    TypeClassSpectrum spec;
    spec.base = p.support_only();
    spec.n = n;
    const std::size_t m = spec.base.size();
    if (m > kMaxTypeSupport) throw std::invalid_argument("product_type_spectrum: support larger than 6");
    if (binomial_count(n + m - 1, m - 1) > static_cast<double>(kMaxTypeEntries))
        throw std::invalid_argument("product_type_spectrum: too many type classes");

    std::vector<double> log_p(m);
    for (std::size_t i = 0; i < m; ++i) log_p[i] = std::log2(spec.base[i]);

    // Slice s holds the types with first count n - s; slices are concatenated
    // in order, so both paths produce the same canonical sequence.
    auto slice = [&](std::size_t s) {
        std::vector<TypeClassEntry> part;
        std::vector<std::uint32_t> type(m, 0);
        const auto first = static_cast<std::uint32_t>(n - s);
        if (m == 1) {
            if (s == 0) enumerate_types(type, 0, static_cast<std::uint32_t>(n), log_p, n, part);
            return part;
        }
        type[0] = first;
        enumerate_types(type, 1, static_cast<std::uint32_t>(s), log_p, n, part);
        return part;
    };
    const std::size_t slices = m == 1 ? 1 : n + 1;
    std::vector<std::vector<TypeClassEntry>> parts;
    if (exec == Exec::serial) {
        for (std::size_t s = 0; s < slices; ++s) parts.push_back(slice(s));
    } else {
        parts = map_indexed<std::vector<TypeClassEntry>>(slices, slice, Exec::parallel);
    }
    for (auto &part : parts)
        spec.entries.insert(spec.entries.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    return spec;
}

std::size_t smooth_support(const Distribution &p, double eps) {
    require_eps(eps, "smooth_support");
    require_normalized(p, "smooth_support");
    const Distribution s = p.support_only().sorted_descending();
    std::vector<ProbClass> classes;
    for (double w : s) classes.push_back(ProbClass{std::log2(w), 1.0});
    return static_cast<std::size_t>(truncate_sorted(classes, eps).kept);
}

Truncation truncate_product(const Distribution &p, std::size_t n, double eps, Exec exec) {
    require_eps(eps, "truncate_product");
    const TypeClassSpectrum spec = product_type_spectrum(p, n, exec);
    std::vector<std::size_t> order(spec.entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return spec.entries[a].log2_probability > spec.entries[b].log2_probability;
    });
    std::vector<ProbClass> classes;
    classes.reserve(order.size());
    for (std::size_t i : order) classes.push_back(ProbClass{spec.entries[i].log2_probability, spec.entries[i].multiplicity});
    return truncate_sorted(classes, eps);
}

double regularized_smooth_h0(const Distribution &p, double eps, std::size_t n, Exec exec) {
    return truncate_product(p, n, eps, exec).log2_kept / static_cast<double>(n);
}

double binomial_window_mass(std::size_t n, double p, double delta) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial_window_mass: p outside [0,1]");
    if (!(delta >= 0.0)) throw std::invalid_argument("binomial_window_mass: delta must be nonnegative");
    const double nd = static_cast<double>(n);
    const double lo = std::max(0.0, std::floor(nd * (p - delta)));
    const double hi = std::min(nd, std::floor(nd * (p + delta)));
    double total = 0.0;
    for (double m = lo; m <= hi; m += 1.0) {
        double log_term = std::lgamma(nd + 1.0) - std::lgamma(m + 1.0) - std::lgamma(nd - m + 1.0);
        if (m > 0.0) log_term += m * std::log(p);
        if (nd - m > 0.0) log_term += (nd - m) * std::log1p(-p);
        total += std::exp(log_term);
    }
    return std::min(total, 1.0);
}

// ---------------------------------------------------------------------------

SmoothingResult typical_projector(const MultipartiteState &psi, std::size_t n, double eps, AchieverMode mode,
                                  std::span<const double> theta) {
    require_eps(eps, "typical_projector");
    if (!psi.is_unit(1e-10)) throw std::invalid_argument("typical_projector: expected a unit vector");
    const std::size_t k = psi.parties();
    if (k < 2) throw std::invalid_argument("typical_projector: at least two parties required");
    if (n == 0) throw std::invalid_argument("typical_projector: n must be positive");
    std::vector<double> weights(theta.begin(), theta.end());
    if (weights.empty()) weights.assign(k, 1.0 / static_cast<double>(k));
    if (weights.size() != k) throw std::invalid_argument("typical_projector: theta has wrong length");

    SmoothingResult res;
    res.epsilon = eps;
    res.n = n;
    double total_tail = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const Distribution lambda = Distribution(marginal_spectrum(psi, Bipartition::single(k, j))).support_only().normalized();
        const Truncation t = truncate_product(lambda, n, eps / static_cast<double>(k));
        CutRank cut;
        cut.party = j;
        cut.rank = t.kept;
        cut.log2_rank = t.log2_kept;
        cut.tail = t.removed_mass;
        cut.full_rank = t.full_support;
        res.value += weights[j] * cut.log2_rank;
        res.unsmoothed_value += weights[j] * static_cast<double>(n) * std::log2(static_cast<double>(lambda.size()));
        total_tail += t.removed_mass;
        res.cuts.push_back(cut);
    }
    res.certificate = 1.0 - total_tail;

    const double explicit_dim = std::pow(static_cast<double>(psi.total_dim()), static_cast<double>(n));
    const bool fits = explicit_dim <= static_cast<double>(kMaxExplicitDim);
    if (mode == AchieverMode::explicit_state && !fits)
        throw std::length_error("typical_projector: explicit achiever exceeds the explicit-state cap");
    if (mode == AchieverMode::spectral || !fits) return res;

    const MultipartiteState power = tensor_power(psi, n);
    MultipartiteState projected = power;
    for (std::size_t j = 0; j < k; ++j) {
        const DensityMatrix rho = marginal(power, Bipartition::single(k, j));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho.matrix());  // ascending
        const auto keep = static_cast<Eigen::Index>(res.cuts[j].rank);
        const Eigen::MatrixXcd top = eig.eigenvectors().rightCols(keep);
        projected = apply_local(projected, j, top * top.adjoint());
    }
    res.achiever = projected.normalized();
    res.measured_fidelity = fidelity_sq(*res.achiever, power);
    return res;
}

// ---------------------------------------------------------------------------

std::vector<PhiRow> phi_estimate(const MeasureSpec &measure, const MultipartiteState &psi, double eps,
                                 std::span<const std::size_t> n_list, const PhiOptions &options) {
    require_eps(eps, "phi_estimate");
    if (!psi.is_unit(1e-10)) throw std::invalid_argument("phi_estimate: expected a unit vector");
    const double limit = shannon_limit(measure, psi);
    const double single = evaluate(measure, psi);
    std::vector<PhiRow> rows;
    for (std::size_t n : n_list) {
        if (n == 0) throw std::invalid_argument("phi_estimate: n must be positive");
        const double dn = static_cast<double>(n);
        PhiRow row;
        row.n = n;
        row.epsilon = eps;
        row.limit = limit;
        // E^eps(psi^n) <= E(psi^n) = n E(psi) by additivity of marginal Renyi entropies
        row.value = single;
        row.source = "additivity";
        if (measure.kind() == MeasureKind::weighted_marginal_renyi) {
            const std::vector<double> theta = measure.single_party_weights();
            const SmoothingResult tp = typical_projector(psi, n, eps, AchieverMode::spectral, theta);
            for (const auto &c : tp.cuts) row.log2_ranks.push_back(c.log2_rank / dn);
            if (tp.value / dn < row.value) {
                row.value = tp.value / dn;
                row.source = "typical_projector";
                row.certificate = tp.certificate;
            }
        }
        const double dim_n = std::pow(static_cast<double>(psi.total_dim()), dn);
        if (options.use_optimizer && dim_n <= static_cast<double>(kMaxOptimizerDim)) {
            const SmoothingResult opt = smooth_infimum_estimate(measure, tensor_power(psi, n), eps, options.optimizer);
            if (opt.value / dn < row.value) {
                row.value = opt.value / dn;
                row.source = "optimizer";
                row.certificate = opt.certificate;
            }
        }
        row.gap = row.value - limit;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace aep
