#include "aep/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aep {

namespace {

void require_normalized(const Distribution &p, const char *what) {
    if (p.size() == 0 || !p.is_normalized())
        throw std::invalid_argument(std::string(what) + ": distribution is not normalized");
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

void require_probability(double p, const char *what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + ": probability outside [0,1]");
}

}  // namespace

double shannon(const Distribution &p) {
    require_normalized(p, "shannon");
    double h = 0.0;
    for (double w : p) h -= xlog2x(w);
    return std::max(h, 0.0);
}

double renyi(const Distribution &p, double alpha) {
    if (std::isnan(alpha) || alpha < 0.0) throw std::invalid_argument("renyi: alpha must be >= 0");
    require_normalized(p, "renyi");
    if (alpha == 0.0) return std::log2(static_cast<double>(p.support_size()));
    if (alpha == 1.0) return shannon(p);
    if (std::isinf(alpha)) return -std::log2(*std::max_element(p.begin(), p.end()));
    double s = 0.0;
    for (double w : p)
        if (w > 0.0) s += std::pow(w, alpha);
    return std::max(std::log2(s) / (1.0 - alpha), 0.0);
}

double kl(const Distribution &p, const Distribution &q) {
    if (p.size() != q.size()) throw std::invalid_argument("kl: length mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return kInfinity;
        d += p[i] * std::log2(p[i] / q[i]);
    }
    return d;
}

double tv(const Distribution &p, const Distribution &q) {
    if (p.size() != q.size()) throw std::invalid_argument("tv: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return 0.5 * s;
}

double binary_h(double p) {
    require_probability(p, "binary_h");
    return -xlog2x(p) - xlog2x(1.0 - p);
}

double binary_d(double p, double q) {
    require_probability(p, "binary_d");
    require_probability(q, "binary_d");
    return kl(Distribution({p, 1.0 - p}), Distribution({q, 1.0 - q}));
}

// ---------------------------------------------------------------------------

namespace {

struct GridBest {
    double value = -kInfinity;
    std::vector<std::size_t> counts;
    std::size_t points = 0;
};

// Objective H(Q) - a D(Q||P) for Q = counts / total, in bits.
double variational_objective(const std::vector<std::size_t> &counts, double total, const std::vector<double> &log_p,
                             double a) {
    double f = 0.0;
    for (std::size_t x = 0; x < counts.size(); ++x) {
        if (counts[x] == 0) continue;
        const double q = static_cast<double>(counts[x]) / total;
        const double lq = std::log2(q);
        f += -q * lq - a * q * (lq - log_p[x]);
    }
    return f;
}

// Enumerates compositions of `remaining` into counts[from..m-1] in
// lexicographically descending order, keeping the first strict maximum.
void enumerate_tail(std::vector<std::size_t> &counts, std::size_t from, std::size_t remaining, double total,
                    const std::vector<double> &log_p, double a, GridBest &best) {
    const std::size_t m = counts.size();
    if (from + 1 == m) {
        counts[from] = remaining;
        ++best.points;
        const double f = variational_objective(counts, total, log_p, a);
        if (f > best.value) {
            best.value = f;
            best.counts = counts;
        }
        return;
    }
    for (std::size_t c = remaining + 1; c-- > 0;) {
        counts[from] = c;
        enumerate_tail(counts, from + 1, remaining - c, total, log_p, a, best);
    }
}

double binomial(std::size_t n, std::size_t r) {
    double c = 1.0;
    for (std::size_t i = 1; i <= r; ++i) c = c * static_cast<double>(n - r + i) / static_cast<double>(i);
    return c;
}

}  // namespace

VariationalCheck variational_renyi_check(const Distribution &p, double alpha, double grid_resolution, Exec exec) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("variational_renyi_check: alpha must be in (0,1)");
    if (!(grid_resolution > 0.0 && grid_resolution <= 1.0))
        throw std::invalid_argument("variational_renyi_check: grid resolution must be in (0,1]");
    require_normalized(p, "variational_renyi_check");
    const Distribution support = p.support_only();
    const std::size_t m = support.size();
    if (m > kVariationalMaxSupport)
        throw std::invalid_argument("variational_renyi_check: support too large for grid search");

    VariationalCheck out;
    out.lhs = renyi(p, alpha);
    out.tolerance = 10.0 * grid_resolution;

    const auto steps = static_cast<std::size_t>(std::llround(1.0 / grid_resolution));
    if (binomial(steps + m - 1, m - 1) > static_cast<double>(kVariationalMaxGridPoints))
        throw std::invalid_argument("variational_renyi_check: grid too fine for this support size");

    std::vector<double> log_p(m);
    for (std::size_t x = 0; x < m; ++x) log_p[x] = std::log2(support[x]);
    const double a = alpha / (1.0 - alpha);
    const double total = static_cast<double>(steps);

    GridBest best;
    if (m == 1) {
        best.counts = {steps};
        best.value = variational_objective(best.counts, total, log_p, a);
        best.points = 1;
    } else {
        // Slice on the first coordinate; slices are folded in order so the
        // parallel reduction matches the serial one exactly.
        auto slice = [&](std::size_t i) {
            const std::size_t c0 = steps - i;
            GridBest local;
            std::vector<std::size_t> counts(m, 0);
            counts[0] = c0;
            enumerate_tail(counts, 1, steps - c0, total, log_p, a, local);
            return local;
        };
        std::vector<GridBest> parts;
        if (exec == Exec::serial) {
            parts.reserve(steps + 1);
            for (std::size_t i = 0; i <= steps; ++i) parts.push_back(slice(i));
        } else {
            parts = map_indexed<GridBest>(steps + 1, slice, Exec::parallel);
        }
        for (const auto &part : parts) {
            best.points += part.points;
            if (part.value > best.value) {
                best.value = part.value;
                best.counts = part.counts;
            }
        }
    }

    // Map the maximizer back onto the full alphabet of P.
    std::vector<double> q(p.size(), 0.0);
    for (std::size_t x = 0, s = 0; x < p.size(); ++x)
        if (p[x] > Distribution::kSupportThreshold) q[x] = static_cast<double>(best.counts[s++]) / total;
    out.maximizer = Distribution(std::move(q));
    out.rhs = best.value;
    out.gap = out.lhs - out.rhs;
    out.grid_points = best.points;
    return out;
}

double marginal_entropy(const MultipartiteState &psi, const Bipartition &cut, double alpha) {
    const double n2 = psi.norm_sq();
    if (!(n2 > 0.0)) throw std::invalid_argument("marginal_entropy: zero vector");
    std::vector<double> spec = marginal_spectrum(psi, cut);
    double s = 0.0;
    for (double &x : spec) s += (x /= n2);
    // renormalize away the last ulp of rounding
    for (double &x : spec) x /= s;
    return renyi(Distribution(std::move(spec)), alpha);
}

}  // namespace aep
