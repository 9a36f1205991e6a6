#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aep/entropy.hpp"
#include "aep/random.hpp"
#include "aep/smoothing.hpp"

using namespace aep;

namespace {

// Exhaustive: smallest subset of atoms carrying mass >= 1 - eps.
std::size_t brute_force_support(const Distribution &p, double eps) {
    const std::size_t m = p.size();
    std::size_t best = m;
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
        double mass = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            if (mask >> i & 1) mass += p[i];
        if (1.0 - mass <= eps * (1.0 + 1e-12)) best = std::min<std::size_t>(best, __builtin_popcountll(mask));
    }
    return best;
}

// Every string of P^{(x)n} listed explicitly, probabilities multiplied letter by letter.
std::vector<double> string_probabilities(const Distribution &p, std::size_t n) {
    std::vector<double> out{1.0};
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> next;
        next.reserve(out.size() * p.size());
        for (double q : out)
            for (double x : p) next.push_back(q * x);
        out = std::move(next);
    }
    return out;
}

// Smallest number of strings whose removed complement has mass <= eps,
// found by scanning all cut points of the sorted list.
std::size_t enumerated_kept(const Distribution &p, std::size_t n, double eps) {
    auto probs = string_probabilities(p, n);
    std::sort(probs.begin(), probs.end());
    long double removed = 0.0L;
    std::size_t dropped = 0;
    for (double q : probs) {
        if (dropped + 1 == probs.size()) break;
        if (removed + q > static_cast<long double>(eps) * (1.0L + 1e-12L)) break;
        removed += q;
        ++dropped;
    }
    return probs.size() - dropped;
}

__int128 ipow(__int128 b, std::size_t e) {
    __int128 r = 1;
    while (e--) r *= b;
    return r;
}

// Multinomial coefficient by repeated binomials from Pascal's rule.
__int128 multinomial(const std::vector<std::uint32_t> &t) {
    std::size_t total = 0;
    __int128 r = 1;
    for (auto c : t) {
        total += c;
        // C(total, c) by Pascal row
        std::vector<__int128> row(total + 1, 0);
        row[0] = 1;
        for (std::size_t i = 1; i <= total; ++i)
            for (std::size_t j = i; j > 0; --j) row[j] += row[j - 1];
        r *= row[c];
    }
    return r;
}

double binom_coeff(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

}  // namespace

TEST_CASE("smooth_support agrees with exhaustive subset search") {
    Rng rng(21);
    for (int t = 0; t < 300; ++t) {
        const auto p = random_distribution(rng.integer(1, 8), rng);
        const double eps = rng.uniform() * 0.9;
        CHECK(smooth_support(p, eps) == brute_force_support(p, eps));
    }
    CHECK(smooth_support(Distribution({0.7, 0.2, 0.1}), 0.15) == 2);
    CHECK(smooth_support(Distribution({0.7, 0.2, 0.1}), 0.0) == 3);
    CHECK(smooth_support(Distribution::uniform(4), 0.5) == 2);
    CHECK_THROWS(smooth_support(Distribution({0.7, 0.2}), 0.1));
    CHECK_THROWS(smooth_support(Distribution::uniform(2), 1.0));
}

TEST_CASE("type spectrum counts") {
    for (std::size_t m = 1; m <= 3; ++m) {
        for (std::size_t n = 1; n <= 30; ++n) {
            const auto p = Distribution::uniform(m);
            const auto spec = product_type_spectrum(p, n);
            CHECK(spec.entries.size() == static_cast<std::size_t>(binom_coeff(n + m - 1, m - 1)));
            __int128 total = 0;
            for (const auto &e : spec.entries) {
                const __int128 exact = multinomial(e.type);
                CHECK(e.multiplicity == static_cast<double>(exact));
                total += exact;
                CHECK(std::accumulate(e.type.begin(), e.type.end(), std::size_t{0}) == n);
            }
            CHECK(total == ipow(static_cast<__int128>(m), n));
            CHECK(spec.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("type spectrum order and support handling") {
    const auto spec = product_type_spectrum(Distribution({0.5, 0.0, 0.5}), 3);
    CHECK(spec.base.size() == 2);
    REQUIRE(spec.entries.size() == 4);
    CHECK(spec.entries.front().type == std::vector<std::uint32_t>{3, 0});
    CHECK(spec.entries.back().type == std::vector<std::uint32_t>{0, 3});
    CHECK_THROWS(product_type_spectrum(Distribution::uniform(7), 2));
    CHECK_THROWS(product_type_spectrum(Distribution::uniform(2), 0));
    CHECK_THROWS(product_type_spectrum(Distribution::uniform(2), kMaxTypeCopies + 1));
    CHECK_THROWS(product_type_spectrum(Distribution::uniform(6), 200));
}

TEST_CASE("type spectrum serial and parallel agree bitwise") {
    const Distribution p({0.4, 0.3, 0.2, 0.1});
    const auto a = product_type_spectrum(p, 40, Exec::serial);
    const auto b = product_type_spectrum(p, 40, Exec::parallel);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        CHECK(a.entries[i].type == b.entries[i].type);
        CHECK(a.entries[i].log2_probability == b.entries[i].log2_probability);
        CHECK(a.entries[i].log2_multiplicity == b.entries[i].log2_multiplicity);
    }
    const auto ta = truncate_product(p, 40, 0.05, Exec::serial);
    const auto tb = truncate_product(p, 40, 0.05, Exec::parallel);
    CHECK(ta.kept == tb.kept);
    CHECK(ta.removed_mass == tb.removed_mass);
}

TEST_CASE("type class probability lower bound") {
    // multinomial(n; t) prod P^t >= (n+1)^{-|X|} 2^{-n D(t/n || P)}
    Rng rng(22);
    std::size_t checked = 0;
    for (int trial = 0; trial < 8; ++trial) {
        for (std::size_t m = 1; m <= 3; ++m) {
            const auto p = random_distribution(m, rng);
            for (std::size_t n = 1; n <= 30; ++n) {
                const auto spec = product_type_spectrum(p, n);
                for (const auto &e : spec.entries) {
                    std::vector<double> freq;
                    for (auto c : e.type) freq.push_back(static_cast<double>(c) / static_cast<double>(n));
                    const double d = kl(Distribution(freq), p);
                    const double bound = std::pow(static_cast<double>(n + 1), -static_cast<double>(m)) *
                                         std::exp2(-static_cast<double>(n) * d);
                    const double mass = static_cast<double>(multinomial(e.type)) * e.probability;
                    CHECK((mass - bound) / bound >= -1e-12);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("regularized H0 matches string enumeration for n <= 10") {
    Rng rng(23);
    std::vector<Distribution> ps = {Distribution({0.75, 0.25}), Distribution({0.5, 0.5}), Distribution({0.9, 0.1})};
    for (int t = 0; t < 12; ++t) {
        const double x = rng.uniform();
        ps.push_back(Distribution({x, 1.0 - x}));
    }
    for (const auto &p : ps) {
        for (std::size_t n = 1; n <= 10; ++n) {
            for (double eps : {0.0, 0.01, 0.05, 0.1, 0.3}) {
                const auto tr = truncate_product(p, n, eps);
                CHECK(tr.kept == static_cast<double>(enumerated_kept(p, n, eps)));
                CHECK(tr.removed_mass <= eps * (1.0 + 1e-12) + 1e-15);
            }
        }
    }
    // Explicit cross-check of the smoothing example at n = 10.
    const Distribution p({0.75, 0.25});
    CHECK(regularized_smooth_h0(p, 0.01, 10) ==
          doctest::Approx(std::log2(static_cast<double>(enumerated_kept(p, 10, 0.01))) / 10.0).epsilon(1e-15));
}

TEST_CASE("regularized H0 trivial cases") {
    for (std::size_t n : {1, 5, 50, 200}) {
        CHECK(regularized_smooth_h0(Distribution::dirac(3, 1), 0.2, n) == 0.0);
    }
    for (std::size_t n : {1, 10}) CHECK(regularized_smooth_h0(Distribution::uniform(2), 0.0, n) == 1.0);
    CHECK(truncate_product(Distribution::uniform(2), 10, 0.0).kept == 1024.0);
}

TEST_CASE("regularized H0 approaches the Shannon entropy from above") {
    const Distribution p({0.75, 0.25});
    const double h = shannon(p);
    double prev_gap = kInfinity;
    for (std::size_t n : {10, 50, 100, 200}) {
        const double gap = regularized_smooth_h0(p, 0.01, n) - h;
        CHECK(gap < prev_gap);
        CHECK(gap > 0.0);
        prev_gap = gap;
    }
}

TEST_CASE("binomial concentration window") {
    // Oracle: pmf by the ratio recurrence from m = 0, summed in long double.
    auto window = [](std::size_t n, long double p, long double delta) {
        long double pmf = std::pow(1.0L - p, static_cast<long double>(n));
        const auto lo = static_cast<std::size_t>(std::floor(n * (p - delta)));
        const auto hi = static_cast<std::size_t>(std::floor(n * (p + delta)));
        long double total = 0.0L;
        for (std::size_t m = 0; m <= n; ++m) {
            if (m >= lo && m <= hi) total += pmf;
            pmf = pmf * static_cast<long double>(n - m) / static_cast<long double>(m + 1) * p / (1.0L - p);
        }
        return static_cast<double>(total);
    };
    const double mass = binomial_window_mass(500, 0.5, 0.1);
    CHECK(mass == doctest::Approx(window(500, 0.5L, 0.1L)).epsilon(1e-12));
    CHECK(mass > std::pow(1.0 - 0.01, 0.25));
    CHECK(binomial_window_mass(200, 0.3, 0.05) == doctest::Approx(window(200, 0.3L, 0.05L)).epsilon(1e-12));

    // Same window from the type spectrum at n = 200.
    const auto spec = product_type_spectrum(Distribution({0.5, 0.5}), 200);
    double by_types = 0.0;
    for (const auto &e : spec.entries)
        if (e.type[0] >= 80 && e.type[0] <= 120) by_types += e.mass();
    CHECK(by_types == doctest::Approx(binomial_window_mass(200, 0.5, 0.1)).epsilon(1e-12));
}

TEST_CASE("typical projector tail arithmetic") {
    const auto g = ghz(2, 2);
    auto r = typical_projector(g, 1, 0.3);
    REQUIRE(r.cuts.size() == 2);
    CHECK(r.cuts[0].rank == 2.0);
    CHECK(r.value == doctest::Approx(1.0));

    // Flat spectrum 2^-n per cut: exactly floor((eps/k) 2^n) atoms can go.
    const auto g3 = ghz(3, 2);
    for (std::size_t n : {1, 2, 4, 6, 10, 40}) {
        const double eps = 0.1;
        const auto res = typical_projector(g3, n, eps, AchieverMode::spectral);
        const double atoms = std::exp2(static_cast<double>(n));
        const double drop = std::floor(eps / 3.0 * atoms * (1.0 + 1e-12));
        for (const auto &c : res.cuts) CHECK(c.rank == atoms - drop);
    }

    const std::size_t idx[] = {0, 1, 0};
    const auto prod = MultipartiteState::basis({2, 2, 2}, idx);
    const auto pr = typical_projector(prod, 3, 0.1, AchieverMode::explicit_state);
    for (const auto &c : pr.cuts) CHECK(c.rank == 1.0);
    REQUIRE(pr.measured_fidelity);
    CHECK(*pr.measured_fidelity == doctest::Approx(1.0));
}

TEST_CASE("typical projector explicit achiever on random 3-qubit states") {
    Rng rng(24);
    for (int t = 0; t < 20; ++t) {
        const auto psi = random_state({2, 2, 2}, rng);
        const auto res = typical_projector(psi, 2, 0.1, AchieverMode::explicit_state);
        REQUIRE(res.achiever);
        REQUIRE(res.measured_fidelity);
        CHECK(res.certificate >= 0.9);
        CHECK(*res.measured_fidelity >= res.certificate - 1e-10);
        // Independent fidelity from the explicit tensor power.
        const auto power = tensor_power(psi, 2);
        CHECK(fidelity_sq(*res.achiever, power) == doctest::Approx(*res.measured_fidelity).epsilon(1e-12));
        for (const auto &c : res.cuts) {
            CHECK(static_cast<double>(schmidt_rank(*res.achiever, Bipartition::single(3, c.party))) <= c.rank);
            CHECK(c.tail <= 0.1 / 3.0 + 1e-15);
        }
    }
}

TEST_CASE("typical projector size limits") {
    Rng rng(25);
    const auto psi = random_state({4, 4, 4}, rng);
    CHECK_THROWS_AS(typical_projector(psi, 3, 0.1, AchieverMode::explicit_state), std::length_error);
    const auto spectral = typical_projector(psi, 3, 0.1, AchieverMode::automatic);
    CHECK_FALSE(spectral.achiever);
}

TEST_CASE("phi estimate: additivity rows and flat spectra") {
    Rng rng(26);
    const auto psi = random_state({2, 3, 2}, rng);
    const std::vector<double> theta{0.2, 0.5, 0.3};
    const auto shannon_measure = MeasureSpec::weighted_renyi(theta, 1.0);
    const std::size_t ns[] = {1, 2, 5};
    for (const auto &row : phi_estimate(shannon_measure, psi, 0.01, ns)) {
        CHECK(row.value == doctest::Approx(row.limit).epsilon(1e-12));
        CHECK(row.gap == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    }

    // Skewed spectra (0.9, 0.1) on every cut.
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(8);
    amps[0] = std::sqrt(0.9);
    amps[7] = std::sqrt(0.1);
    const MultipartiteState skew({2, 2, 2}, amps);
    const auto h0 = MeasureSpec::weighted_renyi(std::vector<double>(3, 1.0 / 3.0), 0.0);
    const std::size_t more[] = {1, 10, 50, 100, 200};
    const auto rows = phi_estimate(h0, skew, 0.05, more);
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].value == doctest::Approx(regularized_smooth_h0(Distribution({0.9, 0.1}), 0.05 / 3.0, rows[i].n)));
        CHECK(rows[i].limit == doctest::Approx(binary_h(0.1)));
        if (i > 0) CHECK(rows[i].value <= rows[i - 1].value);
    }
}

TEST_CASE("weak additivity transfer of the per-copy estimate") {
    // (1/(mn)) E^eps(psi^{(x)mn}) computed at mn copies of psi equals the
    // estimate at n copies of psi^{(x)m}.
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(4);
    amps[0] = std::sqrt(0.8);
    amps[3] = std::sqrt(0.2);
    const MultipartiteState psi({2, 2}, amps);
    const auto psi2 = tensor_power(psi, 2);
    const auto h0 = MeasureSpec::weighted_renyi(std::vector<double>{0.5, 0.5}, 0.0);
    const std::size_t n_single[] = {6, 20};
    const std::size_t n_double[] = {3, 10};
    const auto a = phi_estimate(h0, psi, 0.05, n_single);
    const auto b = phi_estimate(h0, psi2, 0.05, n_double);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(a[i].value - b[i].value / 2.0) <= 1e-9);
}

TEST_CASE("format_double") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(kInfinity) == "inf");
    CHECK(format_double(-kInfinity) == "-inf");
    CHECK(format_double(std::nan("")) == "nan");
}
