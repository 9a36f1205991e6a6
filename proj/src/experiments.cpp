#include "aep/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "aep/entropy.hpp"
#include "aep/locc.hpp"
#include "aep/random.hpp"
#include "aep/smoothing.hpp"

namespace aep {

using nlohmann::json;

json to_json(const PropertyResult &r) {
    json j;
    j["property"] = r.property;
    j["statement"] = r.statement;
    j["samples"] = r.stats.samples;
    j["worst_slack"] = r.stats.worst;
    j["worst_index"] = r.stats.worst_index;
    j["tolerance"] = r.tolerance;
    j["violations"] = r.stats.violations;
    j["pass"] = r.passed();
    return j;
}

namespace {

double log_uniform(Rng &rng, double lo, double hi) {
    return lo * std::pow(hi / lo, rng.uniform());
}

// The sample's measure: the fixed one, or E^theta with random theta.
MeasureSpec sample_measure(const SweepSettings &s, std::size_t parties, Rng &rng) {
    if (s.measure) return *s.measure;
    const Distribution theta = random_distribution(parties, rng);
    return MeasureSpec::weighted_renyi(theta.weights(), 1.0);
}

std::size_t sample_parties(const SweepSettings &s) {
    return s.measure ? s.measure->parties() : s.parties;
}

PropertyResult make_result(std::string property, std::string statement, double tolerance) {
    PropertyResult r;
    r.property = std::move(property);
    r.statement = std::move(statement);
    r.tolerance = tolerance;
    return r;
}

}  // namespace

PropertyResult sweep_ghz_normalization(const SweepSettings &s) {
    auto r = make_result("ghz_normalization", "E(GHZ_2) = 1", 1e-10);
    r.stats = sweep_min(
        s.samples, r.tolerance,
        [&](std::size_t i) {
            Rng rng(derive_seed(s.seed, i));
            const std::size_t k = s.measure ? s.measure->parties() : 2 + i % 3;
            const MeasureSpec m = sample_measure(s, k, rng);
            return -std::abs(evaluate(m, ghz(k, 2)) - 1.0);
        },
        s.exec);
    return r;
}

PropertyResult sweep_full_additivity(const SweepSettings &s) {
    auto r = make_result("full_additivity", "E(psi (x) phi) = E(psi) + E(phi)", 1e-9);
    r.stats = sweep_min(
        s.samples, r.tolerance,
        [&](std::size_t i) {
            Rng rng(derive_seed(s.seed, i));
            const std::size_t k = sample_parties(s);
            const MeasureSpec m = sample_measure(s, k, rng);
            const auto psi = random_state(random_dims(k, s.min_dim, s.max_dim, rng), rng);
            const auto phi = random_state(random_dims(k, s.min_dim, s.max_dim, rng), rng);
            return -check_additivity(m, psi, phi);
        },
        s.exec);
    return r;
}

PropertyResult sweep_direct_sum_identity(const SweepSettings &s) {
    auto r = make_result("direct_sum_identity",
                         "E(sqrt(p) phi (+) sqrt(1-p) psi) = p E(phi) + (1-p) E(psi) + h(p)", 1e-9);
    r.stats = sweep_min(
        s.samples, r.tolerance,
        [&](std::size_t i) {
            Rng rng(derive_seed(s.seed, i));
            const std::size_t k = sample_parties(s);
            const MeasureSpec m = sample_measure(s, k, rng);
            const auto psi = random_state(random_dims(k, s.min_dim, s.max_dim, rng), rng);
            const auto phi = random_state(random_dims(k, s.min_dim, s.max_dim, rng), rng);
            const double p = rng.uniform();
            return -check_direct_sum_identity(m, psi, phi, p);
        },
        s.exec);
    return r;
}

PropertyResult sweep_log_boundedness(const SweepSettings &s) {
    auto r = make_result("log_boundedness", "E((+)_i psi_i) <= max_i E(psi_i) + log2 l", 1e-9);
    r.stats = sweep_min(
        s.samples, r.tolerance,
        [&](std::size_t i) {
            Rng rng(derive_seed(s.seed, i));
            const std::size_t k = sample_parties(s);
            const MeasureSpec m = sample_measure(s, k, rng);
            const std::size_t l = rng.integer(1, 4);
            const Distribution w = random_distribution(l, rng);
            std::vector<MultipartiteState> parts;
            for (std::size_t t = 0; t < l; ++t) {
                const auto v = random_state(random_dims(k, s.min_dim, s.max_dim, rng), rng);
                parts.push_back(v.scaled(std::sqrt(w[t])));
            }
            return check_log_boundedness(m, parts);
        },
        s.exec);
    return r;
}

PropertyResult sweep_continuity_bound(const SweepSettings &s) {
    auto r = make_result("continuity_bound", "|E(phi) - E(psi)| <= a(delta) log2 dim + b(delta)", 1e-12);
    r.stats = sweep_min(
        s.samples, r.tolerance,
        [&](std::size_t i) {
            Rng rng(derive_seed(s.seed, i));
            const std::size_t k = sample_parties(s);
            const MeasureSpec m = sample_measure(s, k, rng);
            const auto psi = random_state(random_dims(k, s.min_dim, s.max_dim, rng), rng);
            const auto phi = (i % 4 == 3) ? random_state(psi.dims(), rng)
                                          : perturb(psi, log_uniform(rng, 1e-5, 2.0), rng);
            return continuity_slack(m, psi, phi);
        },
        s.exec);
    return r;
}

namespace {

struct LoccSample {
    MeasureSpec measure;
    MultipartiteState psi;
    Protocol protocol;
};

LoccSample draw_locc(const LoccSettings &s, std::size_t i) {
    Rng rng(derive_seed(s.base.seed, i));
    const std::size_t k = sample_parties(s.base);
    MeasureSpec m = sample_measure(s.base, k, rng);
    auto psi = random_state(random_dims(k, s.base.min_dim, s.base.max_dim, rng), rng);
    const std::size_t steps = rng.integer(1, s.max_steps);
    const std::uint64_t pseed = derive_seed(rng.integer(0, std::size_t{1} << 62), i);
    Protocol protocol = random_protocol(psi.dims(), steps, s.max_branches, s.base.max_dim, pseed);
    return {std::move(m), std::move(psi), std::move(protocol)};
}

}  // namespace

PropertyResult sweep_monotone_on_average(const LoccSettings &s) {
    auto r = make_result("monotone_on_average", "E(psi) >= sum_x P(x) E(psi_x)", 1e-9);
    r.stats = sweep_min(
        s.base.samples, r.tolerance,
        [&](std::size_t i) {
            const auto smp = draw_locc(s, i);
            return monotone_avg_check(smp.measure, smp.psi, smp.protocol).slack;
        },
        s.base.exec);
    return r;
}

PropertyResult sweep_weak_monotonicity(const LoccSettings &s) {
    auto r = make_result("weak_monotonicity", "E(psi) >= P(x) E(psi_x) for every x", 1e-9);
    r.stats = sweep_min(
        s.base.samples, r.tolerance,
        [&](std::size_t i) {
            const auto smp = draw_locc(s, i);
            return monotone_avg_check(smp.measure, smp.psi, smp.protocol).weakest_branch_slack;
        },
        s.base.exec);
    return r;
}

PropertyResult sweep_weight_conservation(const LoccSettings &s) {
    auto r = make_result("weight_conservation", "sum_x P(x) = 1 for trace-preserving protocols", 1e-10);
    r.stats = sweep_min(
        s.base.samples, r.tolerance,
        [&](std::size_t i) {
            const auto smp = draw_locc(s, i);
            return -std::abs(compose_and_discard(smp.protocol, smp.psi).total_weight() - 1.0);
        },
        s.base.exec);
    return r;
}

namespace {

struct EnsemblePair {
    ConditionallyPureState rho;
    ConditionallyPureState sigma;
};

EnsemblePair draw_ensembles(const SweepSettings &s, std::size_t i) {
    Rng rng(derive_seed(s.seed, i));
    const std::size_t k = sample_parties(s);
    const Dims dims = random_dims(k, s.min_dim, s.max_dim, rng);
    const std::size_t labels = rng.integer(1, 4);
    const Distribution p = random_distribution(labels, rng);
    Distribution q = p;
    switch (rng.integer(0, 2)) {
        case 0: break;
        case 1: q = random_distribution(labels, rng); break;
        default: {
            std::vector<double> w(p.weights().begin(), p.weights().end());
            for (auto &x : w) x *= 1.0 + 0.2 * (rng.uniform() - 0.5);
            double total = 0.0;
            for (double x : w) total += x;
            for (auto &x : w) x /= total;
            q = Distribution(w);
        }
    }
    // Occasionally a label carries weight on one side only.
    const std::size_t dropped = (labels > 1 && rng.uniform() < 0.25) ? rng.integer(0, labels - 1) : labels;
    std::vector<Branch> a, b;
    double b_total = 0.0;
    for (std::size_t x = 0; x < labels; ++x) {
        if (x != dropped) b_total += q[x];
    }
    for (std::size_t x = 0; x < labels; ++x) {
        auto psi = random_state(dims, rng);
        MultipartiteState phi = psi;
        switch (rng.integer(0, 2)) {
            case 0: break;
            case 1: phi = perturb(psi, log_uniform(rng, 1e-4, 1.0), rng); break;
            default: phi = random_state(dims, rng);
        }
        a.push_back({p[x], x, std::move(psi)});
        if (x != dropped) b.push_back({q[x] / b_total, x, std::move(phi)});
    }
    return {ConditionallyPureState(std::move(a)), ConditionallyPureState(std::move(b))};
}

}  // namespace

PropertyResult sweep_cond_pure_tv(const SweepSettings &s) {
    auto r = make_result("cond_pure_tv_bound", "TV(P, Q) <= T(rho, sigma)", 1e-12);
    r.stats = sweep_min(
        s.samples, r.tolerance,
        [&](std::size_t i) {
            const auto e = draw_ensembles(s, i);
            const auto d = check_cond_pure_distance(e.rho, e.sigma);
            return d.trace_distance - d.tv;
        },
        s.exec);
    return r;
}

PropertyResult sweep_cond_pure_branch(const SweepSettings &s) {
    auto r = make_result("cond_pure_branch_bound", "sum_x P(x) T(psi_x, phi_x) <= 2 T(rho, sigma)", 1e-12);
    r.stats = sweep_min(
        s.samples, r.tolerance,
        [&](std::size_t i) {
            const auto e = draw_ensembles(s, i);
            const auto d = check_cond_pure_distance(e.rho, e.sigma);
            return 2.0 * d.trace_distance - d.avg_branch;
        },
        s.exec);
    return r;
}

PropertyResult sweep_outcome_mass(const LoccSettings &s, double eps_prime) {
    auto r = make_result("outcome_mass_bound",
                         "Q{x : |<phi_x|psi_x>|^2 >= 1 - eps'} >= 1 - 2 sqrt(eps) (1 + 1/sqrt(eps'))", 1e-9);
    r.stats = sweep_min(
        s.base.samples, r.tolerance,
        [&](std::size_t i) {
            const auto smp = draw_locc(s, i);
            Rng rng(derive_seed(s.base.seed ^ 0xa5a5a5a5ULL, i));
            const auto phi = perturb(smp.psi, log_uniform(rng, 1e-3, 3e-2), rng);
            const auto m = check_outcome_prob_lower(smp.psi, phi, smp.protocol, eps_prime);
            return m.mass - m.bound;
        },
        s.base.exec);
    return r;
}

PropertyResult sweep_max_eigenvalue(const SweepSettings &s) {
    auto r = make_result("max_eigenvalue_bound", "|lambda_max(rho) - lambda_max(sigma)| <= 2 T(rho, sigma)", 1e-10);
    r.stats = sweep_min(
        s.samples, r.tolerance,
        [&](std::size_t i) {
            Rng rng(derive_seed(s.seed, i));
            const std::size_t dim = rng.integer(2, 8);
            const Eigen::MatrixXcd a = random_density(dim, rng.integer(1, dim), rng);
            Eigen::MatrixXcd b = random_density(dim, rng.integer(1, dim), rng);
            if (rng.uniform() < 0.5) {
                const double t = log_uniform(rng, 1e-4, 1.0);
                b = (1.0 - t) * a + t * b;
            }
            const auto c = check_max_eig(DensityMatrix(a), DensityMatrix(b));
            return 2.0 * c.trace_distance - c.gap;
        },
        s.exec);
    return r;
}

// ---------------------------------------------------------------------------

std::vector<ClassicalAepRow> run_classical_aep(const Distribution &p, const std::vector<double> &eps_list,
                                               const std::vector<std::size_t> &n_list) {
    const std::set<std::size_t> ns(n_list.begin(), n_list.end());
    const std::set<double> es(eps_list.begin(), eps_list.end());
    std::vector<std::pair<std::size_t, double>> grid;
    for (auto n : ns)
        for (auto e : es) grid.emplace_back(n, e);
    const double h = shannon(p);
    return map_indexed<ClassicalAepRow>(grid.size(), [&](std::size_t i) {
        ClassicalAepRow row;
        row.n = grid[i].first;
        row.epsilon = grid[i].second;
        row.rate = regularized_smooth_h0(p, row.epsilon, row.n, Exec::serial);
        row.shannon = h;
        row.gap = row.rate - h;
        return row;
    });
}

std::string classical_aep_csv(const std::vector<ClassicalAepRow> &rows) {
    std::ostringstream out;
    out << "n,epsilon,rate,shannon,gap\n";
    for (const auto &r : rows) {
        out << r.n << ',' << format_double(r.epsilon) << ',' << format_double(r.rate) << ','
            << format_double(r.shannon) << ',' << format_double(r.gap) << '\n';
    }
    return out.str();
}

std::vector<QuantumAepRow> run_quantum_aep(const MultipartiteState &psi, const std::vector<double> &theta,
                                           const std::vector<double> &eps_list, const std::vector<std::size_t> &n_list) {
    const std::size_t k = psi.parties();
    std::vector<double> th = theta;
    if (th.empty()) th.assign(k, 1.0 / static_cast<double>(k));
    const MeasureSpec measure = MeasureSpec::weighted_renyi(th, 1.0);
    const double limit = evaluate(measure, psi);

    const std::set<std::size_t> ns(n_list.begin(), n_list.end());
    const std::set<double> es(eps_list.begin(), eps_list.end());
    std::vector<std::pair<std::size_t, double>> grid;
    for (auto n : ns)
        for (auto e : es) grid.emplace_back(n, e);
    return map_indexed<QuantumAepRow>(grid.size(), [&](std::size_t i) {
        QuantumAepRow row;
        row.n = grid[i].first;
        row.epsilon = grid[i].second;
        const auto res = typical_projector(psi, row.n, row.epsilon, AchieverMode::spectral, th);
        for (const auto &c : res.cuts) row.ranks.push_back(c.rank);
        row.estimate = res.value / static_cast<double>(row.n);
        row.limit = limit;
        row.gap = row.estimate - limit;
        row.certificate = res.certificate;
        return row;
    });
}

std::string quantum_aep_csv(const std::vector<QuantumAepRow> &rows) {
    std::ostringstream out;
    out << "n,epsilon";
    const std::size_t k = rows.empty() ? 0 : rows.front().ranks.size();
    for (std::size_t j = 0; j < k; ++j) out << ",rank_" << j;
    out << ",estimate,limit,gap,certificate\n";
    for (const auto &r : rows) {
        out << r.n << ',' << format_double(r.epsilon);
        for (double x : r.ranks) out << ',' << format_double(x);
        out << ',' << format_double(r.estimate) << ',' << format_double(r.limit) << ',' << format_double(r.gap)
            << ',' << format_double(r.certificate) << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Config handling

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &what) {
    throw ConfigError(path + ": " + what);
}

bool is_nonnegative_integer(const json &v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

class Reader {
  public:
    Reader(const json &root, std::filesystem::path base) : root_(root), base_(std::move(base)) {
        if (!root_.is_object()) fail("/", "config must be a JSON object");
    }

    void allow(std::initializer_list<const char *> keys) {
        for (auto it = root_.begin(); it != root_.end(); ++it) {
            bool known = false;
            for (const char *k : keys) known = known || it.key() == k;
            if (!known) fail("/" + it.key(), "unknown key");
        }
    }

    [[nodiscard]] bool has(const char *key) const { return root_.contains(key); }

    std::uint64_t u64(const char *key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const json &v = root_.at(key);
        if (!is_nonnegative_integer(v)) fail(std::string("/") + key, "expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    std::size_t count(const char *key, std::size_t fallback, std::size_t lo, std::size_t hi) const {
        const auto v = u64(key, fallback);
        if (v < lo || v > hi)
            fail(std::string("/") + key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return static_cast<std::size_t>(v);
    }

    double number(const char *key, double fallback) const {
        if (!has(key)) return fallback;
        const json &v = root_.at(key);
        if (!v.is_number()) fail(std::string("/") + key, "expected a number");
        return v.get<double>();
    }

    std::vector<double> numbers(const char *key) const {
        const std::string path = std::string("/") + key;
        if (!has(key)) fail(path, "missing");
        const json &v = root_.at(key);
        if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) fail(path + "/" + std::to_string(i), "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    std::vector<double> epsilons(const char *key) const {
        auto out = numbers(key);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!(out[i] >= 0.0 && out[i] < 1.0))
                fail(std::string("/") + key + "/" + std::to_string(i), "epsilon must lie in [0, 1)");
        }
        return out;
    }

    std::vector<std::size_t> copies(const char *key) const {
        const std::string path = std::string("/") + key;
        if (!has(key)) fail(path, "missing");
        const json &v = root_.at(key);
        if (!v.is_array() || v.empty()) fail(path, "expected a nonempty array of integers");
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!is_nonnegative_integer(v[i]) || v[i].get<std::uint64_t>() == 0 ||
                v[i].get<std::uint64_t>() > kMaxTypeCopies)
                fail(path + "/" + std::to_string(i), "n must be an integer in [1, " + std::to_string(kMaxTypeCopies) + "]");
            out.push_back(v[i].get<std::size_t>());
        }
        return out;
    }

    // Inline value under `key`, or the JSON document named by `file_key`.
    json source(const char *key, const char *file_key) const {
        if (has(key) && has(file_key)) fail(std::string("/") + key, std::string("give either '") + key + "' or '" + file_key + "'");
        if (has(key)) return root_.at(key);
        const std::string path = std::string("/") + file_key;
        if (!has(file_key)) fail(std::string("/") + key, "missing");
        if (!root_.at(file_key).is_string()) fail(path, "expected a file path");
        std::filesystem::path file = root_.at(file_key).get<std::string>();
        if (file.is_relative()) file = base_ / file;
        std::ifstream in(file);
        if (!in) fail(path, "cannot open " + file.string());
        try {
            return json::parse(in);
        } catch (const json::parse_error &e) {
            fail(path, file.string() + ": " + e.what());
        }
    }

    [[nodiscard]] const json &at(const char *key) const { return root_.at(key); }

  private:
    const json &root_;
    std::filesystem::path base_;
};

Distribution read_distribution(const Reader &rd) {
    const json v = rd.source("distribution", "distribution_file");
    if (!v.is_array() || v.empty()) fail("/distribution", "expected a nonempty array of probabilities");
    std::vector<double> w;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail("/distribution/" + std::to_string(i), "expected a number");
        w.push_back(v[i].get<double>());
    }
    try {
        Distribution p(w);
        if (!p.is_normalized()) fail("/distribution", "probabilities must sum to 1");
        if (p.support_size() > kMaxTypeSupport)
            fail("/distribution", "support larger than " + std::to_string(kMaxTypeSupport));
        return p;
    } catch (const std::invalid_argument &e) {
        fail("/distribution", e.what());
    }
}

MultipartiteState read_state(const Reader &rd) {
    const json v = rd.source("state", "state_file");
    try {
        if (v.is_object() && v.contains("ghz")) {
            const json &g = v.at("ghz");
            const auto parties = g.at("parties").get<std::size_t>();
            const auto levels = g.value("levels", std::size_t{2});
            return ghz(parties, levels);
        }
        auto psi = state_from_json(v);
        if (!psi.is_unit()) fail("/state", "state must be a unit vector");
        return psi;
    } catch (const json::exception &e) {
        fail("/state", e.what());
    } catch (const std::invalid_argument &e) {
        fail("/state", e.what());
    } catch (const std::length_error &e) {
        fail("/state", e.what());
    }
}

std::optional<MeasureSpec> read_measure(const Reader &rd, std::size_t parties) {
    if (rd.has("measure") && rd.has("theta")) fail("/theta", "give either 'theta' or 'measure'");
    try {
        if (rd.has("measure")) return measure_from_json(rd.at("measure"), parties);
        if (rd.has("theta")) {
            const auto theta = rd.numbers("theta");
            if (theta.size() != parties) fail("/theta", "length must equal the party count");
            return MeasureSpec::weighted_renyi(theta, 1.0);
        }
    } catch (const json::exception &e) {
        fail(rd.has("measure") ? "/measure" : "/theta", e.what());
    } catch (const std::invalid_argument &e) {
        fail(rd.has("measure") ? "/measure" : "/theta", e.what());
    }
    return std::nullopt;
}

SweepSettings read_sweep(const Reader &rd, std::uint64_t seed, std::size_t default_samples) {
    SweepSettings s;
    s.samples = rd.count("samples", default_samples, 1, 10'000'000);
    s.seed = seed;
    s.parties = rd.count("parties", 3, 1, 6);
    s.min_dim = rd.count("min_dim", 2, 1, 8);
    s.max_dim = rd.count("max_dim", 3, 1, 8);
    if (s.min_dim > s.max_dim) fail("/min_dim", "must not exceed max_dim");
    s.measure = read_measure(rd, s.parties);
    if (s.measure && !s.measure->shannon_type()) {
        // Direct-sum and continuity checks are stated for Shannon-type measures.
        fail("/measure", "sweeps require a Shannon-type measure (all alpha = 1)");
    }
    return s;
}

std::vector<std::string> read_selection(const Reader &rd, const std::vector<std::string> &known) {
    if (!rd.has("properties")) return known;
    const json &v = rd.at("properties");
    if (!v.is_array() || v.empty()) fail("/properties", "expected a nonempty array of property names");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string path = "/properties/" + std::to_string(i);
        if (!v[i].is_string()) fail(path, "expected a string");
        const auto name = v[i].get<std::string>();
        if (std::find(known.begin(), known.end(), name) == known.end()) fail(path, "unknown property '" + name + "'");
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
    // Canonical order regardless of how the selection was written.
    std::vector<std::string> ordered;
    for (const auto &k : known)
        if (std::find(out.begin(), out.end(), k) != out.end()) ordered.push_back(k);
    return ordered;
}

ExperimentOutput report(const std::string &command, std::uint64_t seed, const std::vector<PropertyResult> &results) {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["properties"] = json::array();
    bool pass = true;
    for (const auto &r : results) {
        j["properties"].push_back(to_json(r));
        pass = pass && r.passed();
    }
    j["pass"] = pass;
    return {j.dump(2) + "\n", pass ? 0 : 1};
}

}  // namespace

ExperimentOutput run_experiment(const json &config, const std::string &command_arg,
                                std::optional<std::uint64_t> seed_override, const std::filesystem::path &base_dir) {
    Reader rd(config, base_dir);
    std::string command = command_arg;
    if (rd.has("command")) {
        if (!rd.at("command").is_string()) fail("/command", "expected a string");
        const auto from_config = rd.at("command").get<std::string>();
        if (!command.empty() && command != from_config)
            fail("/command", "'" + from_config + "' conflicts with requested command '" + command + "'");
        command = from_config;
    }
    if (command.empty()) fail("/command", "missing");
    const std::uint64_t seed = seed_override ? *seed_override : rd.u64("seed", 1);

    if (command == "classical-aep") {
        rd.allow({"command", "seed", "distribution", "distribution_file", "epsilons", "ns", "out"});
        const auto p = read_distribution(rd);
        const auto eps = rd.epsilons("epsilons");
        const auto ns = rd.copies("ns");
        return {classical_aep_csv(run_classical_aep(p, eps, ns)), 0};
    }
    if (command == "quantum-aep") {
        rd.allow({"command", "seed", "state", "state_file", "theta", "epsilons", "ns", "out"});
        const auto psi = read_state(rd);
        std::vector<double> theta;
        if (rd.has("theta")) {
            theta = rd.numbers("theta");
            if (theta.size() != psi.parties()) fail("/theta", "length must equal the party count");
            try {
                (void)MeasureSpec::weighted_renyi(theta, 1.0);
            } catch (const std::invalid_argument &e) {
                fail("/theta", e.what());
            }
        }
        const auto eps = rd.epsilons("epsilons");
        const auto ns = rd.copies("ns");
        try {
            return {quantum_aep_csv(run_quantum_aep(psi, theta, eps, ns)), 0};
        } catch (const std::invalid_argument &e) {
            fail("/state", e.what());
        }
    }
    if (command == "axioms") {
        rd.allow({"command", "seed", "samples", "parties", "min_dim", "max_dim", "theta", "measure", "properties", "out"});
        const auto s = read_sweep(rd, seed, 1000);
        const std::vector<std::string> known = {"ghz_normalization", "full_additivity", "direct_sum_identity",
                                                "log_boundedness", "continuity_bound"};
        std::vector<PropertyResult> results;
        for (const auto &name : read_selection(rd, known)) {
            if (name == "ghz_normalization") results.push_back(sweep_ghz_normalization(s));
            if (name == "full_additivity") results.push_back(sweep_full_additivity(s));
            if (name == "direct_sum_identity") results.push_back(sweep_direct_sum_identity(s));
            if (name == "log_boundedness") results.push_back(sweep_log_boundedness(s));
            if (name == "continuity_bound") results.push_back(sweep_continuity_bound(s));
        }
        return report(command, seed, results);
    }
    if (command == "locc-check") {
        rd.allow({"command", "seed", "samples", "parties", "min_dim", "max_dim", "theta", "measure", "max_steps",
                  "max_branches", "properties", "out"});
        LoccSettings s;
        s.base = read_sweep(rd, seed, 500);
        s.max_steps = rd.count("max_steps", 3, 1, 16);
        s.max_branches = rd.count("max_branches", 3, 1, 8);
        const std::vector<std::string> known = {"monotone_on_average", "weak_monotonicity", "weight_conservation"};
        std::vector<PropertyResult> results;
        for (const auto &name : read_selection(rd, known)) {
            if (name == "monotone_on_average") results.push_back(sweep_monotone_on_average(s));
            if (name == "weak_monotonicity") results.push_back(sweep_weak_monotonicity(s));
            if (name == "weight_conservation") results.push_back(sweep_weight_conservation(s));
        }
        return report(command, seed, results);
    }
    if (command == "appendix") {
        rd.allow({"command", "seed", "samples", "parties", "min_dim", "max_dim", "max_steps", "max_branches",
                  "eps_prime", "properties", "out"});
        LoccSettings s;
        s.base = read_sweep(rd, seed, 10000);
        s.max_steps = rd.count("max_steps", 3, 1, 16);
        s.max_branches = rd.count("max_branches", 3, 1, 8);
        const double eps_prime = rd.number("eps_prime", 0.1);
        if (!(eps_prime > 0.0 && eps_prime <= 1.0)) fail("/eps_prime", "must lie in (0, 1]");
        const std::vector<std::string> known = {"cond_pure_tv_bound", "cond_pure_branch_bound", "outcome_mass_bound",
                                                "max_eigenvalue_bound"};
        std::vector<PropertyResult> results;
        for (const auto &name : read_selection(rd, known)) {
            if (name == "cond_pure_tv_bound") results.push_back(sweep_cond_pure_tv(s.base));
            if (name == "cond_pure_branch_bound") results.push_back(sweep_cond_pure_branch(s.base));
            if (name == "outcome_mass_bound") results.push_back(sweep_outcome_mass(s, eps_prime));
            if (name == "max_eigenvalue_bound") results.push_back(sweep_max_eigenvalue(s.base));
        }
        return report(command, seed, results);
    }
    fail("/command", "unknown command '" + command + "'");
}

}  // namespace aep
