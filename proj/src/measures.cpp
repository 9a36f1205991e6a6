#include "aep/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "aep/entropy.hpp"

namespace aep {

std::string to_string(MeasureKind kind) {
    switch (kind) {
    case MeasureKind::weighted_marginal_renyi: return "weighted_marginal_renyi";
    case MeasureKind::weighted_marginal_shannon_general: return "weighted_marginal_shannon_general";
    }
    return "unknown";
}

MeasureKind measure_kind_from_string(const std::string &name) {
    if (name == "weighted_marginal_renyi") return MeasureKind::weighted_marginal_renyi;
    if (name == "weighted_marginal_shannon_general") return MeasureKind::weighted_marginal_shannon_general;
    throw std::invalid_argument("unknown measure kind '" + name + "'");
}

MeasureSpec::MeasureSpec(MeasureKind kind, std::size_t parties, std::vector<MeasureTerm> terms)
    : kind_(kind), parties_(parties) {
    if (parties_ < 2) throw std::invalid_argument("MeasureSpec: at least two parties required");
    if (terms.empty()) throw std::invalid_argument("MeasureSpec: no terms");
    double total = 0.0;
    // merge duplicate cuts; std::map keeps canonical (sorted) term order
    std::map<std::pair<Bipartition, double>, double> merged;
    for (auto &t : terms) {
        if (t.cut.parties() != parties_) throw std::invalid_argument("MeasureSpec: cut has wrong party count");
        if (!(t.weight >= 0.0) || !std::isfinite(t.weight))
            throw std::invalid_argument("MeasureSpec: weights must be finite and nonnegative");
        if (!(t.alpha >= 0.0 && t.alpha <= 1.0)) throw std::invalid_argument("MeasureSpec: alpha must lie in [0,1]");
        total += t.weight;
        Bipartition cut = t.cut;
        if (kind_ == MeasureKind::weighted_marginal_renyi) {
            if (cut.subset().size() != 1) throw std::invalid_argument("MeasureSpec: Renyi kind takes single-party cuts");
        } else {
            if (t.alpha != 1.0) throw std::invalid_argument("MeasureSpec: general kind is Shannon-only (alpha = 1)");
            cut = cut.canonical();
        }
        merged[{cut, t.alpha}] += t.weight;
    }
    if (std::abs(total - 1.0) > kWeightTolerance)
        throw std::invalid_argument("MeasureSpec: weights sum to " + std::to_string(total) + ", expected 1");
    for (const auto &[key, w] : merged) terms_.push_back(MeasureTerm{key.first, w, key.second});
}

MeasureSpec MeasureSpec::weighted_renyi(std::span<const double> theta, double alpha) {
    std::vector<double> alphas(theta.size(), alpha);
    return weighted_renyi(theta, alphas);
}

MeasureSpec MeasureSpec::weighted_renyi(std::span<const double> theta, std::span<const double> alphas) {
    if (theta.size() != alphas.size()) throw std::invalid_argument("MeasureSpec: theta and alpha lengths differ");
    std::vector<MeasureTerm> terms;
    for (std::size_t j = 0; j < theta.size(); ++j)
        terms.push_back(MeasureTerm{Bipartition::single(theta.size(), j), theta[j], alphas[j]});
    return MeasureSpec(MeasureKind::weighted_marginal_renyi, theta.size(), std::move(terms));
}

MeasureSpec MeasureSpec::weighted_general(std::size_t parties,
                                          const std::vector<std::pair<std::vector<std::size_t>, double>> &theta) {
    std::vector<MeasureTerm> terms;
    for (const auto &[subset, w] : theta) terms.push_back(MeasureTerm{Bipartition(parties, subset), w, 1.0});
    return MeasureSpec(MeasureKind::weighted_marginal_shannon_general, parties, std::move(terms));
}

bool MeasureSpec::shannon_type() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const MeasureTerm &t) { return t.alpha == 1.0; });
}

std::vector<double> MeasureSpec::single_party_weights() const {
    if (kind_ != MeasureKind::weighted_marginal_renyi)
        throw std::logic_error("single_party_weights: only defined for single-party cuts");
    std::vector<double> theta(parties_, 0.0);
    for (const auto &t : terms_) theta[t.cut.subset().front()] += t.weight;
    return theta;
}

MeasureSpec MeasureSpec::with_alpha(double alpha) const {
    std::vector<MeasureTerm> terms(terms_);
    for (auto &t : terms) t.alpha = alpha;
    return MeasureSpec(kind_, parties_, std::move(terms));
}

void to_json(nlohmann::json &j, const MeasureSpec &spec) {
    nlohmann::json theta = nlohmann::json::array();
    for (const auto &t : spec.terms())
        theta.push_back({{"subset", t.cut.subset()}, {"weight", t.weight}, {"alpha", t.alpha}});
    j = nlohmann::json{{"kind", to_string(spec.kind())}, {"parties", spec.parties()}, {"theta", theta}};
}

MeasureSpec measure_from_json(const nlohmann::json &j, std::size_t parties) {
    if (!j.is_object() || !j.contains("kind") || !j.contains("theta"))
        throw std::invalid_argument("measure JSON: expected object with kind and theta");
    const MeasureKind kind = measure_kind_from_string(j.at("kind").get<std::string>());
    std::size_t k = parties;
    if (k == 0 && j.contains("parties")) k = j.at("parties").get<std::size_t>();
    if (k == 0) {
        for (const auto &t : j.at("theta"))
            for (std::size_t p : t.at("subset").get<std::vector<std::size_t>>()) k = std::max(k, p + 1);
    }
    std::vector<MeasureTerm> terms;
    for (const auto &t : j.at("theta")) {
        const double alpha = t.contains("alpha") ? t.at("alpha").get<double>() : 1.0;
        terms.push_back(
            MeasureTerm{Bipartition(k, t.at("subset").get<std::vector<std::size_t>>()), t.at("weight").get<double>(), alpha});
    }
    return MeasureSpec(kind, k, std::move(terms));
}

double evaluate(const MeasureSpec &spec, const MultipartiteState &psi) {
    if (psi.parties() != spec.parties())
        throw std::invalid_argument("evaluate: state has " + std::to_string(psi.parties()) + " parties, measure expects " +
                                    std::to_string(spec.parties()));
    if (!(psi.norm_sq() > 0.0)) throw std::invalid_argument("evaluate: zero vector");
    double e = 0.0;
    for (const auto &t : spec.terms())
        if (t.weight > 0.0) e += t.weight * marginal_entropy(psi, t.cut, t.alpha);
    return e;
}

double shannon_limit(const MeasureSpec &spec, const MultipartiteState &psi) {
    return evaluate(spec.with_alpha(1.0), psi);
}

SandwichBounds sandwich_bounds(const MultipartiteState &psi, std::span<const double> theta) {
    const MeasureSpec spec = MeasureSpec::weighted_renyi(theta, 1.0);
    return SandwichBounds{evaluate(spec, psi), evaluate(spec.with_alpha(0.0), psi)};
}

ContinuityBound continuity_bound(std::size_t parties, double delta) {
    if (parties == 0) throw std::invalid_argument("continuity_bound: parties must be positive");
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("continuity_bound: delta must lie in [0,1)");
    const double k1 = static_cast<double>(parties + 1);
    const double s = 1.0 + std::pow(delta, 2.0 / k1);
    const double s_pow = std::pow(s, k1);
    const double denom = 1.0 - delta * delta;
    ContinuityBound cb;
    cb.parties = parties;
    cb.delta = delta;
    cb.a = (s_pow - 1.0 + delta * delta) / denom;
    cb.b = s_pow / denom * binary_h(1.0 / s);
    return cb;
}

double continuity_slack(const MeasureSpec &spec, const MultipartiteState &psi, const MultipartiteState &phi) {
    const double delta = trace_distance_pure(psi, phi);
    if (delta >= 1.0) return kInfinity;
    const ContinuityBound cb = continuity_bound(psi.parties(), delta);
    const double diff = std::abs(evaluate(spec, phi) - evaluate(spec, psi));
    return cb.at(std::log2(static_cast<double>(psi.total_dim()))) - diff;
}

double check_direct_sum_identity(const MeasureSpec &spec, const MultipartiteState &psi, const MultipartiteState &phi,
                                 double p) {
    if (!spec.shannon_type()) throw std::invalid_argument("check_direct_sum_identity: measure must be Shannon-type");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("check_direct_sum_identity: p outside [0,1]");
    const MultipartiteState sum = direct_sum(phi.scaled(std::sqrt(p)), psi.scaled(std::sqrt(1.0 - p)));
    const double lhs = evaluate(spec, sum);
    const double rhs = p * evaluate(spec, phi) + (1.0 - p) * evaluate(spec, psi) + binary_h(p);
    return std::abs(lhs - rhs);
}

double check_log_boundedness(const MeasureSpec &spec, std::span<const MultipartiteState> summands) {
    if (summands.empty()) throw std::invalid_argument("check_log_boundedness: no summands");
    double total = 0.0, worst = -kInfinity;
    for (const auto &s : summands) {
        total += s.norm_sq();
        worst = std::max(worst, evaluate(spec, s));  // evaluate() normalizes
    }
    if (std::abs(total - 1.0) > 1e-10) throw std::invalid_argument("check_log_boundedness: squared norms must sum to 1");
    MultipartiteState sum = summands[0];
    for (std::size_t i = 1; i < summands.size(); ++i) sum = direct_sum(sum, summands[i]);
    return worst + std::log2(static_cast<double>(summands.size())) - evaluate(spec, sum);
}

double check_additivity(const MeasureSpec &spec, const MultipartiteState &psi, const MultipartiteState &phi) {
    return std::abs(evaluate(spec, tensor_product(psi, phi)) - evaluate(spec, psi) - evaluate(spec, phi));
}

}  // namespace aep
