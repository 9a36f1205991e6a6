#include "aep/locc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "aep/entropy.hpp"
#include "aep/random.hpp"

namespace aep {

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ConditionallyPureState

ConditionallyPureState::ConditionallyPureState(std::vector<Branch> branches) : branches_(std::move(branches)) {
    std::sort(branches_.begin(), branches_.end(), [](const Branch &a, const Branch &b) { return a.label < b.label; });
    double total = 0.0;
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        const Branch &b = branches_[i];
        if (!(b.weight >= 0.0)) throw std::invalid_argument("ConditionallyPureState: negative weight");
        if (i > 0 && branches_[i - 1].label == b.label)
            throw std::invalid_argument("ConditionallyPureState: duplicate label " + std::to_string(b.label));
        if (!b.state.is_unit(1e-10)) throw std::invalid_argument("ConditionallyPureState: branch state is not a unit vector");
        if (b.state.parties() != branches_.front().state.parties())
            throw std::invalid_argument("ConditionallyPureState: branches disagree on party count");
        total += b.weight;
    }
    if (total > 1.0 + kTolerance) throw std::invalid_argument("ConditionallyPureState: total weight exceeds one");
}

ConditionallyPureState ConditionallyPureState::pure(const MultipartiteState &psi) {
    return ConditionallyPureState({Branch{1.0, 0, psi.normalized()}});
}

double ConditionallyPureState::total_weight() const {
    double s = 0.0;
    for (const auto &b : branches_) s += b.weight;
    return s;
}

const Branch *ConditionallyPureState::find(std::size_t label) const {
    auto it = std::lower_bound(branches_.begin(), branches_.end(), label,
                               [](const Branch &b, std::size_t l) { return b.label < l; });
    return (it != branches_.end() && it->label == label) ? &*it : nullptr;
}

DensityMatrix ConditionallyPureState::discard_register() const {
    if (branches_.empty()) throw std::logic_error("discard_register: empty ensemble");
    const auto &dims = branches_.front().state.dims();
    const auto n = static_cast<Eigen::Index>(branches_.front().state.total_dim());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    for (const auto &b : branches_) {
        if (b.state.dims() != dims) throw std::invalid_argument("discard_register: branches live on different spaces");
        rho += b.weight * b.state.amps() * b.state.amps().adjoint();
    }
    return DensityMatrix(rho);
}

// ---------------------------------------------------------------------------
// OneStepChannel

OneStepChannel::OneStepChannel(std::size_t party, std::vector<std::size_t> register_map,
                               std::vector<Eigen::MatrixXcd> kraus, std::size_t in_alphabet)
    : party_(party), map_(std::move(register_map)), kraus_(std::move(kraus)), in_alphabet_(in_alphabet) {
    if (kraus_.empty()) throw std::invalid_argument("OneStepChannel: empty Kraus family");
    if (map_.size() != kraus_.size()) throw std::invalid_argument("OneStepChannel: register map and Kraus family differ in size");
    const Eigen::Index in = kraus_.front().cols();
    for (const auto &k : kraus_)
        if (k.cols() != in || k.rows() == 0) throw std::invalid_argument("OneStepChannel: Kraus operators disagree on input dimension");
    const std::size_t max_x = *std::max_element(map_.begin(), map_.end());
    if (in_alphabet_ == 0) in_alphabet_ = max_x + 1;
    if (max_x >= in_alphabet_) throw std::invalid_argument("OneStepChannel: register map leaves the input alphabet");

    std::vector<Eigen::MatrixXcd> sums(in_alphabet_, Eigen::MatrixXcd::Zero(in, in));
    for (std::size_t y = 0; y < kraus_.size(); ++y) sums[map_[y]] += kraus_[y].adjoint() * kraus_[y];
    trace_preserving_ = true;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(in, in);
    for (const auto &s : sums) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig((s + s.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().maxCoeff() > 1.0 + kTolerance)
            throw std::invalid_argument("OneStepChannel: Kraus family is not trace non-increasing");
        if ((s - id).cwiseAbs().maxCoeff() > kTolerance) trace_preserving_ = false;
    }
}

// ---------------------------------------------------------------------------
// Application

ConditionallyPureState apply(const OneStepChannel &channel, const ConditionallyPureState &rho) {
    std::vector<std::vector<std::size_t>> outcomes(channel.in_alphabet());
    for (std::size_t y = 0; y < channel.register_map().size(); ++y) outcomes[channel.register_map()[y]].push_back(y);

    std::vector<Branch> out;
    for (const auto &b : rho.branches()) {
        if (b.label >= channel.in_alphabet())
            throw std::invalid_argument("apply: branch label " + std::to_string(b.label) + " outside channel input alphabet");
        if (channel.party() >= b.state.parties()) throw std::invalid_argument("apply: channel party out of range");
        for (std::size_t y : outcomes[b.label]) {
            MultipartiteState v = apply_local(b.state, channel.party(), channel.kraus()[y]);
            const double w = v.norm_sq();
            const double weight = b.weight * w;
            if (w <= kDropWeight || weight == 0.0) continue;
            out.push_back(Branch{weight, y, v.scaled(1.0 / std::sqrt(w))});
        }
    }
    return ConditionallyPureState(std::move(out));
}

ConditionallyPureState compose_and_discard(const Protocol &protocol, const MultipartiteState &psi) {
    ConditionallyPureState rho = ConditionallyPureState::pure(psi);
    for (const auto &step : protocol) rho = apply(step, rho);
    return rho;
}

OneStepChannel random_one_step(std::size_t party, std::size_t in_dim, std::size_t out_dim, std::size_t branches,
                               std::uint64_t seed, std::size_t in_alphabet) {
    if (branches == 0 || out_dim == 0 || in_dim == 0 || in_alphabet == 0)
        throw std::invalid_argument("random_one_step: dimensions and counts must be positive");
    if (out_dim * branches < in_dim) throw std::invalid_argument("random_one_step: out_dim * branches < in_dim");
    Rng rng(seed);
    std::vector<Eigen::MatrixXcd> kraus;
    std::vector<std::size_t> map;
    const auto od = static_cast<Eigen::Index>(out_dim);
    for (std::size_t x = 0; x < in_alphabet; ++x) {
        const Eigen::MatrixXcd v = haar_isometry(out_dim * branches, in_dim, rng);
        for (std::size_t s = 0; s < branches; ++s) {
            kraus.push_back(v.middleRows(static_cast<Eigen::Index>(s) * od, od));
            map.push_back(x);
        }
    }
    return OneStepChannel(party, std::move(map), std::move(kraus), in_alphabet);
}

Protocol random_protocol(const Dims &dims, std::size_t steps, std::size_t max_branches, std::size_t max_dim,
                         std::uint64_t seed) {
    if (max_branches == 0 || max_dim == 0) throw std::invalid_argument("random_protocol: limits must be positive");
    Rng rng(seed);
    Dims cur = dims;
    std::size_t alphabet = 1;
    Protocol protocol;
    for (std::size_t s = 0; s < steps; ++s) {
        const std::size_t party = rng.integer(0, cur.size() - 1);
        const std::size_t out = rng.integer(1, max_dim);
        std::size_t branches = rng.integer(1, max_branches);
        branches = std::max(branches, (cur[party] + out - 1) / out);
        protocol.push_back(random_one_step(party, cur[party], out, branches, derive_seed(seed, s), alphabet));
        alphabet = protocol.back().out_alphabet();
        cur[party] = out;
    }
    return protocol;
}

Protocol discard_and_prepare(const Dims &dims) {
    Protocol protocol;
    std::size_t alphabet = 1;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        const auto d = static_cast<Eigen::Index>(dims[j]);
        std::vector<Eigen::MatrixXcd> kraus;
        std::vector<std::size_t> map;
        for (std::size_t x = 0; x < alphabet; ++x)
            for (Eigen::Index y = 0; y < d; ++y) {
                Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(d, d);
                k(0, y) = 1.0;  // |0><y|
                kraus.push_back(std::move(k));
                map.push_back(x);
            }
        protocol.emplace_back(j, std::move(map), std::move(kraus), alphabet);
        alphabet = protocol.back().out_alphabet();
    }
    return protocol;
}

std::size_t final_alphabet(const Protocol &protocol) { return protocol.empty() ? 1 : protocol.back().out_alphabet(); }

Protocol two_copy_protocol(const Protocol &protocol, const Dims &dims) {
    Protocol out;
    if (!protocol.empty() && protocol.front().in_alphabet() != 1)
        throw std::invalid_argument("two_copy_protocol: first step must read a trivial register");
    Dims first = dims, second = dims;
    // first copy: register of the second copy is still trivial
    for (const auto &step : protocol) {
        const std::size_t j = step.party();
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(second[j]),
                                                               static_cast<Eigen::Index>(second[j]));
        std::vector<Eigen::MatrixXcd> kraus;
        for (const auto &k : step.kraus()) kraus.push_back(kron(k, id));
        out.emplace_back(j, step.register_map(), std::move(kraus), step.in_alphabet());
        first[j] = static_cast<std::size_t>(step.kraus().front().rows());
    }
    const std::size_t first_alphabet = final_alphabet(protocol);
    for (const auto &step : protocol) {
        const std::size_t j = step.party();
        const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(first[j]),
                                                               static_cast<Eigen::Index>(first[j]));
        std::vector<Eigen::MatrixXcd> kraus;
        std::vector<std::size_t> map;
        const std::size_t ny = step.out_alphabet(), nx = step.in_alphabet();
        for (std::size_t xa = 0; xa < first_alphabet; ++xa)
            for (std::size_t y = 0; y < ny; ++y) {
                kraus.push_back(kron(id, step.kraus()[y]));
                map.push_back(xa * nx + step.register_map()[y]);
            }
        out.emplace_back(j, std::move(map), std::move(kraus), first_alphabet * nx);
        second[j] = static_cast<std::size_t>(step.kraus().front().rows());
    }
    return out;
}

ConditionallyPureState product_ensemble(const ConditionallyPureState &a, const ConditionallyPureState &b,
                                        std::size_t b_alphabet) {
    std::vector<Branch> out;
    for (const auto &x : a.branches())
        for (const auto &y : b.branches())
            out.push_back(Branch{x.weight * y.weight, x.label * b_alphabet + y.label, tensor_product(x.state, y.state)});
    return ConditionallyPureState(std::move(out));
}

// ---------------------------------------------------------------------------
// Checks

MonotoneCheck monotone_avg_check(const MeasureSpec &spec, const MultipartiteState &psi, const Protocol &protocol) {
    const ConditionallyPureState rho = compose_and_discard(protocol, psi);
    MonotoneCheck out;
    out.initial = evaluate(spec, psi);
    out.weakest_branch_slack = kInfinity;
    for (const auto &b : rho.branches()) {
        const double e = evaluate(spec, b.state);
        out.average += b.weight * e;
        out.weakest_branch_slack = std::min(out.weakest_branch_slack, out.initial - b.weight * e);
    }
    if (rho.size() == 0) out.weakest_branch_slack = out.initial;
    out.slack = out.initial - out.average;
    out.branches = rho.size();
    return out;
}

namespace {

// Union of labels from both ensembles, ascending.
std::vector<std::size_t> label_union(const ConditionallyPureState &rho, const ConditionallyPureState &sigma) {
    std::vector<std::size_t> labels;
    for (const auto &b : rho.branches()) labels.push_back(b.label);
    for (const auto &b : sigma.branches()) labels.push_back(b.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return labels;
}

void require_same_space(const Branch &a, const Branch &b) {
    if (a.state.dims() != b.state.dims())
        throw std::invalid_argument("label " + std::to_string(a.label) + " carries states on different spaces");
}

}  // namespace

CondPureDistance check_cond_pure_distance(const ConditionallyPureState &rho, const ConditionallyPureState &sigma) {
    CondPureDistance out;
    for (std::size_t label : label_union(rho, sigma)) {
        const Branch *x = rho.find(label);
        const Branch *y = sigma.find(label);
        const double a = x ? x->weight : 0.0;
        const double b = y ? y->weight : 0.0;
        double infid = 1.0;
        if (x && y) {
            require_same_space(*x, *y);
            infid = infidelity(x->state, y->state);
        }
        const double branch_distance = std::sqrt(infid);
        // a|u><u| - b|v><v| has eigenvalues of opposite sign with
        // sum a - b and product -ab(1 - |<u|v>|^2).
        out.trace_distance += 0.5 * std::sqrt((a - b) * (a - b) + 4.0 * a * b * infid);
        out.tv += 0.5 * std::abs(a - b);
        out.avg_branch += a * branch_distance;
    }
    constexpr double slack = 1e-12;
    out.tv_bound_ok = out.tv <= out.trace_distance + slack;
    out.avg_branch_bound_ok = out.avg_branch <= 2.0 * out.trace_distance + slack;
    return out;
}

double cond_pure_trace_distance_dense(const ConditionallyPureState &rho, const ConditionallyPureState &sigma) {
    double t = 0.0;
    for (std::size_t label : label_union(rho, sigma)) {
        const Branch *x = rho.find(label);
        const Branch *y = sigma.find(label);
        if (x && y) require_same_space(*x, *y);
        const auto n = static_cast<Eigen::Index>((x ? x->state : y->state).total_dim());
        Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, n);
        if (x) block += x->weight * x->state.amps() * x->state.amps().adjoint();
        if (y) block -= y->weight * y->state.amps() * y->state.amps().adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig((block + block.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
        t += 0.5 * eig.eigenvalues().cwiseAbs().sum();
    }
    return t;
}

OutcomeMass check_outcome_prob_lower(const MultipartiteState &psi, const MultipartiteState &phi,
                                     const Protocol &protocol, double eps_prime) {
    if (!(eps_prime > 0.0 && eps_prime <= 1.0))
        throw std::invalid_argument("check_outcome_prob_lower: eps' must lie in (0,1]");
    OutcomeMass out;
    out.epsilon = std::max(0.0, 1.0 - fidelity_sq(psi, phi));
    const ConditionallyPureState p = compose_and_discard(protocol, psi);
    const ConditionallyPureState q = compose_and_discard(protocol, phi);
    for (const auto &qb : q.branches()) {
        const Branch *pb = p.find(qb.label);
        if (pb && fidelity_sq(qb.state, pb->state) >= 1.0 - eps_prime) out.mass += qb.weight;
    }
    out.bound = 1.0 - 2.0 * std::sqrt(out.epsilon) * (1.0 + 1.0 / std::sqrt(eps_prime));
    out.ok = out.bound <= 0.0 || out.mass >= out.bound - 1e-9;
    return out;
}

MaxEigCheck check_max_eig(const DensityMatrix &rho, const DensityMatrix &sigma) {
    MaxEigCheck out;
    out.trace_distance = trace_distance(rho, sigma);
    out.gap = std::abs(rho.max_eigenvalue() - sigma.max_eigenvalue());
    out.ok = out.gap <= 2.0 * out.trace_distance + 1e-10;
    return out;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json &j, const OneStepChannel &channel) {
    nlohmann::json kraus = nlohmann::json::array();
    for (const auto &k : channel.kraus()) {
        std::vector<std::vector<double>> re(static_cast<std::size_t>(k.rows())), im(re.size());
        for (Eigen::Index r = 0; r < k.rows(); ++r)
            for (Eigen::Index c = 0; c < k.cols(); ++c) {
                re[static_cast<std::size_t>(r)].push_back(k(r, c).real());
                im[static_cast<std::size_t>(r)].push_back(k(r, c).imag());
            }
        kraus.push_back({{"re", re}, {"im", im}});
    }
    j = nlohmann::json{{"party", channel.party()},
                       {"f", channel.register_map()},
                       {"in_alphabet", channel.in_alphabet()},
                       {"kraus", kraus}};
}

OneStepChannel channel_from_json(const nlohmann::json &j) {
    if (!j.is_object() || !j.contains("party") || !j.contains("f") || !j.contains("kraus"))
        throw std::invalid_argument("channel JSON: expected object with party, f and kraus");
    std::vector<Eigen::MatrixXcd> kraus;
    for (const auto &k : j.at("kraus")) {
        const auto re = k.at("re").get<std::vector<std::vector<double>>>();
        const auto im = k.contains("im") ? k.at("im").get<std::vector<std::vector<double>>>()
                                         : std::vector<std::vector<double>>{};
        if (re.empty()) throw std::invalid_argument("channel JSON: empty Kraus operator");
        Eigen::MatrixXcd m(static_cast<Eigen::Index>(re.size()), static_cast<Eigen::Index>(re.front().size()));
        for (std::size_t r = 0; r < re.size(); ++r) {
            if (re[r].size() != re.front().size()) throw std::invalid_argument("channel JSON: ragged Kraus rows");
            for (std::size_t c = 0; c < re[r].size(); ++c) {
                const double imag = im.empty() ? 0.0 : im.at(r).at(c);
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cplx(re[r][c], imag);
            }
        }
        kraus.push_back(std::move(m));
    }
    const std::size_t alphabet = j.contains("in_alphabet") ? j.at("in_alphabet").get<std::size_t>() : 0;
    return OneStepChannel(j.at("party").get<std::size_t>(), j.at("f").get<std::vector<std::size_t>>(), std::move(kraus),
                          alphabet);
}

nlohmann::json protocol_to_json(const Protocol &protocol) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto &step : protocol) j.push_back(step);
    return j;
}

Protocol protocol_from_json(const nlohmann::json &j) {
    if (!j.is_array()) throw std::invalid_argument("protocol JSON: expected an array of steps");
    Protocol p;
    for (const auto &step : j) p.push_back(channel_from_json(step));
    return p;
}

}  // namespace aep
