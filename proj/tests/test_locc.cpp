#include <doctest.h>

#include <cmath>

#include "aep/locc.hpp"
#include "aep/random.hpp"

using namespace aep;

namespace {

MeasureSpec uniform_theta(std::size_t k) {
    return MeasureSpec::weighted_renyi(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

OneStepChannel computational_measurement(std::size_t party, std::size_t d) {
    std::vector<Eigen::MatrixXcd> kraus;
    for (std::size_t y = 0; y < d; ++y) {
        Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        k(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(y)) = 1.0;
        kraus.push_back(k);
    }
    return OneStepChannel(party, std::vector<std::size_t>(d, 0), kraus);
}

ConditionallyPureState random_ensemble(const Dims &dims, std::size_t labels, Rng &rng) {
    const auto p = random_distribution(labels, rng);
    std::vector<Branch> b;
    for (std::size_t x = 0; x < labels; ++x) b.push_back({p[x], x, random_state(dims, rng)});
    return ConditionallyPureState(std::move(b));
}

}  // namespace

TEST_CASE("conditionally pure state validation") {
    Rng rng(51);
    const auto psi = random_state({2, 2}, rng);
    CHECK_THROWS(ConditionallyPureState({{0.5, 0, psi}, {0.6, 1, psi}}));
    CHECK_THROWS(ConditionallyPureState({{0.5, 0, psi}, {0.5, 0, psi}}));
    CHECK_THROWS(ConditionallyPureState({{-0.1, 0, psi}}));
    CHECK_THROWS(ConditionallyPureState({{0.5, 0, psi.scaled(0.5)}}));
    const ConditionallyPureState ok({{0.3, 4, psi}, {0.2, 1, psi}});
    CHECK(ok.branches().front().label == 1);
    CHECK(ok.total_weight() == doctest::Approx(0.5));
    CHECK(ok.find(4) != nullptr);
    CHECK(ok.find(2) == nullptr);
}

TEST_CASE("channel validation") {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Identity(2, 2) * 1.1;
    CHECK_THROWS(OneStepChannel(0, {0}, {k}));
    CHECK_THROWS(OneStepChannel(0, {0, 0}, {Eigen::MatrixXcd::Identity(2, 2), Eigen::MatrixXcd::Identity(2, 2)}));
    const OneStepChannel half(0, {0}, {Eigen::MatrixXcd::Identity(2, 2) * std::sqrt(0.5)});
    CHECK_FALSE(half.trace_preserving());
    const OneStepChannel id(0, {0}, {Eigen::MatrixXcd::Identity(2, 2)});
    CHECK(id.trace_preserving());
    Rng rng(52);
    const auto psi = random_state({3, 2}, rng);
    CHECK_THROWS(apply(id, ConditionallyPureState::pure(psi)));
}

TEST_CASE("identity channel leaves the input unchanged") {
    Rng rng(53);
    const auto psi = random_state({2, 3}, rng);
    const Protocol p{OneStepChannel(1, {0}, {Eigen::MatrixXcd::Identity(3, 3)})};
    const auto out = compose_and_discard(p, psi);
    REQUIRE(out.size() == 1);
    CHECK(std::abs(out.branches()[0].weight - 1.0) < 1e-15);
    CHECK((out.branches()[0].state.amps() - psi.amps()).norm() < 1e-15);
    const auto empty = compose_and_discard({}, psi);
    REQUIRE(empty.size() == 1);
    CHECK((empty.branches()[0].state.amps() - psi.amps()).norm() < 1e-15);
}

TEST_CASE("measuring |+> gives two branches of weight 1/2") {
    Eigen::VectorXcd plus(2);
    plus << std::sqrt(0.5), std::sqrt(0.5);
    const MultipartiteState psi({2}, plus);
    const auto out = compose_and_discard({computational_measurement(0, 2)}, psi);
    REQUIRE(out.size() == 2);
    for (const auto &b : out.branches()) CHECK(b.weight == doctest::Approx(0.5));
}

TEST_CASE("random one-step channels are isometric slices") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto c = random_one_step(0, 3, 2, 2, seed);
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(3, 3);
        for (const auto &k : c.kraus()) sum += k.adjoint() * k;
        CHECK((sum - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-10);
        CHECK(c.trace_preserving());
        const auto again = random_one_step(0, 3, 2, 2, seed);
        for (std::size_t y = 0; y < c.kraus().size(); ++y) CHECK(c.kraus()[y] == again.kraus()[y]);
    }
    const auto u = random_one_step(1, 3, 3, 1, 7);
    CHECK((u.kraus()[0] * u.kraus()[0].adjoint() - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-10);
    CHECK_THROWS(random_one_step(0, 5, 2, 2, 1));
}

TEST_CASE("weights are conserved by trace-preserving protocols") {
    Rng rng(54);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto psi = random_state(random_dims(3, 1, 3, rng), rng);
        const auto prot = random_protocol(psi.dims(), 1 + seed % 3, 3, 3, seed);
        const auto out = compose_and_discard(prot, psi);
        CHECK(std::abs(out.total_weight() - 1.0) <= 1e-10);
        CHECK(out.total_weight() <= 1.0 + 1e-12);
        for (const auto &b : out.branches()) CHECK(b.label < final_alphabet(prot));
    }
}

TEST_CASE("discard and prepare") {
    Rng rng(55);
    const auto psi = random_state({2, 3, 2}, rng);
    const auto prot = discard_and_prepare(psi.dims());
    const auto out = compose_and_discard(prot, psi);
    double total = 0.0;
    for (const auto &b : out.branches()) {
        total += b.weight;
        CHECK(std::abs(std::abs(b.state[0]) - 1.0) < 1e-12);
    }
    CHECK(total == doctest::Approx(1.0));
    const auto m = uniform_theta(3);
    const auto check = monotone_avg_check(m, psi, prot);
    CHECK(check.slack == doctest::Approx(evaluate(m, psi)));
    CHECK(check.average == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("monotone on average") {
    Rng rng(56);
    const auto m = uniform_theta(3);
    const auto psi = random_state({2, 2, 2}, rng);
    const Protocol id{OneStepChannel(0, {0}, {Eigen::MatrixXcd::Identity(2, 2)})};
    CHECK(std::abs(monotone_avg_check(m, psi, id).slack) < 1e-12);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto phi = random_state(random_dims(3, 2, 3, rng), rng);
        const auto prot = random_protocol(phi.dims(), 1 + seed % 3, 3, 3, seed);
        const auto c = monotone_avg_check(m, phi, prot);
        CHECK(c.slack >= -1e-9);
        CHECK(c.weakest_branch_slack >= -1e-9);
    }
}

TEST_CASE("two-copy protocol yields the product ensemble") {
    Rng rng(57);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto psi = random_state(random_dims(2, 2, 3, rng), rng);
        const auto prot = random_protocol(psi.dims(), 1 + seed % 2, 2, 3, seed);
        const auto single = compose_and_discard(prot, psi);
        const auto joint = compose_and_discard(two_copy_protocol(prot, psi.dims()), tensor_product(psi, psi));
        const auto expect = product_ensemble(single, single, final_alphabet(prot));
        REQUIRE(joint.size() == expect.size());
        for (std::size_t i = 0; i < joint.size(); ++i) {
            const auto &a = joint.branches()[i];
            const auto &b = expect.branches()[i];
            CHECK(a.label == b.label);
            CHECK(std::abs(a.weight - b.weight) <= 1e-10);
            REQUIRE(a.state.dims() == b.state.dims());
            CHECK((a.state.amps() - b.state.amps()).norm() <= 1e-10);
        }
    }
}

TEST_CASE("register discard does not increase trace distance") {
    Rng rng(58);
    for (int t = 0; t < 200; ++t) {
        const Dims dims = random_dims(2, 1, 3, rng);
        const std::size_t labels = rng.integer(1, 4);
        const auto rho = random_ensemble(dims, labels, rng);
        const auto sigma = random_ensemble(dims, labels, rng);
        const double kept = check_cond_pure_distance(rho, sigma).trace_distance;
        const double merged = trace_distance(rho.discard_register(), sigma.discard_register());
        CHECK(merged <= kept + 1e-12);
    }
}

TEST_CASE("conditionally pure distance: closed form vs dense oracle") {
    Rng rng(59);
    for (int t = 0; t < 200; ++t) {
        const Dims dims = random_dims(2, 1, 3, rng);
        const auto rho = random_ensemble(dims, rng.integer(1, 4), rng);
        const auto sigma = random_ensemble(dims, rng.integer(1, 4), rng);
        const auto d = check_cond_pure_distance(rho, sigma);
        CHECK(d.trace_distance == doctest::Approx(cond_pure_trace_distance_dense(rho, sigma)).epsilon(1e-10));
        CHECK(d.tv_bound_ok);
        CHECK(d.avg_branch_bound_ok);
    }
}

TEST_CASE("conditionally pure distance examples") {
    Rng rng(60);
    const auto rho = random_ensemble({2, 2}, 3, rng);
    const auto same = check_cond_pure_distance(rho, rho);
    CHECK(same.trace_distance == doctest::Approx(0.0).scale(1.0));
    CHECK(same.tv == 0.0);
    CHECK(same.avg_branch == doctest::Approx(0.0).scale(1.0));

    std::vector<Branch> a, b;
    const double w[] = {0.25, 0.75};
    for (std::size_t x = 0; x < 2; ++x) {
        const std::size_t i0[] = {0, x}, i1[] = {1, x};
        a.push_back({w[x], x, MultipartiteState::basis({2, 2}, i0)});
        b.push_back({w[x], x, MultipartiteState::basis({2, 2}, i1)});
    }
    const auto d = check_cond_pure_distance(ConditionallyPureState(a), ConditionallyPureState(b));
    CHECK(d.trace_distance == doctest::Approx(1.0));
    CHECK(d.avg_branch == doctest::Approx(1.0));
    CHECK(d.tv_bound_ok);
    CHECK(d.avg_branch_bound_ok);
    CHECK_THROWS(check_cond_pure_distance(rho, random_ensemble({2, 3}, 3, rng)));
}

TEST_CASE("outcome mass lower bound") {
    Rng rng(61);
    const auto psi = random_state({2, 2, 2}, rng);
    const auto prot = random_protocol(psi.dims(), 2, 3, 3, 5);
    const auto same = check_outcome_prob_lower(psi, psi, prot, 0.1);
    CHECK(same.mass == doctest::Approx(1.0));
    CHECK(same.ok);
    const auto far = random_state({2, 2, 2}, rng);
    const auto loose = check_outcome_prob_lower(psi, far, prot, 1.0);
    CHECK(loose.mass == doctest::Approx(1.0));
    CHECK(loose.ok);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto phi = perturb(psi, 0.01, rng);
        const auto m = check_outcome_prob_lower(psi, phi, random_protocol(psi.dims(), 2, 3, 3, seed), 0.1);
        CHECK(m.ok);
        CHECK(m.epsilon == doctest::Approx(infidelity(psi, phi)));
    }
    CHECK_THROWS(check_outcome_prob_lower(psi, psi, prot, 0.0));
}

TEST_CASE("max eigenvalue bound") {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2), b = Eigen::MatrixXcd::Zero(2, 2);
    a(0, 0) = 1.0;
    b(1, 1) = 1.0;
    const auto c = check_max_eig(DensityMatrix(a), DensityMatrix(b));
    CHECK(c.gap == 0.0);
    CHECK(c.trace_distance == doctest::Approx(1.0));
    CHECK(c.ok);
    Rng rng(62);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = rng.integer(2, 8);
        const DensityMatrix r(random_density(d, rng.integer(1, d), rng));
        const DensityMatrix s(random_density(d, rng.integer(1, d), rng));
        CHECK(check_max_eig(r, s).ok);
        CHECK(check_max_eig(r, r).gap == doctest::Approx(0.0).scale(1.0));
    }
}

TEST_CASE("protocol json round trip") {
    Rng rng(63);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto psi = random_state({2, 3, 2}, rng);
        const auto prot = random_protocol(psi.dims(), 3, 3, 3, seed);
        const auto back = protocol_from_json(nlohmann::json::parse(protocol_to_json(prot).dump()));
        REQUIRE(back.size() == prot.size());
        for (std::size_t s = 0; s < prot.size(); ++s) {
            CHECK(back[s].party() == prot[s].party());
            CHECK(back[s].register_map() == prot[s].register_map());
            CHECK(back[s].in_alphabet() == prot[s].in_alphabet());
            for (std::size_t y = 0; y < prot[s].kraus().size(); ++y) CHECK(back[s].kraus()[y] == prot[s].kraus()[y]);
        }
        const auto a = compose_and_discard(prot, psi);
        const auto b = compose_and_discard(back, psi);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.branches()[i].weight == b.branches()[i].weight);
    }
}
