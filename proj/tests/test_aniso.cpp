#include <doctest.h>

#include <random>

#include "bifcalc/aniso.hpp"

using namespace bifcalc;

namespace {

aniso::Covector random_covector(const aniso::AnisoSpace& sp, std::mt19937_64& rng, double scale = 5.0) {
    std::normal_distribution<double> g(0.0, scale);
    aniso::Covector xi;
    xi.zeta.resize(sp.p);
    xi.eta_v.resize(sp.v);
    xi.eta_n.resize(sp.n);
    for (int i = 0; i < sp.p; ++i) xi.zeta[i] = g(rng);
    for (int i = 0; i < sp.v; ++i) xi.eta_v[i] = g(rng);
    for (int i = 0; i < sp.n; ++i) xi.eta_n[i] = g(rng);
    return xi;
}

}  // namespace

TEST_CASE("dilate: identity, direct formula, group law") {
    aniso::AnisoSpace sp(1, 1, 1);
    std::mt19937_64 rng(1);
    aniso::Covector xi = random_covector(sp, rng);
    auto same = aniso::dilate(1.0, xi);
    CHECK(same.zeta == xi.zeta);
    CHECK(same.eta_n == xi.eta_n);

    aniso::Covector one;
    one.zeta = Eigen::VectorXd::Ones(1);
    one.eta_v = Eigen::VectorXd::Ones(1);
    one.eta_n = Eigen::VectorXd::Ones(1);
    auto two = aniso::dilate(2.0, one);
    CHECK(two.zeta[0] == 2.0);
    CHECK(two.eta_v[0] == 2.0);
    CHECK(two.eta_n[0] == 4.0);

    for (int i = 0; i < 50; ++i) {
        std::uniform_real_distribution<double> u(0.1, 8.0);
        const double l = u(rng), m = u(rng);
        auto a = aniso::dilate(l, aniso::dilate(m, xi));
        auto b = aniso::dilate(l * m, xi);
        CHECK((a.zeta - b.zeta).norm() <= 1e-12 * b.zeta.norm());
        CHECK((a.eta_n - b.eta_n).norm() <= 1e-12 * b.eta_n.norm());
    }
    CHECK_THROWS(aniso::dilate(0.0, xi));
    CHECK_THROWS(aniso::dilate(-1.0, xi));
}

TEST_CASE("hnorm: zero, direct value, dyadic homogeneity exact") {
    Eigen::VectorXd z0 = Eigen::VectorXd::Zero(1);
    CHECK(aniso::hnorm(z0, z0) == 0.0);

    // |eta_v| = 2, |eta_n| = 3 -> (16+9)^{1/4} = 5^{1/2}
    Eigen::VectorXd ev = Eigen::VectorXd::Constant(1, 2.0);
    Eigen::VectorXd en = Eigen::VectorXd::Constant(1, 3.0);
    CHECK(aniso::hnorm(ev, en) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));

    aniso::AnisoSpace sp(1, 2, 1);
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> exp_d(-8, 8);
    for (int i = 0; i < 10000; ++i) {
        const auto xi = random_covector(sp, rng);
        const double lambda = std::ldexp(1.0, exp_d(rng));  // powers of two: exact scaling
        CHECK(aniso::hnorm(aniso::dilate(lambda, xi)) == lambda * aniso::hnorm(xi));
    }
    // general lambda at machine-precision tolerance
    std::uniform_real_distribution<double> u(0.01, 100.0);
    for (int i = 0; i < 10000; ++i) {
        const auto xi = random_covector(sp, rng);
        const double lambda = u(rng);
        const double lhs = aniso::hnorm(aniso::dilate(lambda, xi));
        const double rhs = lambda * aniso::hnorm(xi);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs));
    }
}

TEST_CASE("norm comparison (1+|xi|)^{1/2} <= 2(1+|xi|') <= 4(1+|xi|)") {
    std::mt19937_64 rng(3);
    for (const auto& sp : {aniso::AnisoSpace(1, 1, 1), aniso::AnisoSpace(0, 2, 1), aniso::AnisoSpace(2, 1, 2)}) {
        for (int i = 0; i < 10000; ++i) {
            const auto xi = random_covector(sp, rng, i % 2 ? 0.5 : 50.0);
            const double e = aniso::euclid_norm(xi);
            const double a = aniso::xi_norm(xi);
            CHECK(std::sqrt(1.0 + e) <= 2.0 * (1.0 + a) * (1.0 + 1e-14));
            CHECK(2.0 * (1.0 + a) <= 4.0 * (1.0 + e) * (1.0 + 1e-14));
        }
    }
}

TEST_CASE("weighted_order conventions") {
    aniso::AnisoSpace sp(1, 1, 1);
    CHECK(aniso::weighted_order({0, 0, 0}, sp) == 0);
    CHECK(aniso::weighted_order({1, 0, 2}, sp) == 5);
    aniso::AnisoSpace sp2(0, 1, 1);
    CHECK(aniso::weighted_order({1, 2}, sp2, aniso::OrderConvention::EtaOnly) == 5);
    CHECK_THROWS(aniso::weighted_order({1, 2}, sp));
    CHECK_THROWS(aniso::weighted_order({1, -1, 0}, sp));
}

TEST_CASE("aniso_ball: lattice gap, n-axis square range, cardinality exponent") {
    aniso::AnisoSpace sp1(1, 1, 1);
    CHECK(aniso::aniso_ball(sp1, 0.99).size() == 1);  // only the zero frequency

    // p = v = 0, n = 1, R = 2: |eta_n|' = |eta_n|^{1/2} <= 2 -> {-4..4}
    aniso::AnisoSpace spn(0, 0, 1);
    const auto ball = aniso::aniso_ball(spn, 2.0);
    CHECK(ball.size() == 9);
    CHECK(ball.front().eta_n[0] == -4.0);
    CHECK(ball.back().eta_n[0] == 4.0);

    // growth exponent ~ p + v + 2n over R in {4, 8, 16, 32}
    std::vector<double> lr, lc;
    for (double R : {4.0, 8.0, 16.0, 32.0}) {
        lr.push_back(std::log(R));
        lc.push_back(std::log(double(aniso::aniso_ball_count(sp1, R))));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lr.size(); ++i) {
        sx += lr[i]; sy += lc[i]; sxx += lr[i] * lr[i]; sxy += lr[i] * lc[i];
    }
    const double slope = (4.0 * sxy - sx * sy) / (4.0 * sxx - sx * sx);
    CHECK(slope == doctest::Approx(4.0).epsilon(0.15 / 4.0));

    CHECK_THROWS(aniso::aniso_ball(sp1, 1e6));  // cap guard
}

TEST_CASE("BiOrder: -inf absorbs in the leaf slot") {
    auto s = aniso::BiOrder::smoothing(-2.0);
    auto sum = s + aniso::BiOrder{1.0, 5.0};
    CHECK(sum.m == -1.0);
    CHECK(sum.leaf_smoothing());
}
