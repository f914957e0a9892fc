#include <doctest.h>

#include "bifcalc/groupoid.hpp"

using namespace bifcalc::groupoid;

namespace {

constexpr double kTol = 1e-10;

LeafGroupoid random_groupoid(std::mt19937_64& rng, bool with_potentials, bool weighted_haar) {
    std::uniform_int_distribution<int> Ld(2, 4), Td(2, 3), ad(1, 3);
    LeafGroupoid G(Ld(rng), Td(rng), ad(rng));
    if (weighted_haar) {
        std::uniform_real_distribution<double> w(0.5, 2.0);
        for (long i = 0; i < G.haar.size(); ++i) G.haar[i] = w(rng);
    }
    if (with_potentials)
        for (auto& V : G.potential) V = random_unitary(G.fiber, rng);
    return G;
}

}  // namespace

TEST_CASE("group tables: cyclic and sym3 satisfy the axioms") {
    for (const Group& G : {Group::cyclic(4), Group::sym3()}) {
        for (int a = 0; a < G.n; ++a) {
            CHECK(G.mul(a, 0) == a);
            CHECK(G.mul(0, a) == a);
            CHECK(G.mul(a, G.inv[std::size_t(a)]) == 0);
            for (int b = 0; b < G.n; ++b)
                for (int c = 0; c < G.n; ++c)
                    CHECK(G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c)));
        }
    }
}

TEST_CASE("convolution: unit delta, involution laws, representation property") {
    std::mt19937_64 rng(41);
    for (int inst = 0; inst < 40; ++inst) {
        const auto G = random_groupoid(rng, inst % 2 == 1, inst % 3 == 2);
        const auto k1 = Kernel::random(G, rng);
        const auto k2 = Kernel::random(G, rng);
        const auto unit = Kernel::unit_delta(G);

        // k * delta = delta * k = k
        CHECK(crossed_max_diff(G, {{convolve(G, k1, unit)}}, {{k1}}) <= kTol);
        CHECK(crossed_max_diff(G, {{convolve(G, unit, k1)}}, {{k1}}) <= kTol);

        // (k1 k2)* = k2* k1*
        const auto lhs = involute(G, convolve(G, k1, k2));
        const auto rhs = convolve(G, involute(G, k2), involute(G, k1));
        CHECK(crossed_max_diff(G, {{lhs}}, {{rhs}}) <= kTol);

        // associativity
        const auto k3 = Kernel::random(G, rng);
        const auto a1 = convolve(G, convolve(G, k1, k2), k3);
        const auto a2 = convolve(G, k1, convolve(G, k2, k3));
        CHECK(crossed_max_diff(G, {{a1}}, {{a2}}) <= kTol);

        // pi(k1 k2) = pi(k1) pi(k2), pi(k*) = pi(k)*
        const Mat P = pi_rep(G, convolve(G, k1, k2));
        CHECK((P - pi_rep(G, k1) * pi_rep(G, k2)).norm() <= kTol * std::max(1.0, P.norm()));
        CHECK((pi_rep(G, involute(G, k1)) - pi_rep(G, k1).adjoint()).norm() <= kTol);
    }
}

TEST_CASE("kernel L1 norm bounds the operator norm") {
    std::mt19937_64 rng(42);
    for (int inst = 0; inst < 10; ++inst) {
        LeafGroupoid G(3, 2, 2);
        const auto k = Kernel::random(G, rng);
        CHECK(pi_rep(G, k).operatorNorm() <= k.l1_norm(G) * (1.0 + 1e-12));
    }
}

TEST_CASE("group action: axioms, unitarity, kernel action compatibility") {
    std::mt19937_64 rng(43);
    LeafGroupoid G(3, 6, 2);
    const auto A = GroupAction::cyclic_shift(G, 3);
    CHECK(A.free_on_units());
    for (int g = 0; g < 3; ++g)
        for (int h = 0; h < 3; ++h)
            for (int t = 0; t < G.T; ++t)
                CHECK(A.act_t(A.gamma.mul(g, h), t) == A.act_t(h, A.act_t(g, t)));
    for (int g = 0; g < 3; ++g) {
        const Mat U = A.unitary(G, g);
        CHECK((U * U.adjoint() - Mat::Identity(U.rows(), U.cols())).norm() <= kTol);
    }
    const Mat U1 = A.unitary(G, 1), U2 = A.unitary(G, 2);
    CHECK((U1 * U2 - A.unitary(G, A.gamma.mul(1, 2))).norm() <= kTol);

    const auto k = Kernel::random(G, rng);
    for (int g = 0; g < 3; ++g) {
        const Mat lhs = pi_rep(G, A.act(G, g, k));
        const Mat U = A.unitary(G, g);
        CHECK((lhs - U * pi_rep(G, k) * U.adjoint()).norm() <= kTol * std::max(1.0, lhs.norm()));
    }
}

TEST_CASE("crossed product: both product forms agree; associativity; involution") {
    std::mt19937_64 rng(44);
    for (const int order : {1, 2, 3, 6}) {
        for (int inst = 0; inst < 12; ++inst) {
            LeafGroupoid G(3, 2 * order, 2);
            const auto A = GroupAction::cyclic_shift(G, order);
            const auto phi = CrossedElement::random(G, A, rng);
            const auto psi = CrossedElement::random(G, A, rng);
            const auto chi = CrossedElement::random(G, A, rng);

            const auto p1 = crossed_mul(G, A, phi, psi);
            const auto p2 = crossed_mul_alt(G, A, phi, psi);
            CHECK(crossed_max_diff(G, p1, p2) <= kTol);

            const auto s1 = crossed_star(G, A, phi);
            const auto s2 = crossed_star_alt(G, A, phi);
            CHECK(crossed_max_diff(G, s1, s2) <= kTol);

            // phi** = phi
            CHECK(crossed_max_diff(G, crossed_star(G, A, s1), phi) <= kTol);

            // associativity on random triples
            const auto a1 = crossed_mul(G, A, crossed_mul(G, A, phi, psi), chi);
            const auto a2 = crossed_mul(G, A, phi, crossed_mul(G, A, psi, chi));
            CHECK(crossed_max_diff(G, a1, a2) <= kTol);

            // (phi psi)* = psi* phi*
            const auto i1 = crossed_star(G, A, p1);
            const auto i2 = crossed_mul(G, A, crossed_star(G, A, psi), crossed_star(G, A, phi));
            CHECK(crossed_max_diff(G, i1, i2) <= kTol);

            // trivial-Gamma reduction: crossed_mul with order 1 is plain convolution
            if (order == 1)
                CHECK(crossed_max_diff(G, p1, {{convolve(G, phi.at[0], psi.at[0])}}) <= kTol);
        }
    }
}

TEST_CASE("rep_pihat is an exact *-homomorphism into the entry-law carrier") {
    std::mt19937_64 rng(45);
    for (const int order : {2, 3, 4}) {
        for (int inst = 0; inst < 10; ++inst) {
            LeafGroupoid G(2, 2 * order, 2);
            const auto A = GroupAction::cyclic_shift(G, order);
            const auto phi = CrossedElement::random(G, A, rng);
            const auto psi = CrossedElement::random(G, A, rng);

            // phi = unit delta at e -> identity
            auto e = CrossedElement::zero(G, A);
            e.at[0] = Kernel::unit_delta(G);
            const Mat Ie = rep_pihat(G, A, e);
            CHECK((Ie - Mat::Identity(Ie.rows(), Ie.cols())).norm() <= kTol);

            const Mat Pphi = rep_pihat(G, A, phi), Ppsi = rep_pihat(G, A, psi);
            const Mat Pmul = rep_pihat(G, A, crossed_mul(G, A, phi, psi));
            CHECK((Pphi * Ppsi - Pmul).norm() <= kTol * std::max(1.0, Pmul.norm()));
            const Mat Pstar = rep_pihat(G, A, crossed_star(G, A, phi));
            CHECK((Pstar - Pphi.adjoint()).norm() <= kTol);

            CHECK(entry_law_defect(G, A, Pphi) <= kTol);
            CHECK(entry_law_defect(G, A, Mat(Pphi * Ppsi)) <= kTol);          // carrier closed under products
            CHECK(entry_law_defect(G, A, Mat(Pphi.adjoint())) <= kTol);       // and adjoints
        }
    }
}

TEST_CASE("entry-law carrier coincides with the commutant of the right regular representation") {
    std::mt19937_64 rng(46);
    LeafGroupoid G(2, 4, 1);
    const auto A = GroupAction::cyclic_shift(G, 4);
    const long dim = 4 * G.hilbert_dim();
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int inst = 0; inst < 20; ++inst) {
        Mat M(dim, dim);
        for (long i = 0; i < dim; ++i)
            for (long j = 0; j < dim; ++j) M(i, j) = std::complex<double>(gauss(rng), gauss(rng));
        // averaged matrix is in the commutant and satisfies the entry law
        const Mat Mbar = commutant_average(G, A, M);
        for (int h = 0; h < 4; ++h) {
            const Mat R = right_regular(G, A, h);
            CHECK((R * Mbar - Mbar * R).norm() <= kTol * std::max(1.0, Mbar.norm()));
        }
        CHECK(entry_law_defect(G, A, Mbar) <= kTol * std::max(1.0, Mbar.norm()));
        // and conversely entry-law members commute with R
        const auto phi = CrossedElement::random(G, A, rng);
        const Mat P = rep_pihat(G, A, phi);
        for (int h = 0; h < 4; ++h) {
            const Mat R = right_regular(G, A, h);
            CHECK((R * P - P * R).norm() <= kTol * std::max(1.0, P.norm()));
        }
    }
}

TEST_CASE("TR: positivity, faithfulness, traciality, lift and pairing formulas") {
    std::mt19937_64 rng(47);
    for (int inst = 0; inst < 30; ++inst) {
        LeafGroupoid G(2, 4, 2);
        const auto A = GroupAction::cyclic_shift(G, 2);
        const auto phi = CrossedElement::random(G, A, rng);
        const Mat S = rep_pihat(G, A, phi);

        // TR(S*S) = TR(SS*) >= 0; zero only for S = 0
        const double a = trace_TR(G, A, Mat(S.adjoint() * S));
        const double b = trace_TR(G, A, Mat(S * S.adjoint()));
        CHECK(a >= 0.0);
        CHECK(std::abs(a - b) <= kTol * std::max(1.0, a));
        if (S.norm() > 1e-8) CHECK(a > 0.0);

        // lift: TR(T0 lifted) = Tr(T0)
        const long H = G.hilbert_dim();
        Mat T0(H, H);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (long i = 0; i < H; ++i)
            for (long j = 0; j < H; ++j) T0(i, j) = std::complex<double>(gauss(rng), gauss(rng));
        CHECK(std::abs(trace_TR(G, A, lift_rtimes(G, A, T0)) - T0.trace().real()) <= kTol);

        // TR(pihat(phi) T) = sum_g Tr(pi(phi_g) (g . T_{g^{-1}})) on a random carrier element
        const auto psi = CrossedElement::random(G, A, rng);
        const Mat T = rep_pihat(G, A, psi);
        const double lhs = trace_TR(G, A, Mat(S * T));
        double rhs = 0.0;
        for (int g = 0; g < A.gamma.n; ++g) {
            const int gi = A.gamma.inv[std::size_t(g)];
            // T_{g^{-1}} as an operator: T_{g^{-1}, e} U_{g^{-1}}^{-1}; g . X = U_g X U_g^*
            const Mat Tg = T.block(gi * H, 0, H, H) * A.unitary(G, gi).adjoint();
            const Mat Ug = A.unitary(G, g);
            rhs += (pi_rep(G, phi.at[std::size_t(g)]) * Ug * Tg * Ug.adjoint()).trace().real();
        }
        CHECK(std::abs(lhs - rhs) <= kTol * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("lift_rtimes: resolvent compatibility and spectral projections in the carrier") {
    std::mt19937_64 rng(48);
    LeafGroupoid G(2, 4, 2);
    const auto A = GroupAction::cyclic_shift(G, 4);
    const long H = G.hilbert_dim();
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat D(H, H);
    for (long i = 0; i < H; ++i)
        for (long j = 0; j < H; ++j) D(i, j) = std::complex<double>(gauss(rng), gauss(rng));
    D = Mat(0.5 * (D + D.adjoint()));

    const Mat Dl = lift_rtimes(G, A, D);
    CHECK((Dl - Mat::Identity(Dl.rows(), Dl.cols())).norm() > 0);  // sanity
    // identity lifts to identity
    CHECK((lift_rtimes(G, A, Mat::Identity(H, H)) - Mat::Identity(4 * H, 4 * H)).norm() == 0.0);

    const std::complex<double> I(0, 1);
    const Mat lhs = (Dl + I * Mat::Identity(4 * H, 4 * H)).inverse();
    const Mat rhs = lift_rtimes(G, A, Mat((D + I * Mat::Identity(H, H)).inverse()));
    CHECK((lhs - rhs).norm() <= 1e-9 * rhs.norm());

    // spectral projections of |D_rt| belong to the carrier
    Eigen::SelfAdjointEigenSolver<Mat> es(D);
    Mat proj = Mat::Zero(H, H);
    for (long i = 0; i < H; ++i)
        if (std::abs(es.eigenvalues()[i]) > 1.0)
            proj += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    CHECK(entry_law_defect(G, A, lift_rtimes(G, A, proj)) <= kTol);

    // commutator bound ||[pihat(phi), D_rt]|| <= sum_k ||[pi(phi_k), D]|| for invariant D
    Mat Dinv = Mat::Zero(H, H);
    for (int g = 0; g < 4; ++g) {
        const Mat U = A.unitary(G, g);
        Dinv += U * D * U.adjoint();
    }
    Dinv /= 4.0;
    const auto phi = CrossedElement::random(G, A, rng);
    const Mat C = rep_pihat(G, A, phi) * lift_rtimes(G, A, Dinv) -
                  lift_rtimes(G, A, Dinv) * rep_pihat(G, A, phi);
    double bound = 0.0;
    for (int g = 0; g < 4; ++g) {
        const Mat Pk = pi_rep(G, phi.at[std::size_t(g)]);
        bound += (Pk * Dinv - Dinv * Pk).operatorNorm();
    }
    CHECK(C.operatorNorm() <= bound * (1.0 + 1e-12));
}

TEST_CASE("covering morphism: *-homomorphism, exact, with L1 contraction") {
    std::mt19937_64 rng(49);
    for (int inst = 0; inst < 25; ++inst) {
        std::uniform_int_distribution<int> Ld(2, 4), cd(2, 4);
        LeafGroupoid G(Ld(rng), 2, 2);
        const Group Lambda = Group::cyclic(cd(rng));
        auto rand_cover = [&] {
            CoverKernel k;
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (int i = 0; i < G.T * Lambda.n; ++i) {
                Mat b(G.L * G.fiber, G.L * G.fiber);
                for (long r = 0; r < b.rows(); ++r)
                    for (long c = 0; c < b.cols(); ++c)
                        b(r, c) = std::complex<double>(gauss(rng), gauss(rng));
                k.blocks.push_back(b);
            }
            return k;
        };
        const auto k1 = rand_cover(), k2 = rand_cover();
        // phi(k1 k2) = phi(k1) phi(k2)
        const auto lhs = cover_pushforward(G, Lambda, cover_convolve(G, Lambda, k1, k2));
        const auto rhs = convolve(G, cover_pushforward(G, Lambda, k1), cover_pushforward(G, Lambda, k2));
        CHECK(crossed_max_diff(G, {{lhs}}, {{rhs}}) <= kTol);
        // phi(k*) = phi(k)*
        const auto li = cover_pushforward(G, Lambda, cover_involute(G, Lambda, k1));
        const auto ri = involute(G, cover_pushforward(G, Lambda, k1));
        CHECK(crossed_max_diff(G, {{li}}, {{ri}}) <= kTol);
        // ||phi(k)||_1 <= ||k||_1
        CHECK(cover_pushforward(G, Lambda, k1).l1_norm(G) <=
              cover_l1_norm(G, Lambda, k1) * (1.0 + 1e-12));
    }
}
