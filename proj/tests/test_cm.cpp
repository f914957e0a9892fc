#include <doctest.h>

#include "bifcalc/cm.hpp"
#include "bifcalc/sobolev.hpp"

using namespace bifcalc;
using torus::LinOp;
using torus::TorusGrid;

TEST_CASE("FormBundle: CAR relations and gradings") {
    for (auto [v, n] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}}) {
        cm::FormBundle fb(v, n);
        const int d = fb.dim();
        CHECK(d == (1 << (v + n)));
        std::vector<cm::Mat> gens;
        for (int j = 0; j < v; ++j) gens.push_back(fb.ext_v(j));
        for (int j = 0; j < n; ++j) gens.push_back(fb.ext_n(j));
        for (std::size_t a = 0; a < gens.size(); ++a)
            for (std::size_t b = 0; b < gens.size(); ++b) {
                const cm::Mat anti = gens[a] * gens[b] + gens[b] * gens[a];
                CHECK(anti.norm() <= 1e-14);  // e e' + e' e = 0
                const cm::Mat car = gens[a] * gens[b].adjoint() + gens[b].adjoint() * gens[a];
                const cm::Mat expect =
                    (a == b) ? cm::Mat(cm::Mat::Identity(d, d)) : cm::Mat(cm::Mat::Zero(d, d));
                CHECK((car - expect).norm() <= 1e-14);  // {e_i, e_j*} = delta_ij
            }
        const cm::Mat gn = fb.gamma_n();
        CHECK((gn * gn - cm::Mat::Identity(d, d)).norm() == 0.0);
        for (int b = 0; b < d; ++b) CHECK(std::abs(std::abs(gn(b, b).real()) - 1.0) == 0.0);
    }
}

TEST_CASE("build_cm_complex: zero frequency, v=1/n=0 eigenvalues, exact relations") {
    // v=1, n=0: Q_V eigenvalues +-|eta_v|^2 on the two form degrees
    {
        TorusGrid g(aniso::AnisoSpace(0, 1, 0), 8, 2);
        auto ops = cm::build_cm_complex(g);
        for (long t = 0; t < g.transverse_points(); ++t) {
            const auto xi = g.transverse_covector(t);
            const cm::Mat qv = ops.QV.block_at(0, t);
            const double e = xi.eta_v.squaredNorm();
            CHECK(std::abs(qv(0, 0).real() + e) <= 1e-13 * std::max(1.0, e));  // deg 0: -|eta_v|^2
            CHECK(std::abs(qv(1, 1).real() - e) <= 1e-13 * std::max(1.0, e));  // deg 1: +|eta_v|^2
        }
    }

    TorusGrid g(aniso::AnisoSpace(1, 1, 1), 8, 4);
    auto ops = cm::build_cm_complex(g);

    // zero-frequency block: everything vanishes
    CHECK(ops.dV.block_at(0, 0).norm() == 0.0);
    CHECK(ops.dN.block_at(0, 0).norm() == 0.0);
    CHECK(ops.Q.block_at(0, 0).norm() == 0.0);

    double worst_dv2 = 0.0, worst_dn2 = 0.0, worst_sa = 0.0, worst_qv = 0.0, worst_q4 = 0.0;
    for (long t = 0; t < g.transverse_points(); ++t) {
        const auto xi = g.transverse_covector(t);
        const cm::Mat dv = ops.dV.block_at(0, t), dn = ops.dN.block_at(0, t);
        const cm::Mat q = ops.Q.block_at(0, t);
        worst_dv2 = std::max(worst_dv2, (dv * dv).norm());
        worst_dn2 = std::max(worst_dn2, (dn * dn).norm());
        worst_sa = std::max(worst_sa, (q - q.adjoint()).norm());
        const cm::Mat qv = ops.QV.block_at(0, t);
        const cm::Mat qv_expect = dv * dv.adjoint() - dv.adjoint() * dv;
        worst_qv = std::max(worst_qv, (qv - qv_expect).norm());
        // Q^2 = (|eta_v|^4 + |eta_n|^2) Id at v = n = 1
        const double target = std::pow(xi.eta_v.squaredNorm(), 2) + xi.eta_n.squaredNorm();
        worst_q4 = std::max(worst_q4, (q * q - target * cm::Mat::Identity(4, 4)).norm() /
                                          std::max(1.0, target));
    }
    CHECK(worst_dv2 == 0.0);  // d_V^2 = 0 exactly
    CHECK(worst_dn2 == 0.0);
    CHECK(worst_sa == 0.0);   // ||Q - Q*|| = 0 exactly
    CHECK(worst_qv == 0.0);
    CHECK(worst_q4 <= 1e-12);
}

TEST_CASE("dsign scalar map: quadrature vs closed form") {
    CHECK(cm::dsign_scalar(0.0, cm::DsignMethod::Quadrature) == 0.0);
    CHECK(cm::dsign_scalar(4.0, cm::DsignMethod::ClosedForm) == doctest::Approx(2.0));
    CHECK(cm::dsign_scalar(-9.0, cm::DsignMethod::ClosedForm) == doctest::Approx(-3.0));
    for (double q : {4.0, -9.0, 0.03, -17.5, 256.0}) {
        const double a = cm::dsign_scalar(q, cm::DsignMethod::Quadrature);
        const double b = cm::dsign_scalar(q, cm::DsignMethod::ClosedForm);
        CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
    }
}

TEST_CASE("dsign operator: methods agree, D self-adjoint, order (1,0) behavior") {
    TorusGrid g(aniso::AnisoSpace(1, 1, 1), 8, 4);
    auto ops = cm::build_cm_complex(g);
    const LinOp D1 = cm::dsign(ops, cm::DsignMethod::ClosedForm);
    const LinOp D2 = cm::dsign(ops, cm::DsignMethod::Quadrature);
    double worst = 0.0, worst_sa = 0.0;
    for (long t = 0; t < g.transverse_points(); ++t) {
        const cm::Mat b1 = D1.block_at(0, t), b2 = D2.block_at(0, t);
        worst = std::max(worst, (b1 - b2).norm() / std::max(1.0, b1.norm()));
        worst_sa = std::max(worst_sa, (b1 - b1.adjoint()).norm());
    }
    CHECK(worst <= 1e-6);
    CHECK(worst_sa <= 1e-10);

    // D behaves as bi-order (1,0): the conjugated norm is uniformly bounded
    // (by 1 exactly, |D| = |eta|') and stabilizes under doubling
    double prev = -1;
    for (int N : {8, 16, 32}) {
        TorusGrid gn(aniso::AnisoSpace(1, 1, 1), N, 4);
        const LinOp D = cm::dsign(cm::build_cm_complex(gn), cm::DsignMethod::ClosedForm);
        const double nn = sobolev::op_norm_between(D, 1.0, 0.0, 0.0, 0.0);
        CHECK(nn <= 1.0 + 1e-10);
        if (N == 32) CHECK(nn <= 1.06 * prev);
        prev = nn;
    }
}

TEST_CASE("transverse_symbol_check at N=16, v=n=1 and negative control") {
    TorusGrid g(aniso::AnisoSpace(1, 1, 1), 16, 4);
    auto ops = cm::build_cm_complex(g);
    const LinOp D = cm::dsign(ops, cm::DsignMethod::ClosedForm);
    const auto chk = cm::transverse_symbol_check(D, g, 1e-8);
    CHECK(chk.pass);
    CHECK(chk.frequencies_checked > 0);

    // D^4 at frequency (eta_v, eta_n) = (1, 0): eigenvalue 1
    for (long t = 0; t < g.transverse_points(); ++t) {
        const auto xi = g.transverse_covector(t);
        if (xi.eta_v[0] == 1.0 && xi.eta_n[0] == 0.0) {
            const cm::Mat d = D.block_at(0, t);
            const cm::Mat d4 = d * d * d * d;
            CHECK((d4 - cm::Mat::Identity(4, 4)).norm() <= 1e-10);
        }
    }

    // negative control: perturbed Q breaks the scalar-D^2 property and is flagged
    auto bad_ops = ops;
    const long T = g.transverse_points();
    std::vector<cm::Mat> blocks;
    for (long t = 0; t < T; ++t) {
        cm::Mat b = ops.Q.block_at(0, t);
        b(0, 1) += 0.05 * aniso::hnorm(g.transverse_covector(t)) *
                   aniso::hnorm(g.transverse_covector(t));
        b(1, 0) += 0.05 * aniso::hnorm(g.transverse_covector(t)) *
                   aniso::hnorm(g.transverse_covector(t));
        blocks.push_back(b);
    }
    bad_ops.Q = LinOp::block_multiplier(g, std::move(blocks), true, {2.0, 0.0});
    const LinOp Dbad = cm::dsign(bad_ops, cm::DsignMethod::ClosedForm);
    CHECK_FALSE(cm::transverse_symbol_check(Dbad, g, 1e-8).pass);
}
