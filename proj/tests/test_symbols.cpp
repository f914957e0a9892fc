#include <doctest.h>

#include "bifcalc/quantize.hpp"
#include "bifcalc/symbol.hpp"

using namespace bifcalc;
using symbols::Symbol;
using symbols::SymbolArgs;
using symbols::SymbolKind;

namespace {

Symbol constant_one() {
    Symbol s;
    s.kind = SymbolKind::Multiplier;
    s.eval = [](const SymbolArgs&) { return symbols::Mat::Identity(1, 1); };
    s.declared_order = {0.0, 0.0};
    return s;
}

Symbol model_amplitude(double m, double l) {
    // full-amplitude view of the model symbol (z,x,y-independent)
    Symbol s;
    s.kind = SymbolKind::FullAmplitude;
    s.declared_order = {m, l};
    s.eval = [m, l](const SymbolArgs& a) {
        const double z2 = a.xi.zeta.squaredNorm();
        const double v2 = a.xi.eta_v.squaredNorm();
        const double n2 = a.xi.eta_n.squaredNorm();
        const double s2 = a.sigma.squaredNorm();
        const double val = std::pow(1.0 + (z2 + v2) * (z2 + v2) + n2, m / 4.0) * std::pow(1.0 + s2, l / 2.0);
        return symbols::Mat(val * symbols::Mat::Identity(1, 1));
    };
    return s;
}

Symbol hnorm_power(double m, double lower_coeff) {
    // |eta|'^m + lower_coeff |eta|'^{m-1}, regularized at 0
    Symbol s;
    s.kind = SymbolKind::Multiplier;
    s.declared_order = {m, 0.0};
    s.eval = [m, lower_coeff](const SymbolArgs& a) {
        const double h = aniso::hnorm(a.xi);
        const double val = std::pow(1e-12 + h, m) + lower_coeff * std::pow(1e-12 + h, m - 1.0);
        return symbols::Mat(val * symbols::Mat::Identity(1, 1));
    };
    return s;
}

}  // namespace

TEST_CASE("verify_estimate: constant symbol at order (0,0)") {
    aniso::AnisoSpace sp(1, 1, 1);
    const auto rep = symbols::verify_estimate(constant_one(), {0.0, 0.0}, sp, 2, 8);
    CHECK(rep.pass);
    CHECK(rep.worst_ratio == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("verify_estimate: model symbol passes at its order, fails one below") {
    aniso::AnisoSpace sp(1, 1, 1);
    const auto good = symbols::verify_estimate(model_amplitude(2.0, -1.0), {2.0, -1.0}, sp, 2, 8);
    CHECK(good.pass);

    // declared (m-1, l): ratio grows ~ R, growth factor ~ 2 per shell
    const auto bad = symbols::verify_estimate(model_amplitude(2.0, -1.0), {1.0, -1.0}, sp, 2, 8);
    CHECK_FALSE(bad.pass);
    CHECK(bad.growth_factor > 1.5);
}

TEST_CASE("principal_part: homogeneous fixed point and lower-order stripping") {
    aniso::AnisoSpace sp(0, 1, 1);
    SymbolArgs a;
    a.xi.zeta = Eigen::VectorXd::Zero(0);
    a.xi.eta_v = Eigen::VectorXd::Constant(1, 0.8);
    a.xi.eta_n = Eigen::VectorXd::Constant(1, 1.3);

    // exactly homogeneous: principal part is the symbol itself
    auto hom = hnorm_power(1.5, 0.0);
    auto p1 = symbols::principal_part(hom, 1.5);
    CHECK(std::abs(p1(a)(0, 0) - hom(a)(0, 0)) <= 1e-9 * std::abs(hom(a)(0, 0)));

    // |eta|'^m + |eta|'^{m-1}: leading term within 1e-6
    auto mix = hnorm_power(1.5, 1.0);
    auto p2 = symbols::principal_part(mix, 1.5);
    const double expect = std::pow(aniso::hnorm(a.xi), 1.5);
    CHECK(std::abs(p2(a)(0, 0) - expect) <= 1e-6 * expect);

    // model A_{m,0} symbol: principal part equals ((|zeta|^2+|eta_v|^2)^2+|eta_n|^2)^{m/4}
    Symbol mo;
    mo.kind = SymbolKind::Multiplier;
    mo.declared_order = {2.0, 0.0};
    mo.eval = [](const SymbolArgs& a2) {
        const double v2 = a2.xi.eta_v.squaredNorm(), n2 = a2.xi.eta_n.squaredNorm();
        const double z2 = a2.xi.zeta.squaredNorm();
        return symbols::Mat(std::pow(1.0 + (z2 + v2) * (z2 + v2) + n2, 0.5) *
                            symbols::Mat::Identity(1, 1));
    };
    auto p3 = symbols::principal_part(mo, 2.0);
    const double v2 = a.xi.eta_v.squaredNorm(), n2 = a.xi.eta_n.squaredNorm();
    const double expect3 = std::pow(v2 * v2 + n2, 0.5);
    CHECK(std::abs(p3(a)(0, 0) - expect3) <= 1e-6 * expect3);

    // wrong degree: the extrapolation refuses
    CHECK_THROWS(symbols::principal_part(hom, 0.5)(a));

    // zero symbol: zero principal part of the requested degree
    Symbol z;
    z.kind = SymbolKind::Multiplier;
    z.eval = [](const SymbolArgs&) { return symbols::Mat(symbols::Mat::Zero(1, 1)); };
    auto pz = symbols::principal_part(z, 1.0);
    CHECK(pz(a)(0, 0) == std::complex<double>(0.0));
}

TEST_CASE("principal_part is idempotent") {
    aniso::AnisoSpace sp(0, 1, 1);
    auto mix = hnorm_power(1.0, 0.7);
    auto p = symbols::principal_part(mix, 1.0);
    Symbol again;
    again.kind = p.kind;
    again.declared_order = {1.0, 0.0};
    symbols::PrincipalSymbol cap = p;
    again.eval = [cap](const SymbolArgs& a2) { return cap(a2); };
    auto pp = symbols::principal_part(again, 1.0);
    SymbolArgs a;
    a.xi.zeta = Eigen::VectorXd::Zero(0);
    a.xi.eta_v = Eigen::VectorXd::Constant(1, -0.4);
    a.xi.eta_n = Eigen::VectorXd::Constant(1, 2.0);
    CHECK(std::abs(pp(a)(0, 0) - p(a)(0, 0)) <= 1e-8 * std::abs(p(a)(0, 0)));
}

namespace {

symbols::PrincipalSymbol leaf_kernel_symbol(double m, double freq_weight_v, double freq_weight_n,
                                            double kernel_width) {
    // separable reduced-amplitude principal symbol: g(x-x') * h_m(eta)
    symbols::PrincipalSymbol s;
    s.kind = SymbolKind::ReducedAmplitude;
    s.degree = m;
    s.fiber_dim = 1;
    s.eval = [m, freq_weight_v, freq_weight_n, kernel_width](const SymbolArgs& a) {
        const double d = a.x[0] - a.x2[0];
        const double g = std::exp(-d * d / (2.0 * kernel_width * kernel_width));
        const double h4 = freq_weight_v * std::pow(a.xi.eta_v.squaredNorm(), 2) +
                          freq_weight_n * a.xi.eta_n.squaredNorm();
        return symbols::Mat(g * std::pow(h4, m / 4.0) * symbols::Mat::Identity(1, 1));
    };
    return s;
}

}  // namespace

TEST_CASE("compose_principal: delta is the unit of leaf convolution") {
    symbols::LeafGrid leaf{1, 8, 1.0 / 8.0};
    auto s1 = leaf_kernel_symbol(-1.0, 1.0, 1.0, 0.4);

    symbols::PrincipalSymbol delta;
    delta.kind = SymbolKind::ReducedAmplitude;
    delta.degree = 0.0;
    delta.fiber_dim = 1;
    delta.eval = [&leaf](const SymbolArgs& a) {
        const bool diag = std::abs(a.x[0] - a.x2[0]) < 1e-12;
        return symbols::Mat((diag ? 1.0 / leaf.spacing : 0.0) * symbols::Mat::Identity(1, 1));
    };

    auto comp = symbols::compose_principal(s1, delta, leaf, symbols::Holonomy::identity(1, 1));
    SymbolArgs a;
    a.x = Eigen::VectorXd::Constant(1, 2.0 / 8.0);
    a.x2 = Eigen::VectorXd::Constant(1, 5.0 / 8.0);
    a.xi.zeta = Eigen::VectorXd::Zero(0);
    a.xi.eta_v = Eigen::VectorXd::Constant(1, 1.0);
    a.xi.eta_n = Eigen::VectorXd::Constant(1, 0.5);
    CHECK(std::abs(comp(a)(0, 0) - s1(a)(0, 0)) <= 1e-12 * std::abs(s1(a)(0, 0)));
    CHECK(comp.degree == doctest::Approx(-1.0));
}

TEST_CASE("compose_principal: holonomy transport keeps only the top-degree part") {
    symbols::LeafGrid leaf{1, 8, 1.0 / 8.0};
    // s1 depends only on eta_n
    auto s1 = leaf_kernel_symbol(-2.0, 0.0, 1.0, 0.5);
    auto s2 = leaf_kernel_symbol(-1.0, 1.0, 1.0, 0.5);

    symbols::Holonomy hol = symbols::Holonomy::identity(1, 1);
    hol.A_nv(0, 0) = 0.7;  // nontrivial off-diagonal: must be dropped
    hol.A_nn(0, 0) = 1.3;

    auto with_offdiag = symbols::compose_principal(s2, s1, leaf, hol);
    symbols::Holonomy hol2 = hol;
    hol2.A_nv(0, 0) = 0.0;
    auto without = symbols::compose_principal(s2, s1, leaf, hol2);

    SymbolArgs a;
    a.x = Eigen::VectorXd::Constant(1, 0.25);
    a.x2 = Eigen::VectorXd::Constant(1, 0.5);
    a.xi.zeta = Eigen::VectorXd::Zero(0);
    a.xi.eta_v = Eigen::VectorXd::Constant(1, 2.0);
    a.xi.eta_n = Eigen::VectorXd::Constant(1, 1.5);
    CHECK(std::abs(with_offdiag(a)(0, 0) - without(a)(0, 0)) <= 1e-13 * std::abs(without(a)(0, 0)));
}

TEST_CASE("commutator degree drop: scalar s1 with invariant transport") {
    symbols::LeafGrid leaf{1, 8, 1.0 / 8.0};
    // scalar frequency-only symbol as a leafwise delta times p(eta)
    symbols::PrincipalSymbol s1;
    s1.kind = SymbolKind::ReducedAmplitude;
    s1.degree = 1.0;
    s1.fiber_dim = 1;
    s1.eval = [&leaf](const SymbolArgs& a) {
        const bool diag = std::abs(a.x[0] - a.x2[0]) < 1e-12;
        const double p = std::pow(std::pow(a.xi.eta_v.squaredNorm(), 2) + a.xi.eta_n.squaredNorm(), 0.25);
        return symbols::Mat((diag ? p / leaf.spacing : 0.0) * symbols::Mat::Identity(1, 1));
    };
    auto s2 = leaf_kernel_symbol(-1.0, 1.0, 2.0, 0.5);

    const auto hol = symbols::Holonomy::identity(1, 1);
    auto ab = symbols::compose_principal(s1, s2, leaf, hol);
    auto ba = symbols::compose_principal(s2, s1, leaf, hol);

    SymbolArgs a;
    a.x = Eigen::VectorXd::Constant(1, 0.125);
    a.x2 = Eigen::VectorXd::Constant(1, 0.75);
    a.xi.zeta = Eigen::VectorXd::Zero(0);
    a.xi.eta_v = Eigen::VectorXd::Constant(1, 1.2);
    a.xi.eta_n = Eigen::VectorXd::Constant(1, -0.9);
    const double scale = std::abs(ab(a)(0, 0));
    CHECK(std::abs(ab(a)(0, 0) - ba(a)(0, 0)) <= 1e-6 * scale);
}

TEST_CASE("homogeneity invariant of PrincipalSymbol under dilation") {
    auto s = leaf_kernel_symbol(-1.5, 1.0, 1.0, 0.5);
    SymbolArgs a;
    a.x = Eigen::VectorXd::Constant(1, 0.25);
    a.x2 = Eigen::VectorXd::Constant(1, 0.5);
    a.xi.zeta = Eigen::VectorXd::Zero(0);
    a.xi.eta_v = Eigen::VectorXd::Constant(1, 1.0);
    a.xi.eta_n = Eigen::VectorXd::Constant(1, 1.0);
    for (double lam : {1.0, 2.0, 4.0, 16.0}) {
        SymbolArgs b = a;
        b.xi = aniso::dilate(lam, a.xi);
        const double lhs = std::abs(s(b)(0, 0));
        const double rhs = std::pow(lam, s.degree) * std::abs(s(a)(0, 0));
        CHECK(std::abs(lhs - rhs) <= 1e-8 * rhs);
    }
}
