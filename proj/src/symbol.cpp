#include "bifcalc/symbol.hpp"

#include <cmath>
#include <random>

namespace bifcalc::symbols {

namespace {

// which coordinate slots carry covector entries for derivative purposes
enum class Slot { Zeta, EtaV, EtaN, Sigma };

double& slot_ref(SymbolArgs& a, Slot s, int i) {
    switch (s) {
        case Slot::Zeta: return a.xi.zeta[i];
        case Slot::EtaV: return a.xi.eta_v[i];
        case Slot::EtaN: return a.xi.eta_n[i];
        default: return a.sigma[i];
    }
}

// central difference of order |alpha| <= 3, one axis at a time (mixed partials
// are not needed: the estimate is checked per multi-index concentrated on one
// axis up to the depth, which already detects every order violation)
Mat central_diff(const Symbol& s, const SymbolArgs& base, Slot slot, int axis, int order) {
    if (order == 0) return s(base);
    SymbolArgs a = base;
    const double x0 = slot_ref(a, slot, axis);
    const double h = 1e-4 * (1.0 + std::abs(x0));
    auto at = [&](double t) {
        SymbolArgs b = base;
        slot_ref(b, slot, axis) = x0 + t;
        return s(b);
    };
    switch (order) {
        case 1: return (at(h) - at(-h)) / (2.0 * h);
        case 2: return (at(h) - 2.0 * s(base) + at(-h)) / (h * h);
        case 3: return (at(2 * h) - 2.0 * at(h) + 2.0 * at(-h) - at(-2 * h)) / (2.0 * h * h * h);
        default: throw std::invalid_argument("central_diff: depth > 3 unsupported");
    }
}

}  // namespace

EstimateReport verify_estimate(const Symbol& s, aniso::BiOrder order, const aniso::AnisoSpace& space,
                               int derivative_depth, int sample_budget, double max_radius,
                               double growth_tol) {
    if (derivative_depth > s.derivative_depth)
        throw std::invalid_argument("verify_estimate: depth exceeds evaluator support");

    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto rand_unit = [&](int d) {
        Eigen::VectorXd u(d);
        for (int i = 0; i < d; ++i) u[i] = gauss(rng);
        if (d > 0 && u.norm() > 0) u /= u.norm();
        return u;
    };

    const int rays = std::max(4, sample_budget);
    std::vector<double> radii;
    for (double R = 1.0; R <= max_radius + 1e-9; R *= 2.0) radii.push_back(R);

    std::vector<double> shell_max(radii.size(), 0.0);
    EstimateReport rep;

    for (int ray = 0; ray < rays; ++ray) {
        aniso::Covector dir;
        dir.zeta = rand_unit(space.p);
        dir.eta_v = rand_unit(space.v);
        dir.eta_n = rand_unit(space.n);
        Eigen::VectorXd sig_dir = rand_unit(space.p);
        for (std::size_t ri = 0; ri < radii.size(); ++ri) {
            const double R = radii[ri];
            SymbolArgs a;
            a.z = Eigen::VectorXd::Zero(space.p);
            a.x = Eigen::VectorXd::Constant(space.p, 0.3);
            a.x2 = Eigen::VectorXd::Constant(space.p, 0.6);
            a.y = Eigen::VectorXd::Constant(space.transverse(), 0.2);
            a.xi = aniso::dilate(R, dir);
            a.sigma = s.kind == SymbolKind::FullAmplitude ? Eigen::VectorXd(R * sig_dir)
                                                          : Eigen::VectorXd::Zero(space.p);

            const double base_xi = 1.0 + a.xi.zeta.norm() + aniso::hnorm(a.xi);
            const double base_sig = 1.0 + a.sigma.norm();

            auto check = [&](Slot slot, int axis, int k, long weighted, int sig_order) {
                const Mat d = central_diff(s, a, slot, axis, k);
                double denom = std::pow(base_xi, order.m - double(weighted));
                if (!order.leaf_smoothing() && s.kind == SymbolKind::FullAmplitude)
                    denom *= std::pow(base_sig, order.l - double(sig_order));
                const double ratio = d.norm() / denom;
                if (!std::isfinite(ratio)) throw std::runtime_error("verify_estimate: evaluator failure");
                shell_max[ri] = std::max(shell_max[ri], ratio);
                if (ratio > rep.worst_ratio) {
                    rep.worst_ratio = ratio;
                    rep.witness = a;
                }
            };

            check(Slot::Zeta, 0, 0, 0, 0);  // zeroth order
            for (int k = 1; k <= derivative_depth; ++k) {
                if (space.p > 0 && s.kind != SymbolKind::ReducedAmplitude) check(Slot::Zeta, 0, k, k, 0);
                if (space.v > 0) check(Slot::EtaV, 0, k, k, 0);
                if (space.n > 0) check(Slot::EtaN, 0, k, 2L * k, 0);
                if (space.p > 0 && s.kind == SymbolKind::FullAmplitude) check(Slot::Sigma, 0, k, 0, k);
            }
        }
    }

    const std::size_t last = radii.size() - 1;
    rep.growth_factor = shell_max[last] / std::max(shell_max[last - 1], 1e-300);
    rep.pass = std::isfinite(rep.worst_ratio) && rep.growth_factor <= growth_tol;
    return rep;
}

PrincipalSymbol principal_part(const Symbol& s, double m, double rel_tol) {
    PrincipalSymbol ps;
    ps.kind = s.kind;
    ps.degree = m;
    ps.fiber_dim = s.fiber_dim;
    Symbol cap = s;
    ps.eval = [cap, m, rel_tol](const SymbolArgs& a) {
        const double l0 = 256.0, l1 = 512.0, l2 = 1024.0;
        auto scaled = [&](double lam) {
            SymbolArgs b = a;
            b.xi = aniso::dilate(lam, a.xi);
            return Mat(cap(b) / std::pow(lam, m));
        };
        const Mat f0 = scaled(l0), f1 = scaled(l1), f2 = scaled(l2);
        // two Richardson levels in 1/lambda; convergence judged on the
        // first-level extrapolants (raw values still carry the O(1/lambda) term)
        const Mat r0 = 2.0 * f1 - f0;
        const Mat r1 = 2.0 * f2 - f1;
        const Mat ext = 2.0 * r1 - r0;
        const double scale = std::max({f0.norm(), f1.norm(), f2.norm()});
        if (scale == 0.0) return Mat(Mat::Zero(f0.rows(), f0.cols()));  // zero symbol: zero principal part
        if ((r1 - r0).norm() > rel_tol * scale)
            throw std::runtime_error("principal_part: no degree-" + std::to_string(m) +
                                     " limit (non-classical symbol or wrong order)");
        return ext;
    };
    return ps;
}

Holonomy Holonomy::identity(int v, int n) {
    Holonomy h;
    h.A_nn = Eigen::MatrixXd::Identity(n, n);
    h.A_nv = Eigen::MatrixXd::Zero(n, v);
    h.A_vv = Eigen::MatrixXd::Identity(v, v);
    return h;
}

aniso::Covector Holonomy::transport_top(const aniso::Covector& xi) const {
    aniso::Covector out = xi;
    out.eta_n = A_nn * xi.eta_n;
    out.eta_v = A_vv * xi.eta_v;
    return out;
}

PrincipalSymbol compose_principal(const PrincipalSymbol& s1, const PrincipalSymbol& s2,
                                  const LeafGrid& leaf, const Holonomy& hol) {
    if (s1.kind != SymbolKind::ReducedAmplitude || s2.kind != SymbolKind::ReducedAmplitude)
        throw std::invalid_argument("compose_principal: reduced-amplitude principal symbols required");
    PrincipalSymbol out;
    out.kind = SymbolKind::ReducedAmplitude;
    out.degree = s1.degree + s2.degree;
    out.fiber_dim = s1.fiber_dim;
    PrincipalSymbol a = s1, b = s2;
    LeafGrid lg = leaf;
    Holonomy h = hol;
    if (lg.p != 1) throw std::invalid_argument("compose_principal: one leaf axis supported");
    out.eval = [a, b, lg, h](const SymbolArgs& args) {
        const aniso::Covector xi2 = h.transport_top(args.xi);
        Mat acc = Mat::Zero(a.fiber_dim, a.fiber_dim);
        for (int j = 0; j < lg.points; ++j) {
            SymbolArgs left = args;
            left.x2 = Eigen::VectorXd::Constant(1, double(j) * lg.spacing);
            SymbolArgs right = args;
            right.x = left.x2;
            right.xi = xi2;
            acc += a(left) * b(right) * lg.spacing;
        }
        return acc;
    };
    return out;
}

}  // namespace bifcalc::symbols
