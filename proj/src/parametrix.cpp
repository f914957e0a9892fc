#include "bifcalc/parametrix.hpp"

#include <random>

namespace bifcalc::parametrix {

namespace {

double smooth_step(double u) {
    // C^inf transition: 0 for u <= 0, 1 for u >= 1
    auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
    const double a = f(u), b = f(1.0 - u);
    return a / (a + b);
}

}  // namespace

double conic_cutoff(const aniso::Covector& xi, double eps) {
    const double h = aniso::hnorm(xi);
    if (h == 0.0) return 0.0;
    const double t = xi.zeta.norm() / h;
    return smooth_step(2.0 - t / eps);  // 1 for t <= eps, 0 for t >= 2 eps
}

symbols::PrincipalSymbol invert_principal(const symbols::PrincipalSymbol& sigma, const ConicRegion& region,
                                          double lower_bound, const aniso::AnisoSpace& space,
                                          int sample_rays) {
    // ellipticity sampling at |eta|' = 1 over U_{2eps}: random joint directions
    // plus the coordinate rays (which hit the degenerate directions exactly)
    std::mt19937_64 rng(0x51c0ffee1234ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> tdist(0.0, 2.0 * region.eps);
    auto unit = [&](int d) {
        Eigen::VectorXd u(d);
        for (int i = 0; i < d; ++i) u[i] = gauss(rng);
        if (d > 0 && u.norm() > 0) u /= u.norm();
        return u;
    };
    std::vector<aniso::Covector> probes;
    for (int r = 0; r < sample_rays; ++r) {
        aniso::Covector xi;
        xi.zeta = tdist(rng) * unit(space.p);
        xi.eta_v.resize(space.v);
        xi.eta_n.resize(space.n);
        for (int i = 0; i < space.v; ++i) xi.eta_v[i] = gauss(rng);
        for (int i = 0; i < space.n; ++i) xi.eta_n[i] = gauss(rng);
        if (aniso::hnorm(xi) == 0.0) continue;
        probes.push_back(xi);
    }
    for (int i = 0; i < space.v; ++i) {
        aniso::Covector xi;
        xi.zeta = Eigen::VectorXd::Zero(space.p);
        xi.eta_v = Eigen::VectorXd::Zero(space.v);
        xi.eta_n = Eigen::VectorXd::Zero(space.n);
        xi.eta_v[i] = 1.0;
        probes.push_back(xi);
    }
    for (int i = 0; i < space.n; ++i) {
        aniso::Covector xi;
        xi.zeta = Eigen::VectorXd::Zero(space.p);
        xi.eta_v = Eigen::VectorXd::Zero(space.v);
        xi.eta_n = Eigen::VectorXd::Zero(space.n);
        xi.eta_n[i] = 1.0;
        probes.push_back(xi);
    }
    for (aniso::Covector xi : probes) {
        const double h = aniso::hnorm(xi);
        xi.eta_v /= h;      // dilate by 1/h: |eta|' = 1 on the probe
        xi.eta_n /= h * h;
        symbols::SymbolArgs a;
        a.xi = xi;
        a.x = Eigen::VectorXd::Zero(space.p);
        a.x2 = Eigen::VectorXd::Zero(space.p);
        const Eigen::MatrixXcd m = sigma(a);
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
        if (svd.singularValues().minCoeff() < lower_bound) throw EllipticityError(xi);
    }

    symbols::PrincipalSymbol inv;
    inv.kind = sigma.kind;
    inv.degree = -sigma.degree;
    inv.fiber_dim = sigma.fiber_dim;
    symbols::PrincipalSymbol cap = sigma;
    const double eps = region.eps;
    inv.eval = [cap, eps](const symbols::SymbolArgs& a) {
        const double chi = conic_cutoff(a.xi, eps);
        if (chi == 0.0) return Eigen::MatrixXcd(Eigen::MatrixXcd::Zero(cap.fiber_dim, cap.fiber_dim));
        return Eigen::MatrixXcd(chi * cap(a).inverse());
    };
    return inv;
}

ParametrixResult build_parametrix(const LinOp& P, const symbols::PrincipalSymbol& sigma, int steps,
                                  const ConicRegion& region, double lower_bound) {
    if (steps < 1) throw std::invalid_argument("build_parametrix: steps >= 1");
    const auto& g = P.grid();
    const auto inv = invert_principal(sigma, region, lower_bound, g.space);

    symbols::Symbol qsym;
    qsym.kind = symbols::SymbolKind::Multiplier;
    qsym.fiber_dim = inv.fiber_dim;
    qsym.declared_order = {-sigma.degree, 0.0};
    symbols::PrincipalSymbol cap = inv;
    qsym.eval = [cap](const symbols::SymbolArgs& a) {
        if (aniso::hnorm(a.xi) == 0.0)
            return Eigen::MatrixXcd(Eigen::MatrixXcd::Zero(cap.fiber_dim, cap.fiber_dim));
        return cap(a);
    };

    LinOp Q = torus::quantize(qsym, g);
    ParametrixResult res = refine_parametrix(P, Q, steps, region);
    res.Q.set_order({-P.order().m, -P.order().l});
    return res;
}

ParametrixResult refine_parametrix(const LinOp& P, const LinOp& Q0, int steps, const ConicRegion& region) {
    if (steps < 1) throw std::invalid_argument("refine_parametrix: steps >= 1");
    const auto& g = P.grid();
    LinOp Q = Q0;
    const LinOp I = LinOp::identity(g);

    // residual size restricted to the cone (off the cone the residual is ~1 by design)
    auto cone_norm = [&](const LinOp& S) {
        if (S.rep() == LinOp::Rep::Multiplier) {
            double mx = 0.0;
            const long T = g.transverse_points();
            const long L = g.leaf_points();
            for (long z = 0; z < L; ++z)
                for (long t = 0; t < T; ++t) {
                    const auto xi = g.covector(z, t);
                    if (!region.contains(xi) || aniso::hnorm(xi) < 1.0) continue;
                    mx = std::max(mx, S.scalar() ? std::abs(S.scalar_at(z, t))
                                                 : S.block_at(z, t).operatorNorm());
                }
            return mx;
        }
        Eigen::VectorXcd chi(g.points());
        const long T = g.transverse_points();
        for (long z = 0; z < g.leaf_points(); ++z)
            for (long t = 0; t < T; ++t) chi[z * T + t] = conic_cutoff(g.covector(z, t), region.eps);
        return S.compose(LinOp::multiplier(g, chi, false, {0, 0})).operator_norm();
    };

    double prev_residual = std::numeric_limits<double>::infinity();
    for (int j = 0; j < steps; ++j) {
        const LinOp S = I.add(P.compose(Q), -1.0);  // I - PQ
        const double rnorm = cone_norm(S);
        if (rnorm > prev_residual * (1.0 + 1e-9))
            throw std::runtime_error("build_parametrix: residual not decreasing (wrong declared order?)");
        prev_residual = rnorm;
        Q = Q.add(Q.compose(S), 1.0);  // Q + Q(I - PQ)
    }
    ParametrixResult res;
    res.R = I.add(Q.compose(P), -1.0);
    res.S = I.add(P.compose(Q), -1.0);
    res.Q = Q;
    res.steps = steps;
    return res;
}

double residual_cone_order(const LinOp& R, const ConicRegion& region) {
    if (R.rep() != LinOp::Rep::Multiplier) throw std::logic_error("residual_cone_order: multiplier residuals only");
    const auto& g = R.grid();
    // shell maxima of |r| over cone points with |eta|' in dyadic bands
    const double xmax = double(g.base_n) / 2.0;
    std::vector<double> band_top, band_val;
    for (double X = 1.0; X <= xmax + 1e-9; X *= 2.0) {
        band_top.push_back(X);
        band_val.push_back(0.0);
    }
    const long T = g.transverse_points();
    const long L = g.leaf_points();
    for (long z = 0; z < L; ++z)
        for (long t = 0; t < T; ++t) {
            const auto xi = g.covector(z, t);
            if (!region.contains(xi)) continue;
            const double h = aniso::hnorm(xi);
            for (std::size_t b = 0; b < band_top.size(); ++b)
                if (h > band_top[b] / 2.0 && h <= band_top[b]) {
                    const double val =
                        R.scalar() ? std::abs(R.scalar_at(z, t)) : R.block_at(z, t).operatorNorm();
                    band_val[b] = std::max(band_val[b], val);
                }
        }
    // least-squares slope of log val vs log X over nonempty bands
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t b = 0; b < band_top.size(); ++b) {
        if (band_val[b] <= 0.0) continue;
        const double x = std::log(band_top[b]), y = std::log(band_val[b]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    return (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
}

ResidualReport residual_report(
    const std::function<std::pair<LinOp, ParametrixResult>(const TorusGrid&)>& factory,
    const aniso::AnisoSpace& space, const std::vector<int>& grids, double bump_width) {
    ResidualReport rep;
    rep.grids = grids;
    for (int N : grids) {
        TorusGrid g(space, N, 1);
        auto [P, pr] = factory(g);
        const LinOp damp = torus::pi_rep(torus::LeafKernel::gaussian_bump(g, bump_width), g);
        rep.trace_qp.push_back(sobolev::trace_norm(damp.compose(pr.R)));
        rep.trace_pq.push_back(sobolev::trace_norm(damp.compose(pr.S)));
    }
    for (std::size_t i = 1; i < rep.trace_qp.size(); ++i) {
        auto drift = [](double a, double b) {
            if (a < 1e-12 && b < 1e-12) return 0.0;  // exact-inverse case
            return b / std::max(a, 1e-300) - 1.0;
        };
        rep.drift_qp.push_back(drift(rep.trace_qp[i - 1], rep.trace_qp[i]));
        rep.drift_pq.push_back(drift(rep.trace_pq[i - 1], rep.trace_pq[i]));
    }
    auto ok = [](const std::vector<double>& d) {
        return !d.empty() && std::abs(d.back()) < 0.10;
    };
    rep.stable = ok(rep.drift_qp) && ok(rep.drift_pq);
    return rep;
}

}  // namespace bifcalc::parametrix
