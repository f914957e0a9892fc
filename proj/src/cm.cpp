#include "bifcalc/cm.hpp"

#include <Eigen/Eigenvalues>

namespace bifcalc::cm {

namespace {

// exterior multiplication by generator g (absolute index) on subset basis
Mat ext_generator(int total, int g) {
    const int dim = 1 << total;
    Mat m = Mat::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) {
        if (b & (1 << g)) continue;
        // sign: (-1)^{# generators below g present in b}
        const int below = __builtin_popcount(unsigned(b) & ((1u << g) - 1));
        m(b | (1 << g), b) = (below % 2 == 0) ? 1.0 : -1.0;
    }
    return m;
}

}  // namespace

Mat FormBundle::ext_v(int j) const {
    if (j < 0 || j >= v) throw std::out_of_range("ext_v");
    return ext_generator(v + n, j);
}

Mat FormBundle::ext_n(int j) const {
    if (j < 0 || j >= n) throw std::out_of_range("ext_n");
    return ext_generator(v + n, v + j);
}

Mat FormBundle::gamma_v() const {
    Mat m = Mat::Zero(dim(), dim());
    for (int b = 0; b < dim(); ++b) m(b, b) = (deg_v(b) % 2 == 0) ? 1.0 : -1.0;
    return m;
}

Mat FormBundle::gamma_n() const {
    Mat m = Mat::Zero(dim(), dim());
    for (int b = 0; b < dim(); ++b) m(b, b) = (deg_n(b) % 2 == 0) ? 1.0 : -1.0;
    return m;
}

CmOperators build_cm_complex(const TorusGrid& grid) {
    const auto& sp = grid.space;
    if (sp.v < 1 && sp.n < 1) throw std::invalid_argument("build_cm_complex: v >= 1 or n >= 1 required");
    FormBundle fb(sp.v, sp.n);
    if (grid.fiber != fb.dim()) throw std::invalid_argument("build_cm_complex: grid fiber must be 2^(v+n)");

    std::vector<Mat> ev, en;
    for (int j = 0; j < sp.v; ++j) ev.push_back(fb.ext_v(j));
    for (int j = 0; j < sp.n; ++j) en.push_back(fb.ext_n(j));
    const Mat gn = fb.gamma_n();

    const long T = grid.transverse_points();
    std::vector<Mat> bdV((std::size_t)T), bdN((std::size_t)T), bQV((std::size_t)T), bQN((std::size_t)T),
        bQ((std::size_t)T);
    const torus::Complex I(0.0, 1.0);
    for (long t = 0; t < T; ++t) {
        const auto xi = grid.transverse_covector(t);
        Mat dV = Mat::Zero(fb.dim(), fb.dim()), dN = Mat::Zero(fb.dim(), fb.dim());
        for (int j = 0; j < sp.v; ++j) dV += I * xi.eta_v[j] * ev[std::size_t(j)];
        for (int j = 0; j < sp.n; ++j) dN += I * xi.eta_n[j] * en[std::size_t(j)];
        const Mat dVs = dV.adjoint(), dNs = dN.adjoint();
        bdV[std::size_t(t)] = dV;
        bdN[std::size_t(t)] = dN;
        bQV[std::size_t(t)] = dV * dVs - dVs * dV;
        bQN[std::size_t(t)] = dN + dNs;
        bQ[std::size_t(t)] = bQV[std::size_t(t)] * gn + bQN[std::size_t(t)];
    }
    CmOperators ops{grid,
                    LinOp::block_multiplier(grid, std::move(bdV), true, {2.0, 0.0}),
                    LinOp::block_multiplier(grid, std::move(bdN), true, {2.0, 0.0}),
                    LinOp::block_multiplier(grid, std::move(bQV), true, {2.0, 0.0}),
                    LinOp::block_multiplier(grid, std::move(bQN), true, {2.0, 0.0}),
                    LinOp::block_multiplier(grid, std::move(bQ), true, {2.0, 0.0})};
    // dV, dN are order-(1,0) as differential operators but 2-homogeneous building
    // blocks inside Q in the anisotropic weighting; Q itself has bi-order (2, 0)
    ops.dV.set_order({1.0, 0.0});
    ops.dN.set_order({2.0, 0.0});
    return ops;
}

namespace {

// adaptive Simpson on [a,b]
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
    const double c = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fc = f(c);
    auto simpson = [](double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); };
    const double whole = simpson(fa, fc, fb, b - a);
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double a_, double b_, double fa_, double fb_, double fm_, double acc, int d) -> double {
        const double m = 0.5 * (a_ + b_);
        const double lm = 0.5 * (a_ + m), rm = 0.5 * (m + b_);
        const double flm = f(lm), frm = f(rm);
        const double left = simpson(fa_, flm, fm_, m - a_);
        const double right = simpson(fm_, frm, fb_, b_ - m);
        if (d <= 0 || std::abs(left + right - acc) < 15.0 * tol)
            return left + right + (left + right - acc) / 15.0;
        return rec(a_, m, fa_, fm_, flm, left, d - 1) + rec(m, b_, fm_, fb_, frm, right, d - 1);
    };
    return rec(a, b, fa, fb, fc, whole, depth);
}

}  // namespace

double dsign_scalar(double q, DsignMethod method, double quad_tol) {
    if (q == 0.0) return 0.0;
    if (method == DsignMethod::ClosedForm) return (q > 0 ? 1.0 : -1.0) * std::sqrt(std::abs(q));
    // substitution lambda = q^2 u:
    //   D-map(q) = (pi sqrt2)^{-1} sign(q) |q|^{1/2} Int_0^inf u^{-1/4}/(1+u) du,
    // split at u = 1; u = t^4 on (0,1] and u = 1/w^4 on [1,inf) give smooth integrands.
    auto g1 = [](double t) { return 4.0 * t * t / (1.0 + t * t * t * t); };
    auto g2 = [](double w) { return 4.0 / (1.0 + w * w * w * w); };
    const double integral = adaptive_simpson(g1, 0.0, 1.0, quad_tol, 40) +
                            adaptive_simpson(g2, 0.0, 1.0, quad_tol, 40);
    return (q > 0 ? 1.0 : -1.0) * std::sqrt(std::abs(q)) * integral / (M_PI * std::sqrt(2.0));
}

LinOp dsign(const CmOperators& ops, DsignMethod method) {
    if (ops.Q.rep() != LinOp::Rep::Multiplier) throw std::logic_error("dsign: multiplier Q expected");
    const long T = ops.grid.transverse_points();
    std::vector<Mat> out((std::size_t)T);
    const LinOp* Q = &ops.Q;
    torus::parallel_for(T, [&](long t) {
        const Mat block = Q->block_at(0, t);
        if ((block - block.adjoint()).norm() > 1e-10 * std::max(1.0, block.norm()))
            throw std::runtime_error("dsign: Q block not self-adjoint");
        Eigen::SelfAdjointEigenSolver<Mat> es(block);
        Eigen::VectorXd f(es.eigenvalues().size());
        for (long i = 0; i < f.size(); ++i) f[i] = dsign_scalar(es.eigenvalues()[i], method);
        out[std::size_t(t)] =
            es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
    });
    LinOp D = LinOp::block_multiplier(ops.grid, std::move(out), true, {1.0, 0.0});
    return D;
}

SymbolCheck transverse_symbol_check(const LinOp& D, const TorusGrid& grid, double tol) {
    SymbolCheck chk;
    const long T = grid.transverse_points();
    for (long t = 0; t < T; ++t) {
        const auto xi = grid.transverse_covector(t);
        const double h = aniso::hnorm(xi);
        if (h < 1.0) continue;
        const Mat block = D.block_at(0, t);
        const Mat d2 = block * block;
        const Mat d4 = d2 * d2;
        const double target = std::pow(xi.eta_v.squaredNorm(), 2) + xi.eta_n.squaredNorm();
        const double dev4 = (d4 - target * Mat::Identity(d4.rows(), d4.cols())).norm() / target;
        const double off2 =
            (d2 - (d2.trace() / double(d2.rows())) * Mat::Identity(d2.rows(), d2.cols())).norm() /
            std::max(std::abs(d2.trace()) / double(d2.rows()), 1e-300);
        chk.worst_d4 = std::max(chk.worst_d4, dev4);
        chk.worst_scalar = std::max(chk.worst_scalar, off2);
        ++chk.frequencies_checked;
    }
    chk.pass = chk.worst_d4 <= tol && chk.worst_scalar <= tol;
    return chk;
}

}  // namespace bifcalc::cm
