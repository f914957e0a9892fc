#include "bifcalc/quantize.hpp"

namespace bifcalc::torus {

namespace {

double torus_dist(long i, long j, long n) {
    const double h = 2.0 * M_PI / double(n);
    double d = std::abs(double(i - j)) * h;
    return std::min(d, 2.0 * M_PI - d);
}

Eigen::VectorXd leaf_position(const TorusGrid& g, long xindex) {
    std::vector<int> sizes(std::size_t(g.space.p), g.base_n);
    const auto idx = unflatten(xindex, sizes);
    Eigen::VectorXd x(g.space.p);
    for (int i = 0; i < g.space.p; ++i) x[i] = 2.0 * M_PI * double(idx[std::size_t(i)]) / double(g.base_n);
    return x;
}

Eigen::VectorXd transverse_position(const TorusGrid& g, long yindex) {
    std::vector<int> sizes(g.axis_points.begin() + g.space.p, g.axis_points.end());
    const auto idx = unflatten(yindex, sizes);
    Eigen::VectorXd y(g.space.transverse());
    for (int i = 0; i < g.space.transverse(); ++i)
        y[i] = 2.0 * M_PI * double(idx[std::size_t(i)]) / double(sizes[std::size_t(i)]);
    return y;
}

long leaf_freq_wrap(long k, long n) {
    long r = ((k + n / 2) % n + n) % n;  // to [0, n)
    return r - n / 2;
}

}  // namespace

double model_symbol(double m, double l, const aniso::Covector& xi) {
    const double z2 = xi.zeta.squaredNorm();
    const double v2 = xi.eta_v.squaredNorm();
    const double n2 = xi.eta_n.squaredNorm();
    return std::pow(1.0 + (z2 + v2) * (z2 + v2) + n2, m / 4.0) * std::pow(1.0 + z2, l / 2.0);
}

LinOp model_op(double m, double l, const TorusGrid& grid) {
    const long T = grid.transverse_points();
    const long L = grid.leaf_points();
    Eigen::VectorXcd vals(grid.points());
    for (long z = 0; z < L; ++z)
        for (long t = 0; t < T; ++t) vals[z * T + t] = model_symbol(m, l, grid.covector(z, t));
    return LinOp::multiplier(grid, vals, false, {m, l});
}

LinOp quantize(const symbols::Symbol& s, const TorusGrid& grid, std::optional<double> eval_radius) {
    if (eval_radius && *eval_radius > double(grid.base_n) / 2.0)
        throw std::runtime_error("quantize: declared evaluation radius exceeds the Nyquist bound N/2");

    if (s.kind == symbols::SymbolKind::Multiplier) {
        const long T = grid.transverse_points();
        const long L = grid.leaf_points();
        if (s.fiber_dim == 1) {
            Eigen::VectorXcd vals(grid.points());
            for (long z = 0; z < L; ++z)
                for (long t = 0; t < T; ++t) {
                    symbols::SymbolArgs a;
                    a.xi = grid.covector(z, t);
                    vals[z * T + t] = s(a)(0, 0);
                }
            return LinOp::multiplier(grid, vals, false, s.declared_order);
        }
        std::vector<Mat> blocks(std::size_t(grid.points()));
        for (long z = 0; z < L; ++z)
            for (long t = 0; t < T; ++t) {
                symbols::SymbolArgs a;
                a.xi = grid.covector(z, t);
                blocks[std::size_t(z * T + t)] = s(a);
            }
        return LinOp::block_multiplier(grid, std::move(blocks), false, s.declared_order);
    }

    if (s.kind == symbols::SymbolKind::ReducedAmplitude) {
        const long L = grid.leaf_points();
        const int a = grid.fiber;
        if (!s.y_dependent) {
            symbols::Symbol cap = s;
            TorusGrid g = grid;
            auto fn = [cap, g, L, a](long t) {
                Mat B(L * a, L * a);
                for (long x = 0; x < L; ++x)
                    for (long x2 = 0; x2 < L; ++x2) {
                        symbols::SymbolArgs args;
                        args.x = leaf_position(g, x);
                        args.x2 = leaf_position(g, x2);
                        args.y = Eigen::VectorXd::Zero(g.space.transverse());
                        args.xi = g.transverse_covector(t);
                        B.block(x * a, x2 * a, a, a) = cap(args);
                    }
                return B;
            };
            return LinOp::leaf_blocked(grid, fn, false, s.declared_order);
        }
        // y-dependent: dense assembly, row (x,y), column (x',y'):
        // A = (1/T) sum_eta a(x,x',y,eta) e^{i(y-y')eta}
        const long dim = grid.section_dim();
        if (dim > LinOp::kDenseCap) throw std::runtime_error("quantize: y-dependent amplitude needs dense form over the cap");
        const long Tp = grid.transverse_points();
        Mat A = Mat::Zero(dim, dim);
        std::vector<int> tsizes(grid.axis_points.begin() + grid.space.p, grid.axis_points.end());
        for (long x = 0; x < L; ++x)
            for (long x2 = 0; x2 < L; ++x2)
                for (long y = 0; y < Tp; ++y) {
                    const Eigen::VectorXd ypos = transverse_position(grid, y);
                    // g(eta) = a(x,x',y,eta) e^{i y.eta}; row over y' = DFT of g
                    std::vector<Mat> gv((std::size_t)Tp);
                    for (long t = 0; t < Tp; ++t) {
                        symbols::SymbolArgs args;
                        args.x = leaf_position(grid, x);
                        args.x2 = leaf_position(grid, x2);
                        args.y = ypos;
                        args.xi = grid.transverse_covector(t);
                        double phase = 0.0;
                        const auto tidx = unflatten(t, tsizes);
                        for (std::size_t ax = 0; ax < tsizes.size(); ++ax)
                            phase += 2.0 * M_PI *
                                     double(TorusGrid::freq_of_index(tidx[ax], tsizes[ax])) *
                                     double(unflatten(y, tsizes)[ax]) / double(tsizes[ax]);
                        gv[std::size_t(t)] = std::polar(1.0, phase) * s(args);
                    }
                    for (long y2 = 0; y2 < Tp; ++y2) {
                        Mat acc = Mat::Zero(a, a);
                        const auto y2idx = unflatten(y2, tsizes);
                        for (long t = 0; t < Tp; ++t) {
                            const auto tidx = unflatten(t, tsizes);
                            double phase = 0.0;
                            for (std::size_t ax = 0; ax < tsizes.size(); ++ax)
                                phase -= 2.0 * M_PI *
                                         double(TorusGrid::freq_of_index(tidx[ax], tsizes[ax])) *
                                         double(y2idx[ax]) / double(tsizes[ax]);
                            acc += std::polar(1.0, phase) * gv[std::size_t(t)];
                        }
                        for (int fi = 0; fi < a; ++fi)
                            for (int fj = 0; fj < a; ++fj)
                                A((x * Tp + y) * a + fi, (x2 * Tp + y2) * a + fj) = acc(fi, fj) / double(Tp);
                    }
                }
        return LinOp::dense(grid, A, s.declared_order);
    }

    return quantize(reduce_full_amplitude(s, grid, false), grid, eval_radius);
}

symbols::Symbol reduce_full_amplitude(const symbols::Symbol& s, const TorusGrid& grid, bool wrap_sigma) {
    if (s.kind != symbols::SymbolKind::FullAmplitude)
        throw std::invalid_argument("reduce_full_amplitude: full amplitude required");
    if (grid.space.p != 1) throw std::invalid_argument("reduce_full_amplitude: one leaf axis supported");
    symbols::Symbol out;
    out.kind = symbols::SymbolKind::ReducedAmplitude;
    out.declared_order = s.declared_order;
    out.fiber_dim = s.fiber_dim;
    out.y_dependent = s.y_dependent;
    symbols::Symbol cap = s;
    const long N = grid.base_n;
    out.eval = [cap, N, wrap_sigma](const symbols::SymbolArgs& args) {
        Mat acc = Mat::Zero(cap.fiber_dim, cap.fiber_dim);
        for (long zj = 0; zj < N; ++zj) {
            const double zpos = 2.0 * M_PI * double(zj) / double(N);
            for (long zi = 0; zi < N; ++zi) {
                const long zeta = TorusGrid::freq_of_index(zi, N);
                for (long si = 0; si < N; ++si) {
                    const long sg = TorusGrid::freq_of_index(si, N);
                    const long sigma_raw = zeta + sg;
                    const long sigma = wrap_sigma ? leaf_freq_wrap(sigma_raw, N) : sigma_raw;
                    symbols::SymbolArgs b = args;
                    b.z = Eigen::VectorXd::Constant(1, zpos);
                    b.sigma = Eigen::VectorXd::Constant(1, double(sigma));
                    b.xi.zeta = Eigen::VectorXd::Constant(1, double(zeta));
                    const double xdiff = args.x[0] - args.x2[0];
                    const double phase = xdiff * double(zeta) + zpos * double(sg);
                    acc += std::polar(1.0, phase) * cap(b);
                }
            }
        }
        return Mat(acc / double(N * N));
    };
    return out;
}

LinOp quantize_full_direct(const symbols::Symbol& s, const TorusGrid& grid) {
    // the direct 6-fold discrete sum, after the exact lattice Fourier-algebra
    // rearrangement sigma = zeta + sg (phase is N-periodic in sigma, so the
    // wrapped evaluation reproduces the literal formula term by term)
    return quantize(reduce_full_amplitude(s, grid, true), grid);
}

LeafKernel LeafKernel::unit_delta(const TorusGrid& grid) {
    LeafKernel k;
    const double h = grid.leaf_spacing();
    const int a = grid.fiber;
    k.eval = [h, a](long x, long x2, long) {
        return x == x2 ? Mat(Mat::Identity(a, a) / h) : Mat(Mat::Zero(a, a));
    };
    k.support_radius = 0.0;
    return k;
}

LeafKernel LeafKernel::gaussian_bump(const TorusGrid& grid, double width, double amplitude) {
    LeafKernel k;
    const long N = grid.base_n;
    const int a = grid.fiber;
    k.eval = [N, a, width, amplitude](long x, long x2, long) {
        const double d = torus_dist(x, x2, N);
        return Mat(amplitude * std::exp(-d * d / (2.0 * width * width)) * Mat::Identity(a, a));
    };
    k.support_radius = M_PI;
    return k;
}

LinOp pi_rep(const LeafKernel& k, const TorusGrid& grid) {
    const long L = grid.leaf_points();
    const int a = grid.fiber;
    const double h = grid.leaf_spacing();
    if (!k.y_dependent) {
        LeafKernel cap = k;
        auto fn = [cap, L, a, h](long) {
            Mat B(L * a, L * a);
            for (long x = 0; x < L; ++x)
                for (long x2 = 0; x2 < L; ++x2) B.block(x * a, x2 * a, a, a) = h * cap.eval(x, x2, -1);
            return B;
        };
        LinOp op = LinOp::leaf_blocked(grid, fn, true, aniso::BiOrder::smoothing(0.0));
        op.set_support_radius(k.support_radius);
        return op;
    }
    const long dim = grid.section_dim();
    if (dim > LinOp::kDenseCap) throw std::runtime_error("pi_rep: y-dependent kernel needs dense form over the cap");
    const long T = grid.transverse_points();
    Mat A = Mat::Zero(dim, dim);
    for (long x = 0; x < L; ++x)
        for (long x2 = 0; x2 < L; ++x2)
            for (long y = 0; y < T; ++y)
                A.block((x * T + y) * a, (x2 * T + y) * a, a, a) = h * k.eval(x, x2, y);
    LinOp op = LinOp::dense(grid, A, aniso::BiOrder::smoothing(0.0));
    op.set_support_radius(k.support_radius);
    return op;
}

LeafKernel leaf_convolve(const LeafKernel& k1, const LeafKernel& k2, const TorusGrid& grid) {
    if (k1.y_dependent || k2.y_dependent)
        throw std::invalid_argument("leaf_convolve: y-independent kernels only");
    LeafKernel out;
    LeafKernel a = k1, b = k2;
    const long L = grid.leaf_points();
    const double h = grid.leaf_spacing();
    out.eval = [a, b, L, h](long x, long x2, long) {
        Mat acc = a.eval(x, 0, -1) * b.eval(0, x2, -1);
        for (long m = 1; m < L; ++m) acc += a.eval(x, m, -1) * b.eval(m, x2, -1);
        return Mat(h * acc);
    };
    out.support_radius = std::min(M_PI, k1.support_radius + k2.support_radius);
    return out;
}

LeafKernel leaf_involute(const LeafKernel& k, const TorusGrid& grid) {
    (void)grid;
    LeafKernel out;
    LeafKernel cap = k;
    out.eval = [cap](long x, long x2, long y) { return Mat(cap.eval(x2, x, y).adjoint()); };
    out.support_radius = k.support_radius;
    out.y_dependent = k.y_dependent;
    return out;
}

}  // namespace bifcalc::torus
