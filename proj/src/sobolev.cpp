#include "bifcalc/sobolev.hpp"

#include <numeric>
#include <sstream>

namespace bifcalc::sobolev {

namespace {

// forward DFT of a full section, unitary scaling
Vec unitary_dft(const Vec& u, const TorusGrid& grid) {
    // reuse LinOp machinery: a multiplier of ones applied after forward DFT is
    // wasteful; do it directly via repeated axis transforms through apply()
    // of the identity would be a no-op. Instead transform by brute force.
    const long pts = grid.points();
    const int a = grid.fiber;
    Vec out = Vec::Zero(u.size());
    // direct O(pts^2) transform is too slow; use axis-wise DFT matrices
    // (replicated from linop.cpp's private helpers via public grid data)
    Vec w = u;
    std::vector<int> sizes = grid.axis_points;
    for (std::size_t ax = 0; ax < sizes.size(); ++ax) {
        const int s = sizes[ax];
        torus::Mat F(s, s);
        for (long r = 0; r < s; ++r) {
            const long k = TorusGrid::freq_of_index(r, s);
            for (long c = 0; c < s; ++c)
                F(r, c) = std::polar(1.0, -2.0 * M_PI * double(k) * double(c) / double(s));
        }
        long before = 1, after = a;
        for (std::size_t i = 0; i < ax; ++i) before *= sizes[i];
        for (std::size_t i = ax + 1; i < sizes.size(); ++i) after *= sizes[i];
        Vec tmp(s), res(s);
        for (long b = 0; b < before; ++b)
            for (long c = 0; c < after; ++c) {
                const long base = b * s * after + c;
                for (long i = 0; i < s; ++i) tmp[i] = w[base + i * after];
                res = F * tmp;
                for (long i = 0; i < s; ++i) w[base + i * after] = res[i];
            }
    }
    out = w / std::sqrt(double(pts));
    return out;
}

double weighted_l2(const Vec& u, const TorusGrid& grid,
                   const std::function<double(const aniso::Covector&)>& w) {
    const Vec uhat = unitary_dft(u, grid);
    const long T = grid.transverse_points();
    const long L = grid.leaf_points();
    const int a = grid.fiber;
    double s2 = 0.0;
    for (long z = 0; z < L; ++z)
        for (long t = 0; t < T; ++t) {
            const double wt = w(grid.covector(z, t));
            s2 += wt * wt * uhat.segment((z * T + t) * a, a).squaredNorm();
        }
    return std::sqrt(s2);
}

bool drift_stable(const std::vector<double>& drifts) {
    if (drifts.empty()) return false;
    for (std::size_t i = 1; i < drifts.size(); ++i)
        if (drifts[i] > drifts[i - 1] + 1e-12) return false;
    return std::abs(drifts.back()) < 0.10;
}

}  // namespace

double sobolev_weight(const aniso::Covector& xi, double s, double k) {
    return std::pow(1.0 + aniso::xi_norm(xi), s) * std::pow(1.0 + xi.zeta.norm(), k);
}

double sobolev_norm(const Vec& u, const TorusGrid& grid, double s, double k) {
    return weighted_l2(u, grid, [s, k](const aniso::Covector& xi) { return sobolev_weight(xi, s, k); });
}

double classical_sobolev_norm(const Vec& u, const TorusGrid& grid, double t) {
    return weighted_l2(u, grid,
                       [t](const aniso::Covector& xi) { return std::pow(1.0 + aniso::euclid_norm(xi), t); });
}

double op_norm_between(const LinOp& A, double s, double k, double s2, double k2) {
    const LinOp W = A.conjugate_by_weights(
        [s2, k2](const aniso::Covector& xi) { return sobolev_weight(xi, s2, k2); },
        [s, k](const aniso::Covector& xi) { return 1.0 / sobolev_weight(xi, s, k); });
    return W.operator_norm();
}

double diagonal_weighted_sup(const LinOp& A, double s, double k, double s2, double k2) {
    if (A.rep() != LinOp::Rep::Multiplier) throw std::logic_error("diagonal_weighted_sup: multiplier only");
    const auto& g = A.grid();
    double mx = 0.0;
    const long T = g.transverse_points();
    const long Z = A.transverse_only() ? 1 : g.leaf_points();
    for (long z = 0; z < Z; ++z)
        for (long t = 0; t < T; ++t) {
            const auto xi = g.covector(z, t);
            const double ratio = sobolev_weight(xi, s2, k2) / sobolev_weight(xi, s, k);
            const double val = A.scalar() ? std::abs(A.scalar_at(z, t)) : A.block_at(z, t).operatorNorm();
            mx = std::max(mx, val * ratio);
        }
    return mx;
}

double schatten_norm(const LinOp& A, double p) {
    if (p < 1.0) throw std::invalid_argument("schatten_norm: p >= 1");
    const Eigen::VectorXd mu = A.singular_values();
    double s = 0.0;
    for (long i = mu.size(); i-- > 0;) s += std::pow(mu[i], p);  // ascending accumulation
    return std::pow(s, 1.0 / p);
}

double trace_norm(const LinOp& A) { return schatten_norm(A, 1.0); }
double hs_norm(const LinOp& A) { return schatten_norm(A, 2.0); }

ConvergenceReport lattice_sum_convergence(double m, double l, const aniso::AnisoSpace& space,
                                          const std::vector<double>& radii, SumMode mode) {
    if (radii.size() < 3) throw std::invalid_argument("lattice_sum_convergence: need >= 3 radii");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1]) throw std::invalid_argument("lattice_sum_convergence: radii must increase");

    const aniso::AnisoSpace eta_space(0, space.v, space.n);
    ConvergenceReport rep;
    for (double R : radii) {
        double s = 0.0;
        if (mode == SumMode::EtaOnly) {
            aniso::for_each_lattice_point(eta_space, R, [&](const aniso::Covector& xi) {
                s += std::pow(1.0 + aniso::hnorm(xi), 2.0 * m);
            });
        } else {
            aniso::for_each_lattice_point(space, R, [&](const aniso::Covector& xi) {
                s += std::pow(1.0 + xi.zeta.norm(), 2.0 * l) *
                     std::pow(1.0 + xi.zeta.norm() + aniso::hnorm(xi), 2.0 * m);
            });
        }
        rep.partial_sums.push_back(s);
    }
    for (std::size_t i = 2; i < rep.partial_sums.size(); ++i) {
        const double i0 = rep.partial_sums[i - 1] - rep.partial_sums[i - 2];
        const double i1 = rep.partial_sums[i] - rep.partial_sums[i - 1];
        rep.increment_ratios.push_back(i1 / std::max(i0, 1e-300));
    }
    rep.converged = std::all_of(rep.increment_ratios.begin(), rep.increment_ratios.end(),
                                [](double r) { return r <= 0.9; });
    if (rep.converged) {
        const double rho = rep.increment_ratios.back();
        const double last_inc = rep.partial_sums.back() - rep.partial_sums[rep.partial_sums.size() - 2];
        rep.extrapolated = rep.partial_sums.back() + last_inc * rho / (1.0 - rho);
    } else {
        // slope of log S vs log R
        const std::size_t n = radii.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = std::log(radii[i]), y = std::log(rep.partial_sums[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
        }
        rep.growth_exponent = (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
    }
    return rep;
}

std::vector<SweepRow> threshold_sweep(const aniso::AnisoSpace& space, const std::vector<int>& grids,
                                      const std::vector<std::pair<double, double>>& orders,
                                      double bump_width) {
    std::vector<SweepRow> rows;
    for (const auto& [m, l] : orders) {
        SweepRow row;
        row.m = m;
        row.l = l;
        row.grids = grids;
        for (int N : grids) {
            TorusGrid g(space, N, 1);
            const LinOp op =
                torus::model_op(m, l, g).compose(torus::pi_rep(torus::LeafKernel::gaussian_bump(g, bump_width), g));
            const Eigen::VectorXd mu = op.singular_values();
            double t = 0.0, h2 = 0.0;
            for (long i = mu.size(); i-- > 0;) {
                t += mu[i];
                h2 += mu[i] * mu[i];
            }
            row.trace_norms.push_back(t);
            row.hs_norms.push_back(std::sqrt(h2));
            row.op_norms.push_back(mu.size() ? mu[0] : 0.0);
        }
        for (std::size_t i = 1; i < row.trace_norms.size(); ++i) {
            row.trace_drifts.push_back(row.trace_norms[i] / row.trace_norms[i - 1] - 1.0);
            row.hs_drifts.push_back(row.hs_norms[i] / row.hs_norms[i - 1] - 1.0);
        }
        row.trace_stable = drift_stable(row.trace_drifts);
        row.hs_stable = drift_stable(row.hs_drifts);
        const double hd = double(space.hom_dim());
        row.trace_predicted = m < -hd && l < -double(space.p);
        row.hs_predicted = m < -hd / 2.0 && l < -double(space.p) / 2.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "m,l,N,trace_norm,hs_norm,op_norm,trace_classification,hs_classification,"
          "trace_predicted,hs_predicted\n";
    os.precision(12);
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.grids.size(); ++i)
            os << r.m << "," << r.l << "," << r.grids[i] << "," << r.trace_norms[i] << "," << r.hs_norms[i]
               << "," << r.op_norms[i] << "," << (r.trace_stable ? "stable" : "growing") << ","
               << (r.hs_stable ? "stable" : "growing") << "," << (r.trace_predicted ? "stable" : "growing")
               << "," << (r.hs_predicted ? "stable" : "growing") << "\n";
    return os.str();
}

}  // namespace bifcalc::sobolev
