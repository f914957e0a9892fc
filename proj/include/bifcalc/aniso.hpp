#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace bifcalc::aniso {

// Splitting R^p x R^v x R^n with the weighted dilation
// lambda.(zeta, eta_v, eta_n) = (lambda zeta, lambda eta_v, lambda^2 eta_n).
struct AnisoSpace {
    int p = 0;  // leaf dimension
    int v = 0;  // intermediate codimension
    int n = 0;  // transverse-to-F' dimension

    AnisoSpace() = default;
    AnisoSpace(int p_, int v_, int n_) : p(p_), v(v_), n(n_) {
        if (p < 0 || v < 0 || n < 0) throw std::invalid_argument("AnisoSpace: negative dimension");
    }

    int total() const { return p + v + n; }
    int transverse() const { return v + n; }
    // homogeneous dimension of the eta-block
    int hom_dim() const { return v + 2 * n; }
};

struct Covector {
    Eigen::VectorXd zeta;   // length p
    Eigen::VectorXd eta_v;  // length v
    Eigen::VectorXd eta_n;  // length n
};

// Bi-order (m, l); l = -inf encodes the leafwise-smoothing classes.
struct BiOrder {
    double m = 0.0;
    double l = 0.0;

    static constexpr double minus_inf() { return -std::numeric_limits<double>::infinity(); }
    static BiOrder smoothing(double m_) { return {m_, minus_inf()}; }
    bool leaf_smoothing() const { return std::isinf(l) && l < 0; }

    BiOrder operator+(const BiOrder& o) const { return {m + o.m, l + o.l}; }
    BiOrder operator-() const { return {-m, -l}; }
};

inline Covector dilate(double lambda, const Covector& xi) {
    if (!(lambda > 0.0)) throw std::invalid_argument("dilate: lambda must be positive");
    return {lambda * xi.zeta, lambda * xi.eta_v, (lambda * lambda) * xi.eta_n};
}

// |eta|' = (|eta_v|^4 + |eta_n|^2)^{1/4}, via nested sqrt (correctly rounded,
// so dyadic dilations scale it exactly).
inline double hnorm(const Eigen::VectorXd& eta_v, const Eigen::VectorXd& eta_n) {
    const double a = eta_v.squaredNorm();
    const double b = eta_n.squaredNorm();
    return std::sqrt(std::sqrt(a * a + b));
}

inline double hnorm(const Covector& xi) { return hnorm(xi.eta_v, xi.eta_n); }

// |xi|' with |xi|'^2 = |zeta|^2 + |eta|'^2
inline double xi_norm(const Covector& xi) {
    const double h = hnorm(xi);
    return std::sqrt(xi.zeta.squaredNorm() + h * h);
}

inline double euclid_norm(const Covector& xi) {
    return std::sqrt(xi.zeta.squaredNorm() + xi.eta_v.squaredNorm() + xi.eta_n.squaredNorm());
}

enum class OrderConvention {
    Full,     // <a> over (zeta, eta_v, eta_n): weights (1,1,2), length p+v+n
    EtaOnly,  // <a> over (eta_v, eta_n): weights (1,2), length v+n
};

inline long weighted_order(const std::vector<int>& alpha, const AnisoSpace& space,
                           OrderConvention conv = OrderConvention::Full) {
    const std::size_t expect =
        conv == OrderConvention::Full ? std::size_t(space.total()) : std::size_t(space.transverse());
    if (alpha.size() != expect) throw std::invalid_argument("weighted_order: multi-index length mismatch");
    const std::size_t weight1 =
        conv == OrderConvention::Full ? std::size_t(space.p + space.v) : std::size_t(space.v);
    long s = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] < 0) throw std::invalid_argument("weighted_order: negative entry");
        s += (i < weight1 ? 1L : 2L) * alpha[i];
    }
    return s;
}

// Streams every integer lattice point xi with |xi|' <= R, lexicographic in
// (zeta, eta_v, eta_n). Component bounds: |zeta_i|,|eta_v,i| <= R, |eta_n,i| <= R^2.
void for_each_lattice_point(const AnisoSpace& space, double R,
                            const std::function<void(const Covector&)>& fn);

// Materialized ball, guarded by a cardinality cap.
std::vector<Covector> aniso_ball(const AnisoSpace& space, double R, std::size_t cap = 50'000'000);

std::size_t aniso_ball_count(const AnisoSpace& space, double R);

}  // namespace bifcalc::aniso
