#pragma once

#include "bifcalc/quantize.hpp"
#include "bifcalc/sobolev.hpp"

namespace bifcalc::parametrix {

using torus::LinOp;
using torus::TorusGrid;

// Conic neighborhood U_eps = { |zeta| < eps |eta|' } of the cotransverse bundle.
struct ConicRegion {
    double eps = 0.25;
    bool contains(const aniso::Covector& xi) const {
        return xi.zeta.norm() < eps * aniso::hnorm(xi);
    }
};

// Smooth 0-homogeneous cutoff in t = |zeta|/|eta|': 1 on U_eps, 0 outside U_{2eps}.
double conic_cutoff(const aniso::Covector& xi, double eps);

struct EllipticityError : std::runtime_error {
    aniso::Covector witness;
    explicit EllipticityError(const aniso::Covector& w)
        : std::runtime_error("invert_principal: ellipticity violated at a sampled point"), witness(w) {}
};

// Pointwise inverse of a transversely elliptic principal symbol on U_{2eps},
// cut off by the homogeneous transition. Ellipticity (smallest singular value
// >= lower_bound at |xi|' = 1) is sampled on rays through the doubled region;
// a violation reports the witness ray.
symbols::PrincipalSymbol invert_principal(const symbols::PrincipalSymbol& sigma, const ConicRegion& region,
                                          double lower_bound, const aniso::AnisoSpace& space,
                                          int sample_rays = 64);

struct ParametrixResult {
    LinOp Q;
    LinOp R;  // I - QP
    LinOp S;  // I - PQ
    int steps = 0;
};

// Build Q0 by quantizing the cutoff inverse of the principal symbol, then
// refine Q_{j+1} = Q_j + Q_j (I - P Q_j). Each step at least doubles the
// transversal order of the residual on the cone.
ParametrixResult build_parametrix(const LinOp& P, const symbols::PrincipalSymbol& sigma, int steps,
                                  const ConicRegion& region, double lower_bound = 0.1);

// the same Neumann refinement from a supplied starting parametrix (so an exact
// multiplier inverse closes the residual to zero after one step)
ParametrixResult refine_parametrix(const LinOp& P, const LinOp& Q0, int steps, const ConicRegion& region);

// Fitted transversal order of a multiplier residual on the cone: slope of
// log sup_{cone shell |eta|'~X} |r| against log X.
double residual_cone_order(const LinOp& R, const ConicRegion& region);

struct ResidualReport {
    std::vector<int> grids;
    std::vector<double> trace_qp, trace_pq;  // ||pi(k)(I-QP)||_1, ||pi(k)(I-PQ)||_1 per grid
    std::vector<double> drift_qp, drift_pq;
    bool stable = false;
};

// Corollary "TraceParametrix" at desk scale: rebuilds P, Q on each grid via the
// supplied factory and reports pi(k)-damped residual trace norms across grids.
ResidualReport residual_report(
    const std::function<std::pair<LinOp, ParametrixResult>(const TorusGrid&)>& factory,
    const aniso::AnisoSpace& space, const std::vector<int>& grids, double bump_width = 0.8);

}  // namespace bifcalc::parametrix
