#pragma once

#include <string>
#include <vector>

#include "bifcalc/linop.hpp"
#include "bifcalc/quantize.hpp"

namespace bifcalc::sobolev {

using torus::LinOp;
using torus::TorusGrid;
using torus::Vec;

// weight (1 + |xi|')^s (1 + |zeta|)^k at a covector
double sobolev_weight(const aniso::Covector& xi, double s, double k);

// || u ||_{s,k} with the unitary DFT scaling, so s = k = 0 is the plain l2 norm
double sobolev_norm(const Vec& u, const TorusGrid& grid, double s, double k);

// classical Sobolev norm || u ||_{H^t} (isotropic weight (1+|xi|)^t), same scaling
double classical_sobolev_norm(const Vec& u, const TorusGrid& grid, double t);

// largest singular value of W_{s',k'} A W_{s,k}^{-1}
double op_norm_between(const LinOp& A, double s, double k, double s2, double k2);

// exact sup over the lattice of the weighted symbol ratio (diagonal case oracle)
double diagonal_weighted_sup(const LinOp& A, double s, double k, double s2, double k2);

double schatten_norm(const LinOp& A, double p);
double trace_norm(const LinOp& A);
double hs_norm(const LinOp& A);

// ---- Lemma "TraceClass" lattice experiments --------------------------------

enum class SumMode {
    EtaOnly,  // sum over {|eta|' <= R} of (1 + |eta|')^{2m}
    Joint,    // sum over {|xi|' <= R} of (1 + |zeta|)^{2l} (1 + |zeta| + |eta|')^{2m}
};

struct ConvergenceReport {
    bool converged = false;
    std::vector<double> partial_sums;
    std::vector<double> increment_ratios;
    double extrapolated = 0.0;      // when converged
    double growth_exponent = 0.0;   // when diverged: slope of log S vs log R
};

// Geometric-decay classifier: converged iff every increment ratio <= 0.9.
ConvergenceReport lattice_sum_convergence(double m, double l, const aniso::AnisoSpace& space,
                                          const std::vector<double>& radii, SumMode mode);

struct SweepRow {
    double m = 0.0, l = 0.0;
    std::vector<int> grids;
    std::vector<double> trace_norms, hs_norms, op_norms;
    std::vector<double> trace_drifts, hs_drifts;  // per doubling
    bool trace_stable = false, hs_stable = false;
    bool trace_predicted = false, hs_predicted = false;  // paper thresholds
};

// For each order: model_op(m,l) composed with pi_rep of a fixed continuum
// Gaussian bump; norms across grid sizes. Stable := drifts non-increasing and
// the finest-doubling drift < 10%. Predicted columns carry the paper's
// sufficient thresholds (||.||_2: m < -(v+2n)/2, l < -p/2; ||.||_1: m < -(v+2n), l < -p).
std::vector<SweepRow> threshold_sweep(const aniso::AnisoSpace& space, const std::vector<int>& grids,
                                      const std::vector<std::pair<double, double>>& orders,
                                      double bump_width = 0.8);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace bifcalc::sobolev
