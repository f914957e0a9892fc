#pragma once

#include "bifcalc/cm.hpp"
#include "bifcalc/groupoid.hpp"
#include "bifcalc/sobolev.hpp"

namespace bifcalc::spectral {

using torus::LinOp;
using torus::Mat;
using torus::TorusGrid;

// ---- summability fits --------------------------------------------------------

struct SummabilityFit {
    std::vector<int> grids;
    std::vector<double> r_per_grid;
    double r_extrapolated = 0.0;
    double index_weight = 1.0;  // TR mass per matrix singular value (1/|Gamma|)
};

// Fit of mu_t ~ c t^{-1/r} on sorted singular values, restricted to the window
// where the anisotropic ball is unsaturated: values between mu_max/sqrt(1+X^2)
// for X in [xmin, N/2]. The window-edge bias scales like 1/X_max^2, so the
// per-grid exponents are extrapolated linearly in 1/N^2.
double fit_exponent_windowed(const Eigen::VectorXd& mu, int N, double xmin = 1.0);
double extrapolate_exponent(const std::vector<int>& grids, const std::vector<double>& r_per_grid);

// ---- torus models for the headline triples ------------------------------------

// Crossed-product model on T^p x T^v x T^n: Gamma = Z/order acting by grid
// translations on the last n-axis, phi_g = c_g * (Gaussian leaf bump), and the
// lifted operator D_rtimes. Singular values of pihat(phi) (D_rtimes + i)^{-1}
// stream per transverse frequency; TR mass per value is 1/|Gamma|.
struct CrossedTorusModel {
    TorusGrid grid;
    int gamma_order = 2;
    std::vector<double> coeffs;  // c_g, g = 0..order-1
    double bump_width = 0.8;
};

Eigen::VectorXd crossed_resolvent_singvals(const CrossedTorusModel& model, const LinOp& D);

// || [D, M_phi] || on the transverse factor: the bounded-commutator axiom for
// algebra elements with transverse position dependence (leafwise kernels
// commute with the constant-coefficient D exactly). Power iteration with DFT
// switches; phi takes the transverse position vector.
double transverse_commutator_norm(const LinOp& D, const TorusGrid& grid,
                                  const std::function<double(const Eigen::VectorXd&)>& phi,
                                  int iters = 60);

// Invariant (Atiyah) model: a = pi(bump) on the same grid, tau mass 1/|Gamma|.
Eigen::VectorXd invariant_resolvent_singvals(const TorusGrid& grid, double bump_width, const LinOp& D);

struct AxiomReport {
    SummabilityFit fit;
    double claimed_dimension = 0.0;
    std::vector<double> commutator_norms;  // per grid
    bool summability_pass = false;
    bool commutator_pass = false;
    bool pass = false;
};

// check the two semi-finite spectral-triple axioms across grid refinements for
// a supplied model factory (grid -> (singvals of a (D+i)^{-1}, ||[D,a]||))
AxiomReport check_axioms(const std::vector<int>& grids,
                         const std::function<std::pair<Eigen::VectorXd, double>(int)>& model,
                         double claimed_dimension, double index_weight = 1.0);

// ---- Dixmier machinery ---------------------------------------------------------

struct DixmierSlope {
    double slope = 0.0;
    std::vector<double> ladder_T, partial_sums;
};

// slope of partial singular-value sums against log T, T-ladder restricted to
// the unsaturated window (|eta|'-scale in [1.5, N/2] mapped through the
// (-hom_dim)-homogeneous decay of the head)
DixmierSlope dixmier_slope(const Eigen::VectorXd& mu, int N, int hom_dim, double index_weight = 1.0);

// mu_R-integral over the anisotropic unit sphere {|eta|' = 1} of the fiberwise
// trace of sigma at the leaf diagonal, times the unit-volume of the base:
//   integral = hom_dim * int_{|eta|' <= 1} tr sigma(x, x, eta/|eta|'-projected) |eta|'^{hom_dim} deta
// evaluated by tensor quadrature; returned up to this fixed normalization.
double dixmier_symbol_integral(const symbols::PrincipalSymbol& sigma, const aniso::AnisoSpace& space,
                               const symbols::LeafGrid& leaf, int points_per_axis = 48);
// Monte Carlo oracle for the same integral
double dixmier_symbol_integral_mc(const symbols::PrincipalSymbol& sigma, const aniso::AnisoSpace& space,
                                  const symbols::LeafGrid& leaf, long samples, unsigned seed = 12345);

// ---- Connes-Chern pairing -------------------------------------------------------

enum class TraceKind { PlainTrace, TR, Tau };

struct ChernContext {
    TraceKind kind = TraceKind::PlainTrace;
    const groupoid::LeafGroupoid* G = nullptr;
    const groupoid::GroupAction* A = nullptr;
};

// trace(a0 [F,a1] ... [F,ar]), r odd
std::complex<double> chern_pair(const std::vector<Mat>& a, const Mat& F, const ChernContext& ctx, int r);

// sign(D) with zero eigenvalues mapped to +1; reports how many were affected
Mat sign_of(const Mat& D, int* zero_count = nullptr, double tol = 1e-12);

}  // namespace bifcalc::spectral
