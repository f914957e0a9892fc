#pragma once

#include "bifcalc/linop.hpp"
#include "bifcalc/symbol.hpp"

namespace bifcalc::torus {

// Quantization on the discrete torus. Normalization anchor: the multiplier
// a == 1 (and for reduced amplitudes a(x,x',.,.) = delta_{x,x'}, Kronecker)
// quantizes to the identity. Transverse sums carry 1/prod(transverse points);
// the leaf x'-sum in the reduced formula is a plain (counting) sum.
//
// Reduced amplitudes independent of y produce LeafBlocked operators (block
// a(x,x',eta) per transverse frequency); y-dependent ones assemble densely.
// Full amplitudes are reduced through the discrete oscillatory z,sigma,zeta
// sum first (see reduce_full_amplitude).
LinOp quantize(const symbols::Symbol& s, const TorusGrid& grid,
               std::optional<double> eval_radius = std::nullopt);

// The discrete reduction k(z,x,y,sigma,zeta,eta) -> a(x,x',y,eta):
//   a = (1/L^2) sum_{z,zeta,sg} k(z, x, y, zeta + sg, zeta, eta) e^{i[(x-x')zeta + z sg]}
// with z over leaf points, zeta and sg over the leaf frequency lattice. When
// `wrap_sigma` the value zeta+sg is folded into the principal window (this is
// what the direct quantization formula does); unwrapped evaluation is the
// faithful oscillatory reduction and differs by sigma-aliasing only.
symbols::Symbol reduce_full_amplitude(const symbols::Symbol& s, const TorusGrid& grid, bool wrap_sigma);

// Direct 6-fold discrete quantization of a full amplitude (dense; small grids).
LinOp quantize_full_direct(const symbols::Symbol& s, const TorusGrid& grid);

// Model operator A_{m,l}: Fourier multiplier
// (1 + (|zeta|^2+|eta_v|^2)^2 + |eta_n|^2)^{m/4} (1 + |zeta|^2)^{l/2}.
LinOp model_op(double m, double l, const TorusGrid& grid);
double model_symbol(double m, double l, const aniso::Covector& xi);

// A leafwise kernel k(x, x', y) with optional unitary fiber action; y-independent
// kernels are the refinement-stable case used by the sweeps.
struct LeafKernel {
    // k(x_index, x2_index, y_index) -> fiber block; y_index < 0 when y-independent
    std::function<Mat(long, long, long)> eval;
    bool y_dependent = false;
    double support_radius = 0.0;  // graph distance on the leaf grid

    // unit of leafwise convolution: Kronecker delta / leaf spacing
    static LeafKernel unit_delta(const TorusGrid& grid);
    // periodic Gaussian profile exp(-d(x,x')^2 / (2 width^2)), fixed in the
    // continuum; positive semidefinite as a circulant
    static LeafKernel gaussian_bump(const TorusGrid& grid, double width, double amplitude = 1.0);
};

// Averaging representation pi(k) with leaf Haar weight h = 2*pi/N (Lebesgue
// class, so norms are stable under refinement). Declared order (0, -inf).
LinOp pi_rep(const LeafKernel& k, const TorusGrid& grid);

// leafwise convolution and involution of y-independent kernels (same Haar weight)
LeafKernel leaf_convolve(const LeafKernel& k1, const LeafKernel& k2, const TorusGrid& grid);
LeafKernel leaf_involute(const LeafKernel& k, const TorusGrid& grid);

}  // namespace bifcalc::torus
