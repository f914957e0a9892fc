#pragma once

#include "bifcalc/quantize.hpp"

namespace bifcalc::cm {

using torus::LinOp;
using torus::Mat;
using torus::TorusGrid;

// Fiber Lambda^*(V* (x) C) (x) Lambda^*(nu* (x) C): basis indexed by subset
// pairs (S_v, S_n), dimension 2^v 2^n. Exterior multiplications satisfy the
// canonical anticommutation relations; (-1)^{deg_n} is the diagonal involution
// used in Q = Q_V (-1)^{deg_n} + Q_N.
struct FormBundle {
    int v = 0, n = 0;

    explicit FormBundle(int v_, int n_) : v(v_), n(n_) {}
    int dim() const { return 1 << (v + n); }
    int deg_v(int basis) const { return __builtin_popcount(unsigned(basis) & ((1u << v) - 1)); }
    int deg_n(int basis) const { return __builtin_popcount(unsigned(basis) >> v); }

    Mat ext_v(int j) const;  // e(dv_j), 0 <= j < v
    Mat ext_n(int j) const;  // e(dn_j), 0 <= j < n
    Mat gamma_v() const;     // (-1)^{deg_v}
    Mat gamma_n() const;     // (-1)^{deg_n}
};

struct CmOperators {
    TorusGrid grid;
    LinOp dV, dN, QV, QN, Q;
};

// Constant-coefficient assembly per transverse frequency:
//   dV(eta) = sum_j i eta_v,j e(dv_j),   dN(eta) = sum_j i eta_n,j e(dn_j),
//   Q_V = dV dV* - dV* dV,  Q_N = dN + dN*,  Q = Q_V (-1)^{deg_n} + Q_N.
CmOperators build_cm_complex(const TorusGrid& grid);

enum class DsignMethod { ClosedForm, Quadrature };

// eigenvalue map of the spectral formula D = (pi sqrt 2)^{-1} int_0^inf Q (Q^2+lambda)^{-1} lambda^{-1/4} dlambda
double dsign_scalar(double q, DsignMethod method, double quad_tol = 1e-9);

// per-frequency eigendecomposition of Q, eigenvalues mapped through dsign_scalar
LinOp dsign(const CmOperators& ops, DsignMethod method);

struct SymbolCheck {
    bool pass = false;
    double worst_d4 = 0.0;      // max relative deviation of D^4-block from (|eta_v|^4+|eta_n|^2) Id
    double worst_scalar = 0.0;  // max relative off-scalar part of D^2-blocks
    long frequencies_checked = 0;
};

// verifies D^4 = (|eta_v|^4 + |eta_n|^2) Id and D^2 scalar per frequency with
// |eta|' >= 1, at relative tolerance tol
SymbolCheck transverse_symbol_check(const LinOp& D, const TorusGrid& grid, double tol = 1e-8);

}  // namespace bifcalc::cm
