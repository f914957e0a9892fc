#pragma once

#include <functional>
#include <map>
#include <string>

#include "bifcalc/aniso.hpp"

namespace bifcalc::symbols {

using Mat = Eigen::MatrixXcd;

// A single evaluation point; slots unused by a given symbol kind stay empty.
struct SymbolArgs {
    Eigen::VectorXd z;      // oscillatory leaf variable (full amplitudes)
    Eigen::VectorXd x;      // leaf position
    Eigen::VectorXd x2;     // second leaf position (reduced amplitudes)
    Eigen::VectorXd y;      // transverse position
    Eigen::VectorXd sigma;  // leaf covector (full amplitudes)
    aniso::Covector xi;     // (zeta, eta_v, eta_n)
};

enum class SymbolKind {
    FullAmplitude,     // k(z, x, y, sigma, zeta, eta)
    ReducedAmplitude,  // a(x, x', y, eta)
    Multiplier,        // a(zeta, eta)
};

// A bi-filtered symbol: a closed-form evaluator with declared bi-order (m, l)
// and fiber dimension. Derivatives default to central differences with step
// h = 1e-4 * (1 + |coordinate|); analytic partials can be supplied instead.
struct Symbol {
    SymbolKind kind = SymbolKind::Multiplier;
    std::function<Mat(const SymbolArgs&)> eval;
    aniso::BiOrder declared_order{};
    int fiber_dim = 1;
    int derivative_depth = 3;  // supported central-difference depth
    bool y_dependent = false;  // reduced/full amplitudes only
    // serialization identity for experiment configs
    std::string expression_id;
    std::map<std::string, double> parameters;

    Mat operator()(const SymbolArgs& a) const { return eval(a); }
};

struct EstimateReport {
    bool pass = false;
    double worst_ratio = 0.0;
    double growth_factor = 0.0;
    SymbolArgs witness;
    std::string note;
};

// Samples along dilation rays to the given radius and checks the symbol
// estimate |d^a_{zeta,eta} d^b_sigma d^g k| <= C (1+|zeta|+|eta|')^{m-<a>} (1+|sigma|)^{l-|b|}
// for all multi-index combinations up to derivative_depth. "pass" means the
// worst weighted ratio stabilizes: shell max at 2R over shell max at R below
// the growth tolerance.
EstimateReport verify_estimate(const Symbol& s, aniso::BiOrder order, const aniso::AnisoSpace& space,
                               int derivative_depth, int sample_budget, double max_radius = 64.0,
                               double growth_tol = 1.1);

// Principal symbol: an evaluator on nonzero covectors, exactly m-homogeneous
// for the anisotropic dilation (relative tolerance 1e-8 in the validity regime
// |eta|' >= 1, |sigma| >= 1).
struct PrincipalSymbol {
    SymbolKind kind = SymbolKind::Multiplier;
    std::function<Mat(const SymbolArgs&)> eval;
    double degree = 0.0;
    int fiber_dim = 1;

    Mat operator()(const SymbolArgs& a) const { return eval(a); }
};

// Extracts the degree-m leading term by evaluating s(lambda.eta)/lambda^m at
// lambda in {2^8, 2^9, 2^10} and Richardson-extrapolating in 1/lambda; throws
// if successive values disagree beyond 1e-6 relative (wrong m or non-classical
// symbol). Identically-zero symbols return the zero principal symbol.
PrincipalSymbol principal_part(const Symbol& s, double m, double rel_tol = 1e-6);

// Constant block-triangular holonomy [[A_nn, A_nv],[0, A_vv]] acting on
// (eta_n, eta_v); identity by default (flat model).
struct Holonomy {
    Eigen::MatrixXd A_nn, A_nv, A_vv;
    static Holonomy identity(int v, int n);
    // transported covector, truncated to its top-degree homogeneous part:
    // eta_n -> A_nn eta_n, eta_v -> A_vv eta_v (the A_nv eta_v term is lower
    // order for the (1,2)-weighting and is dropped)
    aniso::Covector transport_top(const aniso::Covector& xi) const;
};

// Discretized leaf I^p for kernel-valued principal symbols.
struct LeafGrid {
    int p = 1;
    int points = 8;       // per axis
    double spacing = 1.0 / 8.0;
};

// Composition of leafwise-kernel-valued principal symbols (reduced-amplitude
// kind): convolution over the leaf of pointwise matrix products, the second
// argument transported by the (transposed) holonomy and truncated to its
// top-degree part. Result is (m1+m2)-homogeneous.
PrincipalSymbol compose_principal(const PrincipalSymbol& s1, const PrincipalSymbol& s2,
                                  const LeafGrid& leaf, const Holonomy& hol);

}  // namespace bifcalc::symbols
