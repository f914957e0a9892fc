#pragma once

#include <map>
#include <random>

#include <Eigen/Dense>

namespace bifcalc::groupoid {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

Mat random_unitary(int a, std::mt19937_64& rng);

// Finite group: multiplication table, identity at index 0.
struct Group {
    int n = 1;
    std::vector<int> table;  // table[a*n+b] = a.b
    std::vector<int> inv;

    static Group trivial();
    static Group cyclic(int c);
    static Group sym3();
    int mul(int a, int b) const { return table[std::size_t(a * n + b)]; }
};

// Finite groupoid with units X = L x T and arrows the pair groupoid within
// each t: arrow (l_r, l_s, t) from (l_s,t) to (l_r,t). Haar weights live on
// units (counting measure by default); the fiber action is generated by unit
// potentials V(x) in U(a) (W_{(l',l,t)} = V(l',t) V(l,t)^*), which is exactly
// the functorial form on a pair groupoid.
struct LeafGroupoid {
    int L = 1, T = 1, fiber = 1;
    Eigen::VectorXd haar;    // per (l,t), default ones
    std::vector<Mat> potential;  // per (l,t), default identity

    LeafGroupoid(int L_, int T_, int fiber_ = 1);
    long units() const { return long(L) * T; }
    long unit_index(int l, int t) const { return long(t) * L + l; }
    long hilbert_dim() const { return units() * fiber; }
    Mat W(int lr, int ls, int t) const;  // holonomy action on the fiber
};

// Kernel = arrow maps k(l_r, l_s, t) in C^{a x a}; involutive convolution
//   (k1 k2)(l'',l,t) = sum_{l'} k1(l'',l',t) W k2(l',l,t) W^* haar(l',t)
//   k*(gamma) = W k(gamma^{-1})^* W^*
// (the W-twist makes pi a *-homomorphism for any unit potentials; it is the
// identity twist when the potentials are).
struct Kernel {
    std::vector<Mat> blocks;  // per t: (L a) x (L a)

    static Kernel zero(const LeafGroupoid& G);
    static Kernel unit_delta(const LeafGroupoid& G);
    static Kernel random(const LeafGroupoid& G, std::mt19937_64& rng, double scale = 1.0);
    Mat at(const LeafGroupoid& G, int lr, int ls, int t) const;
    void set(const LeafGroupoid& G, int lr, int ls, int t, const Mat& m);
    double l1_norm(const LeafGroupoid& G) const;  // groupoid L1 norm
};

Kernel convolve(const LeafGroupoid& G, const Kernel& k1, const Kernel& k2);
Kernel involute(const LeafGroupoid& G, const Kernel& k);
Kernel kernel_add(const Kernel& k1, const Kernel& k2, std::complex<double> alpha = 1.0);

// averaging representation on l2(X) (x) C^a
Mat pi_rep(const LeafGroupoid& G, const Kernel& k);

// ---- group action and crossed product --------------------------------------

// Right action of Gamma on units through a permutation of T (leaves move,
// leaf coordinates stay); s,r-equivariant by construction.
struct GroupAction {
    Group gamma;
    std::vector<std::vector<int>> t_perm;  // per g: t -> t.g

    static GroupAction cyclic_shift(const LeafGroupoid& G, int order);
    int act_t(int g, int t) const { return t_perm[std::size_t(g)][std::size_t(t)]; }
    bool free_on_units() const;
    // unitary U_g on l2(X) (x) C^a: (U_g xi)(x) = xi(x.g)
    Mat unitary(const LeafGroupoid& G, int g) const;
    // kernel action (g.k)(gamma) = k(gamma.g); satisfies pi(g.k) = U_g pi(k) U_g^*
    Kernel act(const LeafGroupoid& G, int g, const Kernel& k) const;
};

// Finitely supported map Gamma -> kernels.
struct CrossedElement {
    std::vector<Kernel> at;  // indexed by g

    static CrossedElement zero(const LeafGroupoid& G, const GroupAction& A);
    static CrossedElement random(const LeafGroupoid& G, const GroupAction& A, std::mt19937_64& rng);
};

// the paper's convolution formula, literal form
CrossedElement crossed_mul(const LeafGroupoid& G, const GroupAction& A, const CrossedElement& phi,
                           const CrossedElement& psi);
// the equivalent form (phi*psi)(g) = sum_{g1 g2 = g} phi(g1) * (g1 . psi(g2))
CrossedElement crossed_mul_alt(const LeafGroupoid& G, const GroupAction& A, const CrossedElement& phi,
                               const CrossedElement& psi);
CrossedElement crossed_star(const LeafGroupoid& G, const GroupAction& A, const CrossedElement& phi);
CrossedElement crossed_star_alt(const LeafGroupoid& G, const GroupAction& A, const CrossedElement& phi);

double crossed_max_diff(const LeafGroupoid& G, const CrossedElement& a, const CrossedElement& b);

// ---- the N-model on H (x) l2(Gamma) -----------------------------------------

// basis ordering: (g, unit, fiber) -> (g * units + unit) * fiber + c
Mat rep_pihat(const LeafGroupoid& G, const GroupAction& A, const CrossedElement& phi);

// entry-law membership: T_{g',g} = T_{g'g^{-1}, e} U_{g'g^{-1}}
double entry_law_defect(const LeafGroupoid& G, const GroupAction& A, const Mat& T);
// right regular representation R_h (commutant generator)
Mat right_regular(const LeafGroupoid& G, const GroupAction& A, int h);
// average of M over conjugation by all R_h: lands in the entry-law carrier
Mat commutant_average(const LeafGroupoid& G, const GroupAction& A, const Mat& M);

double trace_TR(const LeafGroupoid& G, const GroupAction& A, const Mat& T);

// block-diagonal lift D_rtimes (xi)(g) = D(xi(g))
Mat lift_rtimes(const LeafGroupoid& G, const GroupAction& A, const Mat& D);

// ---- Galois (Atiyah) side ----------------------------------------------------

// fundamental-domain indicator for a free T-action: representatives t in [0, T/|Gamma|)
Mat domain_indicator(const LeafGroupoid& G, const GroupAction& A);
bool is_invariant(const LeafGroupoid& G, const GroupAction& A, const Mat& T, double tol = 1e-10);
// tau(T) = Tr(M_chi T M_chi); rejects non-invariant input
double trace_tau(const LeafGroupoid& G, const GroupAction& A, const Mat& T, double tol = 1e-10);

// cutoff rho on units with sum_g rho(x g)^2 = 1 (checked to 1e-12)
Eigen::VectorXd make_cutoff(const LeafGroupoid& G, const GroupAction& A, std::mt19937_64& rng);

// quotient-groupoid kernel (downstairs): blocks per orbit [t], L x L fiber-valued
struct QuotientKernel {
    std::vector<Mat> blocks;  // per orbit representative
    static QuotientKernel random(const LeafGroupoid& G, const GroupAction& A, std::mt19937_64& rng);
};

// pi of the pulled-back kernel: Gamma-invariant operator on H
Mat pi_quotient(const LeafGroupoid& G, const GroupAction& A, const QuotientKernel& k);

// Morita morphism Phi(phi)(gamma; g) = phi(gamma) rho(r(gamma)) rho(s(gamma) g)
CrossedElement morita_phi(const LeafGroupoid& G, const GroupAction& A, const QuotientKernel& phi,
                          const Eigen::VectorXd& rho);

// lambda(eta)(x; g) = rho(x) eta(x g),  lambdahat = lambda^*
Mat lambda_map(const LeafGroupoid& G, const GroupAction& A, const Eigen::VectorXd& rho);

// ---- finite covers of finite groupoids (section 2.1 morphism) ---------------

// Cover Ghat = pair(L) x Lambda per leaf; phi(k)(l',l,t) = sum_lambda k(l',l,lambda,t)
struct CoverKernel {
    std::vector<Mat> blocks;  // per (t, lambda): (L a) x (L a), index t*|Lambda|+lambda
};
CoverKernel cover_convolve(const LeafGroupoid& G, const Group& Lambda, const CoverKernel& k1,
                           const CoverKernel& k2);
CoverKernel cover_involute(const LeafGroupoid& G, const Group& Lambda, const CoverKernel& k);
Kernel cover_pushforward(const LeafGroupoid& G, const Group& Lambda, const CoverKernel& k);
double cover_l1_norm(const LeafGroupoid& G, const Group& Lambda, const CoverKernel& k);

}  // namespace bifcalc::groupoid
