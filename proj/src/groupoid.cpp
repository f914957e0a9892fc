#include "bifcalc/groupoid.hpp"

#include <numeric>
#include <stdexcept>

namespace bifcalc::groupoid {

Mat random_unitary(int a, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat m(a, a);
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < a; ++j) m(i, j) = std::complex<double>(g(rng), g(rng));
    Eigen::HouseholderQR<Mat> qr(m);
    Mat Q = qr.householderQ();
    return Q;
}

Group Group::trivial() { return cyclic(1); }

Group Group::cyclic(int c) {
    if (c < 1) throw std::invalid_argument("Group::cyclic: order >= 1");
    Group G;
    G.n = c;
    G.table.resize(std::size_t(c * c));
    G.inv.resize(std::size_t(c));
    for (int a = 0; a < c; ++a) {
        G.inv[std::size_t(a)] = (c - a) % c;
        for (int b = 0; b < c; ++b) G.table[std::size_t(a * c + b)] = (a + b) % c;
    }
    return G;
}

Group Group::sym3() {
    // permutations of {0,1,2} listed as (id, (01), (02), (12), (012), (021))
    const int perms[6][3] = {{0, 1, 2}, {1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};
    Group G;
    G.n = 6;
    G.table.resize(36);
    G.inv.resize(6);
    auto compose = [&](int a, int b) {  // (a.b)(x) = a(b(x))
        int out[3];
        for (int x = 0; x < 3; ++x) out[x] = perms[a][perms[b][x]];
        for (int k = 0; k < 6; ++k)
            if (out[0] == perms[k][0] && out[1] == perms[k][1] && out[2] == perms[k][2]) return k;
        throw std::logic_error("sym3 composition");
    };
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) G.table[std::size_t(a * 6 + b)] = compose(a, b);
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
            if (G.table[std::size_t(a * 6 + b)] == 0) G.inv[std::size_t(a)] = b;
    return G;
}

LeafGroupoid::LeafGroupoid(int L_, int T_, int fiber_) : L(L_), T(T_), fiber(fiber_) {
    if (L < 1 || T < 1 || fiber < 1) throw std::invalid_argument("LeafGroupoid: bad sizes");
    haar = Eigen::VectorXd::Ones(units());
    potential.assign(std::size_t(units()), Mat::Identity(fiber, fiber));
}

Mat LeafGroupoid::W(int lr, int ls, int t) const {
    return potential[std::size_t(unit_index(lr, t))] * potential[std::size_t(unit_index(ls, t))].adjoint();
}

Kernel Kernel::zero(const LeafGroupoid& G) {
    Kernel k;
    k.blocks.assign(std::size_t(G.T), Mat::Zero(G.L * G.fiber, G.L * G.fiber));
    return k;
}

Kernel Kernel::unit_delta(const LeafGroupoid& G) {
    Kernel k = zero(G);
    for (int t = 0; t < G.T; ++t)
        for (int l = 0; l < G.L; ++l)
            k.set(G, l, l, t, Mat::Identity(G.fiber, G.fiber) / G.haar[G.unit_index(l, t)]);
    return k;
}

Kernel Kernel::random(const LeafGroupoid& G, std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> g(0.0, scale);
    Kernel k = zero(G);
    for (auto& b : k.blocks)
        for (long i = 0; i < b.rows(); ++i)
            for (long j = 0; j < b.cols(); ++j) b(i, j) = std::complex<double>(g(rng), g(rng));
    return k;
}

Mat Kernel::at(const LeafGroupoid& G, int lr, int ls, int t) const {
    return blocks[std::size_t(t)].block(lr * G.fiber, ls * G.fiber, G.fiber, G.fiber);
}

void Kernel::set(const LeafGroupoid& G, int lr, int ls, int t, const Mat& m) {
    blocks[std::size_t(t)].block(lr * G.fiber, ls * G.fiber, G.fiber, G.fiber) = m;
}

double Kernel::l1_norm(const LeafGroupoid& G) const {
    double mx = 0.0;
    for (int t = 0; t < G.T; ++t)
        for (int l = 0; l < G.L; ++l) {
            double in = 0.0, out = 0.0;
            for (int l2 = 0; l2 < G.L; ++l2) {
                in += at(G, l, l2, t).operatorNorm() * G.haar[G.unit_index(l2, t)];
                out += at(G, l2, l, t).operatorNorm() * G.haar[G.unit_index(l2, t)];
            }
            mx = std::max({mx, in, out});
        }
    return mx;
}

Kernel convolve(const LeafGroupoid& G, const Kernel& k1, const Kernel& k2) {
    Kernel out = Kernel::zero(G);
    for (int t = 0; t < G.T; ++t)
        for (int lr = 0; lr < G.L; ++lr)
            for (int ls = 0; ls < G.L; ++ls) {
                Mat acc = Mat::Zero(G.fiber, G.fiber);
                for (int lm = 0; lm < G.L; ++lm) {
                    const Mat w = G.W(lr, lm, t);
                    acc += k1.at(G, lr, lm, t) * w * k2.at(G, lm, ls, t) * w.adjoint() *
                           G.haar[G.unit_index(lm, t)];
                }
                out.set(G, lr, ls, t, acc);
            }
    return out;
}

Kernel involute(const LeafGroupoid& G, const Kernel& k) {
    Kernel out = Kernel::zero(G);
    for (int t = 0; t < G.T; ++t)
        for (int lr = 0; lr < G.L; ++lr)
            for (int ls = 0; ls < G.L; ++ls) {
                const Mat w = G.W(lr, ls, t);
                out.set(G, lr, ls, t, w * k.at(G, ls, lr, t).adjoint() * w.adjoint());
            }
    return out;
}

Kernel kernel_add(const Kernel& k1, const Kernel& k2, std::complex<double> alpha) {
    Kernel out = k1;
    for (std::size_t t = 0; t < out.blocks.size(); ++t) out.blocks[t] += alpha * k2.blocks[t];
    return out;
}

Mat pi_rep(const LeafGroupoid& G, const Kernel& k) {
    const long dim = G.hilbert_dim();
    Mat P = Mat::Zero(dim, dim);
    for (int t = 0; t < G.T; ++t)
        for (int lr = 0; lr < G.L; ++lr)
            for (int ls = 0; ls < G.L; ++ls) {
                const double wl = std::sqrt(G.haar[G.unit_index(lr, t)]);
                const double wr = std::sqrt(G.haar[G.unit_index(ls, t)]);
                P.block(G.unit_index(lr, t) * G.fiber, G.unit_index(ls, t) * G.fiber, G.fiber, G.fiber) =
                    wl * k.at(G, lr, ls, t) * G.W(lr, ls, t) * wr;
            }
    return P;
}

GroupAction GroupAction::cyclic_shift(const LeafGroupoid& G, int order) {
    if (G.T % order != 0) throw std::invalid_argument("cyclic_shift: order must divide T");
    GroupAction A;
    A.gamma = Group::cyclic(order);
    A.t_perm.resize(std::size_t(order));
    const int step = G.T / order;
    for (int g = 0; g < order; ++g) {
        A.t_perm[std::size_t(g)].resize(std::size_t(G.T));
        for (int t = 0; t < G.T; ++t) A.t_perm[std::size_t(g)][std::size_t(t)] = (t + g * step) % G.T;
    }
    return A;
}

bool GroupAction::free_on_units() const {
    for (int g = 1; g < gamma.n; ++g)
        for (std::size_t t = 0; t < t_perm[std::size_t(g)].size(); ++t)
            if (t_perm[std::size_t(g)][t] == int(t)) return false;
    return true;
}

Mat GroupAction::unitary(const LeafGroupoid& G, int g) const {
    const long dim = G.hilbert_dim();
    Mat U = Mat::Zero(dim, dim);
    for (int t = 0; t < G.T; ++t)
        for (int l = 0; l < G.L; ++l) {
            const long row = G.unit_index(l, t) * G.fiber;
            const long col = G.unit_index(l, act_t(g, t)) * G.fiber;
            U.block(row, col, G.fiber, G.fiber) = Mat::Identity(G.fiber, G.fiber);
        }
    return U;
}

Kernel GroupAction::act(const LeafGroupoid& G, int g, const Kernel& k) const {
    Kernel out = Kernel::zero(G);
    for (int t = 0; t < G.T; ++t) out.blocks[std::size_t(t)] = k.blocks[std::size_t(act_t(g, t))];
    return out;
}

CrossedElement CrossedElement::zero(const LeafGroupoid& G, const GroupAction& A) {
    CrossedElement phi;
    phi.at.assign(std::size_t(A.gamma.n), Kernel::zero(G));
    return phi;
}

CrossedElement CrossedElement::random(const LeafGroupoid& G, const GroupAction& A, std::mt19937_64& rng) {
    CrossedElement phi;
    for (int g = 0; g < A.gamma.n; ++g) phi.at.push_back(Kernel::random(G, rng));
    return phi;
}

CrossedElement crossed_mul(const LeafGroupoid& G, const GroupAction& A, const CrossedElement& phi,
                           const CrossedElement& psi) {
    const int n = A.gamma.n;
    CrossedElement out = CrossedElement::zero(G, A);
    // (phi psi)(g; gamma) = sum_{g'} int phi(g'; gamma') psi(g'^{-1} g; (gamma'^{-1} gamma) g') deta
    for (int g = 0; g < n; ++g)
        for (int gp = 0; gp < n; ++gp) {
            const int g2 = A.gamma.mul(A.gamma.inv[std::size_t(gp)], g);
            for (int t = 0; t < G.T; ++t) {
                const int tg = A.act_t(gp, t);
                for (int lr = 0; lr < G.L; ++lr)
                    for (int ls = 0; ls < G.L; ++ls) {
                        Mat acc = out.at[std::size_t(g)].at(G, lr, ls, t);
                        for (int lm = 0; lm < G.L; ++lm)
                            acc += phi.at[std::size_t(gp)].at(G, lr, lm, t) *
                                   psi.at[std::size_t(g2)].at(G, lm, ls, tg) *
                                   G.haar[G.unit_index(lm, t)];
                        out.at[std::size_t(g)].set(G, lr, ls, t, acc);
                    }
            }
        }
    return out;
}

CrossedElement crossed_mul_alt(const LeafGroupoid& G, const GroupAction& A, const CrossedElement& phi,
                               const CrossedElement& psi) {
    const int n = A.gamma.n;
    CrossedElement out = CrossedElement::zero(G, A);
    for (int g1 = 0; g1 < n; ++g1)
        for (int g2 = 0; g2 < n; ++g2) {
            const int g = A.gamma.mul(g1, g2);
            const Kernel term = convolve(G, phi.at[std::size_t(g1)], A.act(G, g1, psi.at[std::size_t(g2)]));
            out.at[std::size_t(g)] = kernel_add(out.at[std::size_t(g)], term);
        }
    return out;
}

CrossedElement crossed_star(const LeafGroupoid& G, const GroupAction& A, const CrossedElement& phi) {
    const int n = A.gamma.n;
    CrossedElement out = CrossedElement::zero(G, A);
    // phi^*(g; gamma) = conj phi(g^{-1}; gamma^{-1} g)
    for (int g = 0; g < n; ++g) {
        const int gi = A.gamma.inv[std::size_t(g)];
        for (int t = 0; t < G.T; ++t) {
            const int tg = A.act_t(g, t);
            for (int lr = 0; lr < G.L; ++lr)
                for (int ls = 0; ls < G.L; ++ls)
                    out.at[std::size_t(g)].set(G, lr, ls, t,
                                               phi.at[std::size_t(gi)].at(G, ls, lr, tg).adjoint());
        }
    }
    return out;
}

CrossedElement crossed_star_alt(const LeafGroupoid& G, const GroupAction& A, const CrossedElement& phi) {
    const int n = A.gamma.n;
    CrossedElement out = CrossedElement::zero(G, A);
    for (int g = 0; g < n; ++g) {
        const int gi = A.gamma.inv[std::size_t(g)];
        out.at[std::size_t(g)] = involute(G, A.act(G, g, phi.at[std::size_t(gi)]));
    }
    return out;
}

double crossed_max_diff(const LeafGroupoid& G, const CrossedElement& a, const CrossedElement& b) {
    (void)G;
    double mx = 0.0;
    for (std::size_t g = 0; g < a.at.size(); ++g)
        for (std::size_t t = 0; t < a.at[g].blocks.size(); ++t)
            mx = std::max(mx, (a.at[g].blocks[t] - b.at[g].blocks[t]).norm());
    return mx;
}

Mat rep_pihat(const LeafGroupoid& G, const GroupAction& A, const CrossedElement& phi) {
    const int n = A.gamma.n;
    const long H = G.hilbert_dim();
    Mat out = Mat::Zero(n * H, n * H);
    for (int gp = 0; gp < n; ++gp)
        for (int g = 0; g < n; ++g) {
            const int h = A.gamma.mul(gp, A.gamma.inv[std::size_t(g)]);
            out.block(gp * H, g * H, H, H) = pi_rep(G, phi.at[std::size_t(h)]) * A.unitary(G, h);
        }
    return out;
}

double entry_law_defect(const LeafGroupoid& G, const GroupAction& A, const Mat& T) {
    const int n = A.gamma.n;
    const long H = G.hilbert_dim();
    if (T.rows() != n * H || T.cols() != n * H) throw std::invalid_argument("entry_law_defect: size");
    // T_{g',g} = T_{g'g^{-1}} o U_{g'g^{-1}}: the whole entry depends on h = g'g^{-1}
    // only, so membership is constancy along the h-diagonals against the e-column.
    double mx = 0.0;
    for (int gp = 0; gp < n; ++gp)
        for (int g = 0; g < n; ++g) {
            const int h = A.gamma.mul(gp, A.gamma.inv[std::size_t(g)]);
            mx = std::max(mx, (T.block(gp * H, g * H, H, H) - T.block(h * H, 0, H, H)).norm());
        }
    return mx;
}

Mat right_regular(const LeafGroupoid& G, const GroupAction& A, int h) {
    const int n = A.gamma.n;
    const long H = G.hilbert_dim();
    Mat R = Mat::Zero(n * H, n * H);
    for (int g = 0; g < n; ++g)
        R.block(g * H, A.gamma.mul(g, h) * H, H, H) = Mat::Identity(H, H);
    return R;
}

Mat commutant_average(const LeafGroupoid& G, const GroupAction& A, const Mat& M) {
    const int n = A.gamma.n;
    Mat out = Mat::Zero(M.rows(), M.cols());
    for (int h = 0; h < n; ++h) {
        const Mat R = right_regular(G, A, h);
        out += R * M * R.adjoint();
    }
    return out / double(n);
}

double trace_TR(const LeafGroupoid& G, const GroupAction& A, const Mat& T) {
    (void)A;
    const long H = G.hilbert_dim();
    return T.block(0, 0, H, H).trace().real();
}

Mat lift_rtimes(const LeafGroupoid& G, const GroupAction& A, const Mat& D) {
    const int n = A.gamma.n;
    const long H = G.hilbert_dim();
    Mat out = Mat::Zero(n * H, n * H);
    for (int g = 0; g < n; ++g) out.block(g * H, g * H, H, H) = D;
    return out;
}

Mat domain_indicator(const LeafGroupoid& G, const GroupAction& A) {
    if (!A.free_on_units()) throw std::invalid_argument("domain_indicator: action not free");
    const int n = A.gamma.n;
    std::vector<bool> covered(std::size_t(G.T), false);
    std::vector<bool> rep(std::size_t(G.T), false);
    for (int t = 0; t < G.T; ++t) {
        if (covered[std::size_t(t)]) continue;
        rep[std::size_t(t)] = true;
        for (int g = 0; g < n; ++g) covered[std::size_t(A.act_t(g, t))] = true;
    }
    const long dim = G.hilbert_dim();
    Mat chi = Mat::Zero(dim, dim);
    for (int t = 0; t < G.T; ++t) {
        if (!rep[std::size_t(t)]) continue;
        for (int l = 0; l < G.L; ++l)
            chi.block(G.unit_index(l, t) * G.fiber, G.unit_index(l, t) * G.fiber, G.fiber, G.fiber) =
                Mat::Identity(G.fiber, G.fiber);
    }
    return chi;
}

bool is_invariant(const LeafGroupoid& G, const GroupAction& A, const Mat& T, double tol) {
    for (int g = 1; g < A.gamma.n; ++g) {
        const Mat U = A.unitary(G, g);
        if ((U * T * U.adjoint() - T).norm() > tol * std::max(1.0, T.norm())) return false;
    }
    return true;
}

double trace_tau(const LeafGroupoid& G, const GroupAction& A, const Mat& T, double tol) {
    if (!is_invariant(G, A, T, tol)) throw std::invalid_argument("trace_tau: operator is not Gamma-invariant");
    const Mat chi = domain_indicator(G, A);
    return (chi * T * chi).trace().real();
}

Eigen::VectorXd make_cutoff(const LeafGroupoid& G, const GroupAction& A, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.2, 1.0);
    Eigen::VectorXd f(G.units());
    for (long i = 0; i < f.size(); ++i) f[i] = u(rng);
    Eigen::VectorXd rho(G.units());
    for (int t = 0; t < G.T; ++t)
        for (int l = 0; l < G.L; ++l) {
            double s = 0.0;
            for (int g = 0; g < A.gamma.n; ++g) {
                const double fg = f[G.unit_index(l, A.act_t(g, t))];
                s += fg * fg;
            }
            rho[G.unit_index(l, t)] = f[G.unit_index(l, t)] / std::sqrt(s);
        }
    return rho;
}

QuotientKernel QuotientKernel::random(const LeafGroupoid& G, const GroupAction& A, std::mt19937_64& rng) {
    if (!A.free_on_units()) throw std::invalid_argument("QuotientKernel: free action required");
    QuotientKernel k;
    std::normal_distribution<double> g(0.0, 1.0);
    const int orbits = G.T / A.gamma.n;
    for (int o = 0; o < orbits; ++o) {
        Mat b(G.L * G.fiber, G.L * G.fiber);
        for (long i = 0; i < b.rows(); ++i)
            for (long j = 0; j < b.cols(); ++j) b(i, j) = std::complex<double>(g(rng), g(rng));
        k.blocks.push_back(b);
    }
    return k;
}

namespace {

// orbit representative index of t under the action (first hit in scan order)
int orbit_of(const GroupAction& A, int T, int t) {
    std::vector<int> reps;
    std::vector<int> orbit_id(std::size_t(T), -1);
    for (int s = 0; s < T; ++s) {
        if (orbit_id[std::size_t(s)] >= 0) continue;
        const int id = int(reps.size());
        reps.push_back(s);
        for (int g = 0; g < A.gamma.n; ++g) orbit_id[std::size_t(A.act_t(g, s))] = id;
    }
    return orbit_id[std::size_t(t)];
}

}  // namespace

Mat pi_quotient(const LeafGroupoid& G, const GroupAction& A, const QuotientKernel& k) {
    Kernel lift = Kernel::zero(G);
    for (int t = 0; t < G.T; ++t) lift.blocks[std::size_t(t)] = k.blocks[std::size_t(orbit_of(A, G.T, t))];
    return pi_rep(G, lift);
}

CrossedElement morita_phi(const LeafGroupoid& G, const GroupAction& A, const QuotientKernel& phi,
                          const Eigen::VectorXd& rho) {
    // cutoff normalization: sum_g rho(x g)^2 = 1 to 1e-12
    for (int t = 0; t < G.T; ++t)
        for (int l = 0; l < G.L; ++l) {
            double s = 0.0;
            for (int g = 0; g < A.gamma.n; ++g) {
                const double r = rho[G.unit_index(l, A.act_t(g, t))];
                s += r * r;
            }
            if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("morita_phi: cutoff not normalized");
        }
    CrossedElement out = CrossedElement::zero(G, A);
    for (int g = 0; g < A.gamma.n; ++g)
        for (int t = 0; t < G.T; ++t) {
            const int o = orbit_of(A, G.T, t);
            const int tg = A.act_t(g, t);
            for (int lr = 0; lr < G.L; ++lr)
                for (int ls = 0; ls < G.L; ++ls) {
                    const Mat val = phi.blocks[std::size_t(o)].block(lr * G.fiber, ls * G.fiber, G.fiber,
                                                                     G.fiber) *
                                    rho[G.unit_index(lr, t)] * rho[G.unit_index(ls, tg)];
                    out.at[std::size_t(g)].set(G, lr, ls, t, val);
                }
        }
    return out;
}

Mat lambda_map(const LeafGroupoid& G, const GroupAction& A, const Eigen::VectorXd& rho) {
    const int n = A.gamma.n;
    const long H = G.hilbert_dim();
    Mat lam = Mat::Zero(n * H, H);
    for (int g = 0; g < n; ++g)
        for (int t = 0; t < G.T; ++t)
            for (int l = 0; l < G.L; ++l) {
                const long row = g * H + G.unit_index(l, t) * G.fiber;
                const long col = G.unit_index(l, A.act_t(g, t)) * G.fiber;
                lam.block(row, col, G.fiber, G.fiber) =
                    rho[G.unit_index(l, t)] * Mat::Identity(G.fiber, G.fiber);
            }
    return lam;
}

CoverKernel cover_convolve(const LeafGroupoid& G, const Group& Lambda, const CoverKernel& k1,
                           const CoverKernel& k2) {
    CoverKernel out;
    out.blocks.assign(std::size_t(G.T * Lambda.n), Mat::Zero(G.L * G.fiber, G.L * G.fiber));
    for (int t = 0; t < G.T; ++t)
        for (int lam = 0; lam < Lambda.n; ++lam)
            for (int lp = 0; lp < Lambda.n; ++lp) {
                const int l1 = Lambda.mul(lam, Lambda.inv[std::size_t(lp)]);
                Mat& dst = out.blocks[std::size_t(t * Lambda.n + lam)];
                const Mat& a = k1.blocks[std::size_t(t * Lambda.n + l1)];
                const Mat& b = k2.blocks[std::size_t(t * Lambda.n + lp)];
                // leaf convolution with haar weights
                Mat weighted = b;
                for (int lm = 0; lm < G.L; ++lm)
                    weighted.block(lm * G.fiber, 0, G.fiber, G.L * G.fiber) *=
                        G.haar[G.unit_index(lm, t)];
                dst += a * weighted;
            }
    return out;
}

CoverKernel cover_involute(const LeafGroupoid& G, const Group& Lambda, const CoverKernel& k) {
    CoverKernel out;
    out.blocks.assign(std::size_t(G.T * Lambda.n), Mat::Zero(G.L * G.fiber, G.L * G.fiber));
    for (int t = 0; t < G.T; ++t)
        for (int lam = 0; lam < Lambda.n; ++lam)
            out.blocks[std::size_t(t * Lambda.n + lam)] =
                k.blocks[std::size_t(t * Lambda.n + Lambda.inv[std::size_t(lam)])].adjoint();
    return out;
}

Kernel cover_pushforward(const LeafGroupoid& G, const Group& Lambda, const CoverKernel& k) {
    Kernel out = Kernel::zero(G);
    for (int t = 0; t < G.T; ++t) {
        Mat acc = Mat::Zero(G.L * G.fiber, G.L * G.fiber);
        for (int lam = 0; lam < Lambda.n; ++lam) acc += k.blocks[std::size_t(t * Lambda.n + lam)];
        out.blocks[std::size_t(t)] = acc;
    }
    return out;
}

double cover_l1_norm(const LeafGroupoid& G, const Group& Lambda, const CoverKernel& k) {
    double mx = 0.0;
    for (int t = 0; t < G.T; ++t)
        for (int l = 0; l < G.L; ++l) {
            double in = 0.0, out = 0.0;
            for (int l2 = 0; l2 < G.L; ++l2)
                for (int lam = 0; lam < Lambda.n; ++lam) {
                    const Mat& b = k.blocks[std::size_t(t * Lambda.n + lam)];
                    in += b.block(l * G.fiber, l2 * G.fiber, G.fiber, G.fiber).operatorNorm() *
                          G.haar[G.unit_index(l2, t)];
                    out += b.block(l2 * G.fiber, l * G.fiber, G.fiber, G.fiber).operatorNorm() *
                           G.haar[G.unit_index(l2, t)];
                }
            mx = std::max({mx, in, out});
        }
    return mx;
}

}  // namespace bifcalc::groupoid
