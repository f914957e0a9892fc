#include "bifcalc/grid.hpp"

namespace bifcalc::torus {

namespace {
bool power_of_two(long x) { return x > 0 && (x & (x - 1)) == 0; }
}

TorusGrid::TorusGrid(aniso::AnisoSpace sp, int N, int fiber_dim) : space(sp), base_n(N), fiber(fiber_dim) {
    if (!power_of_two(N) || N < 4) throw std::invalid_argument("TorusGrid: N must be a power of two >= 4");
    if (fiber < 1) throw std::invalid_argument("TorusGrid: fiber >= 1");
    for (int i = 0; i < space.p + space.v; ++i) axis_points.push_back(N);
    for (int i = 0; i < space.n; ++i) axis_points.push_back(N * N / 2);

    const long L = leaf_points();
    auto F = std::make_shared<Mat>(L, L);
    auto Fi = std::make_shared<Mat>(L, L);
    // leaf axes all have N points; build the p-fold tensor DFT directly
    std::vector<int> leaf_sizes(std::size_t(space.p), N);
    for (long r = 0; r < L; ++r) {
        const auto zi = unflatten(r, leaf_sizes);
        for (long c = 0; c < L; ++c) {
            const auto xi = unflatten(c, leaf_sizes);
            double phase = 0.0;
            for (int a = 0; a < space.p; ++a)
                phase -= 2.0 * M_PI * double(freq_of_index(zi[std::size_t(a)], N)) * double(xi[std::size_t(a)]) /
                         double(N);
            (*F)(r, c) = std::polar(1.0, phase);
        }
    }
    *Fi = F->adjoint() / double(L);
    leaf_dft_ = F;
    leaf_idft_ = Fi;
}

long TorusGrid::leaf_points() const {
    long m = 1;
    for (int i = 0; i < space.p; ++i) m *= axis_points[std::size_t(i)];
    return m;
}

long TorusGrid::transverse_points() const {
    long m = 1;
    for (int i = space.p; i < space.total(); ++i) m *= axis_points[std::size_t(i)];
    return m;
}

aniso::Covector TorusGrid::transverse_covector(long tindex) const {
    std::vector<int> sizes(axis_points.begin() + space.p, axis_points.end());
    const auto idx = unflatten(tindex, sizes);
    aniso::Covector xi;
    xi.zeta = Eigen::VectorXd::Zero(space.p);
    xi.eta_v.resize(space.v);
    xi.eta_n.resize(space.n);
    for (int i = 0; i < space.v; ++i)
        xi.eta_v[i] = double(freq_of_index(idx[std::size_t(i)], sizes[std::size_t(i)]));
    for (int i = 0; i < space.n; ++i)
        xi.eta_n[i] =
            double(freq_of_index(idx[std::size_t(space.v + i)], sizes[std::size_t(space.v + i)]));
    return xi;
}

aniso::Covector TorusGrid::covector(long zindex, long tindex) const {
    aniso::Covector xi = transverse_covector(tindex);
    std::vector<int> sizes(std::size_t(space.p), base_n);
    const auto idx = unflatten(zindex, sizes);
    for (int i = 0; i < space.p; ++i) xi.zeta[i] = double(freq_of_index(idx[std::size_t(i)], base_n));
    return xi;
}

double TorusGrid::hnorm_at(long tindex) const {
    const auto xi = transverse_covector(tindex);
    return aniso::hnorm(xi);
}

const Mat& TorusGrid::leaf_dft() const { return *leaf_dft_; }
const Mat& TorusGrid::leaf_idft() const { return *leaf_idft_; }

namespace {

void axis_apply(Vec& u, const Mat& M, const std::vector<int>& sizes, std::size_t axis, int fiber) {
    long before = 1, after = fiber;
    for (std::size_t i = 0; i < axis; ++i) before *= sizes[i];
    for (std::size_t i = axis + 1; i < sizes.size(); ++i) after *= sizes[i];
    const long s = sizes[axis];
    Vec tmp(s), res(s);
    for (long b = 0; b < before; ++b)
        for (long a = 0; a < after; ++a) {
            const long base = b * s * after + a;
            for (long i = 0; i < s; ++i) tmp[i] = u[base + i * after];
            res.noalias() = M * tmp;
            for (long i = 0; i < s; ++i) u[base + i * after] = res[i];
        }
}

Mat dft_axis_matrix(int npts, bool inverse) {
    Mat F(npts, npts);
    for (long r = 0; r < npts; ++r)
        for (long c = 0; c < npts; ++c) {
            const long k = TorusGrid::freq_of_index(inverse ? c : r, npts);
            const long x = inverse ? r : c;
            const double phase = 2.0 * M_PI * double(k) * double(x) / double(npts);
            F(r, c) = std::polar(inverse ? 1.0 / double(npts) : 1.0, inverse ? phase : -phase);
        }
    return F;
}

struct AxisDftCache {
    std::vector<std::pair<int, std::pair<Mat, Mat>>> entries;
    const std::pair<Mat, Mat>& get(int npts) {
        for (auto& e : entries)
            if (e.first == npts) return e.second;
        entries.push_back({npts, {dft_axis_matrix(npts, false), dft_axis_matrix(npts, true)}});
        return entries.back().second;
    }
};

}  // namespace

void dft_multi(Vec& u, const std::vector<int>& sizes, int fiber, bool inverse) {
    thread_local AxisDftCache cache;
    for (std::size_t a = 0; a < sizes.size(); ++a) {
        const auto& pair = cache.get(sizes[a]);
        axis_apply(u, inverse ? pair.second : pair.first, sizes, a, fiber);
    }
}

long flat_index(const std::vector<long>& idx, const std::vector<int>& sizes) {
    long f = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) f = f * sizes[i] + idx[i];
    return f;
}

std::vector<long> unflatten(long flat, const std::vector<int>& sizes) {
    std::vector<long> idx(sizes.size());
    for (std::size_t i = sizes.size(); i-- > 0;) {
        idx[i] = flat % sizes[i];
        flat /= sizes[i];
    }
    return idx;
}

}  // namespace bifcalc::torus
