#include "bifcalc/aniso.hpp"

namespace bifcalc::aniso {

namespace {

// Odometer over the box [-b_i, b_i]^d, lexicographic. Returns false when exhausted.
bool advance(std::vector<long>& idx, const std::vector<long>& bound) {
    for (std::size_t i = idx.size(); i-- > 0;) {
        if (idx[i] < bound[i]) {
            ++idx[i];
            for (std::size_t j = i + 1; j < idx.size(); ++j) idx[j] = -bound[j];
            return true;
        }
    }
    return false;
}

}  // namespace

void for_each_lattice_point(const AnisoSpace& space, double R,
                            const std::function<void(const Covector&)>& fn) {
    if (!(R > 0.0)) throw std::invalid_argument("aniso ball: R must be positive");
    const int d = space.total();
    const long bz = long(std::floor(R));
    const long bn = long(std::floor(R * R));
    std::vector<long> bound;
    bound.reserve(std::size_t(d));
    for (int i = 0; i < space.p + space.v; ++i) bound.push_back(bz);
    for (int i = 0; i < space.n; ++i) bound.push_back(bn);

    if (d == 0) return;
    std::vector<long> idx((std::size_t)d);
    for (int i = 0; i < d; ++i) idx[std::size_t(i)] = -bound[std::size_t(i)];

    Covector xi;
    xi.zeta.resize(space.p);
    xi.eta_v.resize(space.v);
    xi.eta_n.resize(space.n);
    const double R2 = R * R;
    do {
        double z2 = 0.0, v2 = 0.0, n2 = 0.0;
        for (int i = 0; i < space.p; ++i) {
            const double c = double(idx[std::size_t(i)]);
            xi.zeta[i] = c;
            z2 += c * c;
        }
        for (int i = 0; i < space.v; ++i) {
            const double c = double(idx[std::size_t(space.p + i)]);
            xi.eta_v[i] = c;
            v2 += c * c;
        }
        for (int i = 0; i < space.n; ++i) {
            const double c = double(idx[std::size_t(space.p + space.v + i)]);
            xi.eta_n[i] = c;
            n2 += c * c;
        }
        // |xi|'^2 = z2 + sqrt(v2^2 + n2) <= R^2
        if (z2 <= R2 && std::sqrt(v2 * v2 + n2) <= R2 - z2) fn(xi);
    } while (advance(idx, bound));
}

std::vector<Covector> aniso_ball(const AnisoSpace& space, double R, std::size_t cap) {
    // box-volume guard before enumerating
    long double box = 1.0L;
    for (int i = 0; i < space.p + space.v; ++i) box *= 2.0L * std::floor(R) + 1.0L;
    for (int i = 0; i < space.n; ++i) box *= 2.0L * std::floor(R * R) + 1.0L;
    if (box > (long double)cap)
        throw std::runtime_error("aniso_ball: enumeration box exceeds cardinality cap");
    std::vector<Covector> out;
    for_each_lattice_point(space, R, [&](const Covector& xi) { out.push_back(xi); });
    return out;
}

std::size_t aniso_ball_count(const AnisoSpace& space, double R) {
    std::size_t c = 0;
    for_each_lattice_point(space, R, [&](const Covector&) { ++c; });
    return c;
}

}  // namespace bifcalc::aniso
