#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "bifcalc/aniso.hpp"

namespace bifcalc::torus {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Discretized T^p x T^v x T^n, all circumferences 2*pi, integer frequencies.
// Leaf and v axes carry N points; n axes carry N^2/2 so the box resolves the
// full anisotropic ball {|eta|' <= N/2} (the (1,1,2)-dilation surrogate).
// DFT convention: forward e^{-i x.xi}, inverse normalized by 1/prod(points).
struct TorusGrid {
    aniso::AnisoSpace space;
    int base_n = 0;  // N, power of two >= 4
    int fiber = 1;

    std::vector<int> axis_points;  // per axis, order (p..., v..., n...)

    TorusGrid() = default;
    TorusGrid(aniso::AnisoSpace sp, int N, int fiber_dim = 1);

    long leaf_points() const;        // prod over p axes
    long transverse_points() const;  // prod over v,n axes
    long points() const { return leaf_points() * transverse_points(); }
    long section_dim() const { return points() * fiber; }

    // FFT-order frequency of index i on an axis with npts points: 0,1,..,npts/2-1,-npts/2,..,-1
    static long freq_of_index(long i, long npts) { return i < npts / 2 ? i : i - npts; }

    // transverse frequency (eta_v, eta_n) of a flat transverse index (row-major over v then n axes)
    aniso::Covector transverse_covector(long tindex) const;
    // full covector of (leaf flat index zeta_index, transverse flat index)
    aniso::Covector covector(long zindex, long tindex) const;

    double hnorm_at(long tindex) const;
    double leaf_spacing() const { return base_n > 0 ? 2.0 * M_PI / double(base_n) : 0.0; }

    // dense leaf DFT matrix F[zeta_row, x_col] = e^{-i zeta x}, and its inverse (1/L) F^H
    const Mat& leaf_dft() const;
    const Mat& leaf_idft() const;

  private:
    std::shared_ptr<Mat> leaf_dft_, leaf_idft_;
};

// flatten/unflatten helpers for row-major multi-index over given axis sizes
long flat_index(const std::vector<long>& idx, const std::vector<int>& sizes);
std::vector<long> unflatten(long flat, const std::vector<int>& sizes);

// in-place multi-axis DFT over row-major data with trailing fiber channels;
// forward e^{-i x.xi}, inverse carries 1/prod(sizes)
void dft_multi(Vec& u, const std::vector<int>& sizes, int fiber, bool inverse);

}  // namespace bifcalc::torus
