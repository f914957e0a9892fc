#pragma once

#include <functional>
#include <optional>
#include <string>

#include "bifcalc/grid.hpp"

namespace bifcalc::torus {

// A linear operator on the section space of a TorusGrid, in one of three forms:
//  - Multiplier: diagonal in the full frequency lattice, with a fiber block per
//    frequency (optionally constant in the leaf frequency zeta);
//  - LeafBlocked: block-diagonal over transverse frequencies, each block dense
//    on (leaf position x fiber) -- the natural form of pi(k) and compositions
//    of multipliers with leafwise kernels;
//  - Dense: a full matrix on the section space, capped at dimension 8192.
// Compositions stay in the smallest closed form; singular-value sweeps stream
// per-frequency blocks so large grids never materialize a dense matrix.
class LinOp {
  public:
    enum class Rep { Multiplier, LeafBlocked, Dense };

    static constexpr long kDenseCap = 8192;

    LinOp() = default;

    // --- constructors -------------------------------------------------------
    // scalar multiplier: value per full frequency (zindex-major over tindex),
    // or per transverse frequency when transverse_only
    static LinOp multiplier(const TorusGrid& g, Eigen::VectorXcd values, bool transverse_only,
                            aniso::BiOrder order);
    // matrix multiplier: fiber block per (full or transverse) frequency
    static LinOp block_multiplier(const TorusGrid& g, std::vector<Mat> blocks, bool transverse_only,
                                  aniso::BiOrder order);
    static LinOp identity(const TorusGrid& g);
    // leaf-blocked: generator of the (leaf*fiber) block at transverse index t
    static LinOp leaf_blocked(const TorusGrid& g, std::function<Mat(long)> block, bool t_independent,
                              aniso::BiOrder order);
    static LinOp dense(const TorusGrid& g, Mat matrix, aniso::BiOrder order);

    // --- structure ----------------------------------------------------------
    Rep rep() const { return rep_; }
    const TorusGrid& grid() const { return grid_; }
    aniso::BiOrder order() const { return order_; }
    void set_order(aniso::BiOrder o) { order_ = o; }
    std::optional<double> support_radius() const { return support_radius_; }
    void set_support_radius(double r) { support_radius_ = r; }

    bool transverse_only() const { return transverse_only_; }
    bool scalar() const { return scalar_; }
    bool t_independent() const { return t_independent_; }

    // fiber block at (zindex, tindex); Multiplier only
    Mat block_at(long zindex, long tindex) const;
    Complex scalar_at(long zindex, long tindex) const;
    // sector matrix on (leaf position x fiber) at transverse index t (any rep except Dense)
    Mat sector(long tindex) const;
    const Mat& dense_matrix() const;

    // --- algebra ------------------------------------------------------------
    LinOp compose(const LinOp& rhs) const;  // (*this) o rhs
    LinOp adjoint() const;
    LinOp add(const LinOp& rhs, Complex alpha = 1.0) const;  // this + alpha*rhs
    LinOp scale(Complex alpha) const;
    LinOp inverse() const;  // Multiplier only (exact blockwise)
    Vec apply(const Vec& u) const;
    Mat to_dense() const;  // respects kDenseCap

    // sorted (descending) singular values of the whole operator
    Eigen::VectorXd singular_values() const;
    double operator_norm() const;

    // weighted-frequency transforms used by the Sobolev machinery:
    // returns W_left o this o W_right with W_* scalar multipliers given per
    // full frequency by the supplied evaluators
    LinOp conjugate_by_weights(const std::function<double(const aniso::Covector&)>& wleft,
                               const std::function<double(const aniso::Covector&)>& wright) const;

    // binary dump + JSON metadata (LeafBlocked is materialized per sector)
    void save(const std::string& path_base) const;
    static LinOp load(const std::string& path_base);

  private:
    Rep rep_ = Rep::Dense;
    TorusGrid grid_;
    aniso::BiOrder order_{};
    std::optional<double> support_radius_;

    // Multiplier storage
    bool scalar_ = false;
    bool transverse_only_ = false;
    Eigen::VectorXcd values_;
    std::shared_ptr<std::vector<Mat>> blocks_;

    // LeafBlocked storage
    std::function<Mat(long)> block_fn_;
    bool t_independent_ = false;

    // Dense storage
    std::shared_ptr<Mat> dense_;

    Mat multiplier_sector(long tindex) const;
};

// parallel-for over [0, n), worker count from BIFCALC_WORKERS (default: hw, capped 8)
void parallel_for(long n, const std::function<void(long)>& body);

}  // namespace bifcalc::torus
