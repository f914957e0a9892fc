#include "bifcalc/linop.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <Eigen/SVD>

#include <nlohmann/json.hpp>

namespace bifcalc::torus {

namespace {

void full_dft(const TorusGrid& g, Vec& u, bool inverse) {
    dft_multi(u, g.axis_points, g.fiber, inverse);
}

void transverse_dft(const TorusGrid& g, Vec& u, bool inverse) {
    // leaf axes ride along in the "before" stride: transform transverse axes only
    std::vector<int> sizes = g.axis_points;
    long leaf = 1;
    for (int i = 0; i < g.space.p; ++i) leaf *= g.axis_points[std::size_t(i)];
    std::vector<int> tsizes(g.axis_points.begin() + g.space.p, g.axis_points.end());
    // view u as (leaf, transverse..., fiber): apply per leaf slice
    const long tlen = g.transverse_points() * g.fiber;
    for (long l = 0; l < leaf; ++l) {
        Vec slice = u.segment(l * tlen, tlen);
        dft_multi(slice, tsizes, g.fiber, inverse);
        u.segment(l * tlen, tlen) = slice;
    }
}

Eigen::VectorXd sector_singvals(const Mat& block) {
    Eigen::BDCSVD<Mat> svd(block);
    return svd.singularValues();
}

}  // namespace

void parallel_for(long n, const std::function<void(long)>& body) {
    unsigned workers = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("BIFCALC_WORKERS")) {
        const long w = std::strtol(env, nullptr, 10);
        if (w >= 1) workers = unsigned(w);
    }
    workers = std::min<unsigned>(std::max<unsigned>(workers, 1), 8);
    if (n < 4 || workers == 1) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (long i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

LinOp LinOp::multiplier(const TorusGrid& g, Eigen::VectorXcd values, bool transverse_only,
                        aniso::BiOrder order) {
    const long expect = transverse_only ? g.transverse_points() : g.points();
    if (values.size() != expect) throw std::invalid_argument("multiplier: value count mismatch");
    LinOp op;
    op.rep_ = Rep::Multiplier;
    op.grid_ = g;
    op.order_ = order;
    op.scalar_ = true;
    op.transverse_only_ = transverse_only;
    op.values_ = std::move(values);
    return op;
}

LinOp LinOp::block_multiplier(const TorusGrid& g, std::vector<Mat> blocks, bool transverse_only,
                              aniso::BiOrder order) {
    const long expect = transverse_only ? g.transverse_points() : g.points();
    if (long(blocks.size()) != expect) throw std::invalid_argument("block_multiplier: block count mismatch");
    LinOp op;
    op.rep_ = Rep::Multiplier;
    op.grid_ = g;
    op.order_ = order;
    op.scalar_ = false;
    op.transverse_only_ = transverse_only;
    op.blocks_ = std::make_shared<std::vector<Mat>>(std::move(blocks));
    return op;
}

LinOp LinOp::identity(const TorusGrid& g) {
    return multiplier(g, Eigen::VectorXcd::Ones(g.transverse_points()), true, {0.0, 0.0});
}

LinOp LinOp::leaf_blocked(const TorusGrid& g, std::function<Mat(long)> block, bool t_independent,
                          aniso::BiOrder order) {
    LinOp op;
    op.rep_ = Rep::LeafBlocked;
    op.grid_ = g;
    op.order_ = order;
    op.block_fn_ = std::move(block);
    op.t_independent_ = t_independent;
    return op;
}

LinOp LinOp::dense(const TorusGrid& g, Mat matrix, aniso::BiOrder order) {
    if (matrix.rows() != g.section_dim() || matrix.cols() != g.section_dim())
        throw std::invalid_argument("dense: matrix size mismatch");
    if (g.section_dim() > kDenseCap) throw std::runtime_error("dense: section dimension exceeds cap");
    LinOp op;
    op.rep_ = Rep::Dense;
    op.grid_ = g;
    op.order_ = order;
    op.dense_ = std::make_shared<Mat>(std::move(matrix));
    return op;
}

Mat LinOp::block_at(long zindex, long tindex) const {
    if (rep_ != Rep::Multiplier) throw std::logic_error("block_at: not a multiplier");
    const long idx = transverse_only_ ? tindex : zindex * grid_.transverse_points() + tindex;
    if (scalar_) return values_[idx] * Mat::Identity(grid_.fiber, grid_.fiber);
    return (*blocks_)[std::size_t(idx)];
}

Complex LinOp::scalar_at(long zindex, long tindex) const {
    if (rep_ != Rep::Multiplier || !scalar_) throw std::logic_error("scalar_at: not a scalar multiplier");
    const long idx = transverse_only_ ? tindex : zindex * grid_.transverse_points() + tindex;
    return values_[idx];
}

Mat LinOp::multiplier_sector(long tindex) const {
    const long L = grid_.leaf_points();
    const int a = grid_.fiber;
    const Mat& F = grid_.leaf_dft();
    const Mat& Fi = grid_.leaf_idft();
    Mat bd = Mat::Zero(L * a, L * a);
    for (long z = 0; z < L; ++z) {
        if (scalar_)
            bd.block(z * a, z * a, a, a) = scalar_at(z, tindex) * Mat::Identity(a, a);
        else
            bd.block(z * a, z * a, a, a) = block_at(z, tindex);
    }
    if (L == 1) return bd;
    // (Fi (x) I_a) bd (F (x) I_a)
    Mat lift_F(L * a, L * a), lift_Fi(L * a, L * a);
    lift_F.setZero();
    lift_Fi.setZero();
    for (long r = 0; r < L; ++r)
        for (long c = 0; c < L; ++c) {
            lift_F.block(r * a, c * a, a, a) = F(r, c) * Mat::Identity(a, a);
            lift_Fi.block(r * a, c * a, a, a) = Fi(r, c) * Mat::Identity(a, a);
        }
    return lift_Fi * bd * lift_F;
}

Mat LinOp::sector(long tindex) const {
    switch (rep_) {
        case Rep::Multiplier: return multiplier_sector(tindex);
        case Rep::LeafBlocked: return block_fn_(t_independent_ ? 0 : tindex);
        default: throw std::logic_error("sector: dense operator has no sector form");
    }
}

const Mat& LinOp::dense_matrix() const {
    if (rep_ != Rep::Dense) throw std::logic_error("dense_matrix: not dense");
    return *dense_;
}

LinOp LinOp::compose(const LinOp& rhs) const {
    const aniso::BiOrder ord = order_ + rhs.order_;
    if (rep_ == Rep::Multiplier && rhs.rep_ == Rep::Multiplier) {
        if (scalar_ && rhs.scalar_) {
            if (transverse_only_ == rhs.transverse_only_)
                return multiplier(grid_, values_.cwiseProduct(rhs.values_), transverse_only_, ord);
            // expand the transverse-only one over leaf frequencies
            const LinOp& full = transverse_only_ ? rhs : *this;
            const LinOp& tonly = transverse_only_ ? *this : rhs;
            Eigen::VectorXcd out(grid_.points());
            const long T = grid_.transverse_points();
            for (long z = 0; z < grid_.leaf_points(); ++z)
                for (long t = 0; t < T; ++t) out[z * T + t] = full.values_[z * T + t] * tonly.values_[t];
            return multiplier(grid_, out, false, ord);
        }
        const bool tonly = transverse_only_ && rhs.transverse_only_;
        const long count = tonly ? grid_.transverse_points() : grid_.points();
        const long T = grid_.transverse_points();
        std::vector<Mat> out((std::size_t)count);
        for (long i = 0; i < count; ++i) {
            const long z = tonly ? 0 : i / T;
            const long t = tonly ? i : i % T;
            out[std::size_t(i)] = block_at(z, t) * rhs.block_at(z, t);
        }
        return block_multiplier(grid_, std::move(out), tonly, ord);
    }
    if (rep_ != Rep::Dense && rhs.rep_ != Rep::Dense) {
        LinOp lhs_copy = *this, rhs_copy = rhs;
        const bool tind = (rep_ == Rep::Multiplier ? transverse_only_ : t_independent_) &&
                          (rhs.rep_ == Rep::Multiplier ? rhs.transverse_only_ : rhs.t_independent_) &&
                          rep_ == Rep::LeafBlocked && rhs.rep_ == Rep::LeafBlocked;
        auto fn = [lhs_copy, rhs_copy](long t) { return Mat(lhs_copy.sector(t) * rhs_copy.sector(t)); };
        return leaf_blocked(grid_, fn, tind, ord);
    }
    return dense(grid_, to_dense() * rhs.to_dense(), ord);
}

LinOp LinOp::adjoint() const {
    switch (rep_) {
        case Rep::Multiplier: {
            if (scalar_) return multiplier(grid_, values_.conjugate(), transverse_only_, {order_.m, order_.l});
            std::vector<Mat> out;
            out.reserve(blocks_->size());
            for (const auto& b : *blocks_) out.push_back(b.adjoint());
            return block_multiplier(grid_, std::move(out), transverse_only_, order_);
        }
        case Rep::LeafBlocked: {
            auto fn = block_fn_;
            return leaf_blocked(
                grid_, [fn](long t) { return Mat(fn(t).adjoint()); }, t_independent_, order_);
        }
        default: return dense(grid_, dense_->adjoint(), order_);
    }
}

LinOp LinOp::add(const LinOp& rhs, Complex alpha) const {
    const aniso::BiOrder ord{std::max(order_.m, rhs.order_.m), std::max(order_.l, rhs.order_.l)};
    if (rep_ == Rep::Multiplier && rhs.rep_ == Rep::Multiplier) {
        // promote to a common layout: full lattice if either is, blocks if either is
        const bool tonly = transverse_only_ && rhs.transverse_only_;
        const bool as_scalar = scalar_ && rhs.scalar_;
        const long T = grid_.transverse_points();
        const long Z = tonly ? 1 : grid_.leaf_points();
        if (as_scalar) {
            Eigen::VectorXcd out(Z * T);
            for (long z = 0; z < Z; ++z)
                for (long t = 0; t < T; ++t)
                    out[z * T + t] = scalar_at(z, t) + alpha * rhs.scalar_at(z, t);
            return multiplier(grid_, out, tonly, ord);
        }
        std::vector<Mat> out;
        out.reserve(std::size_t(Z * T));
        for (long z = 0; z < Z; ++z)
            for (long t = 0; t < T; ++t) out.push_back(block_at(z, t) + alpha * rhs.block_at(z, t));
        return block_multiplier(grid_, std::move(out), tonly, ord);
    }
    if (rep_ != Rep::Dense && rhs.rep_ != Rep::Dense) {
        LinOp a = *this, b = rhs;
        return leaf_blocked(
            grid_, [a, b, alpha](long t) { return Mat(a.sector(t) + alpha * b.sector(t)); },
            false, ord);
    }
    return dense(grid_, to_dense() + alpha * rhs.to_dense(), ord);
}

LinOp LinOp::scale(Complex alpha) const {
    switch (rep_) {
        case Rep::Multiplier: {
            if (scalar_) return multiplier(grid_, alpha * values_, transverse_only_, order_);
            std::vector<Mat> out;
            for (const auto& b : *blocks_) out.push_back(alpha * b);
            return block_multiplier(grid_, std::move(out), transverse_only_, order_);
        }
        case Rep::LeafBlocked: {
            auto fn = block_fn_;
            return leaf_blocked(
                grid_, [fn, alpha](long t) { return Mat(alpha * fn(t)); }, t_independent_, order_);
        }
        default: return dense(grid_, alpha * (*dense_), order_);
    }
}

LinOp LinOp::inverse() const {
    if (rep_ != Rep::Multiplier) throw std::logic_error("inverse: multiplier only");
    if (scalar_) {
        Eigen::VectorXcd out = values_.cwiseInverse();
        return multiplier(grid_, out, transverse_only_, -order_);
    }
    std::vector<Mat> out;
    for (const auto& b : *blocks_) out.push_back(b.inverse());
    return block_multiplier(grid_, std::move(out), transverse_only_, -order_);
}

Vec LinOp::apply(const Vec& u) const {
    if (u.size() != grid_.section_dim()) throw std::invalid_argument("apply: vector size mismatch");
    switch (rep_) {
        case Rep::Multiplier: {
            Vec w = u;
            full_dft(grid_, w, false);
            const long T = grid_.transverse_points();
            const int a = grid_.fiber;
            for (long z = 0; z < grid_.leaf_points(); ++z)
                for (long t = 0; t < T; ++t) {
                    const long base = (z * T + t) * a;
                    if (scalar_)
                        w.segment(base, a) *= scalar_at(z, t);
                    else
                        w.segment(base, a) = (block_at(z, t) * w.segment(base, a)).eval();
                }
            full_dft(grid_, w, true);
            return w;
        }
        case Rep::LeafBlocked: {
            Vec w = u;
            transverse_dft(grid_, w, false);
            const long T = grid_.transverse_points();
            const long L = grid_.leaf_points();
            const int a = grid_.fiber;
            Vec out = Vec::Zero(w.size());
            Vec sec(L * a);
            for (long t = 0; t < T; ++t) {
                for (long x = 0; x < L; ++x) sec.segment(x * a, a) = w.segment((x * T + t) * a, a);
                Vec res = sector(t) * sec;
                for (long x = 0; x < L; ++x) out.segment((x * T + t) * a, a) = res.segment(x * a, a);
            }
            transverse_dft(grid_, out, true);
            return out;
        }
        default: return (*dense_) * u;
    }
}

Mat LinOp::to_dense() const {
    if (rep_ == Rep::Dense) return *dense_;
    const long dim = grid_.section_dim();
    if (dim > kDenseCap) throw std::runtime_error("to_dense: section dimension exceeds cap");
    Mat out(dim, dim);
    Vec e = Vec::Zero(dim);
    for (long c = 0; c < dim; ++c) {
        e[c] = 1.0;
        out.col(c) = apply(e);
        e[c] = 0.0;
    }
    return out;
}

Eigen::VectorXd LinOp::singular_values() const {
    std::vector<double> vals;
    switch (rep_) {
        case Rep::Multiplier: {
            const long T = grid_.transverse_points();
            const long Z = transverse_only_ ? 1 : grid_.leaf_points();
            const long mult = transverse_only_ ? grid_.leaf_points() : 1;
            for (long z = 0; z < Z; ++z)
                for (long t = 0; t < T; ++t) {
                    if (scalar_) {
                        const double s = std::abs(scalar_at(z, t));
                        for (long m = 0; m < mult * grid_.fiber; ++m) vals.push_back(s);
                    } else {
                        Eigen::VectorXd sv = sector_singvals(block_at(z, t));
                        for (long i = 0; i < sv.size(); ++i)
                            for (long m = 0; m < mult; ++m) vals.push_back(sv[i]);
                    }
                }
            break;
        }
        case Rep::LeafBlocked: {
            const long T = grid_.transverse_points();
            std::vector<Eigen::VectorXd> per_t((std::size_t)T);
            if (t_independent_) {
                Eigen::VectorXd sv = sector_singvals(sector(0));
                for (long t = 0; t < T; ++t) per_t[std::size_t(t)] = sv;
            } else {
                const LinOp* self = this;
                parallel_for(T, [&per_t, self](long t) { per_t[std::size_t(t)] = sector_singvals(self->sector(t)); });
            }
            for (const auto& sv : per_t)
                for (long i = 0; i < sv.size(); ++i) vals.push_back(sv[i]);
            break;
        }
        default: {
            Eigen::VectorXd sv = sector_singvals(*dense_);
            for (long i = 0; i < sv.size(); ++i) vals.push_back(sv[i]);
        }
    }
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    return Eigen::Map<Eigen::VectorXd>(vals.data(), long(vals.size()));
}

double LinOp::operator_norm() const {
    switch (rep_) {
        case Rep::Multiplier: {
            double mx = 0.0;
            const long T = grid_.transverse_points();
            const long Z = transverse_only_ ? 1 : grid_.leaf_points();
            for (long z = 0; z < Z; ++z)
                for (long t = 0; t < T; ++t)
                    mx = std::max(mx, scalar_ ? std::abs(scalar_at(z, t))
                                              : block_at(z, t).operatorNorm());
            return mx;
        }
        case Rep::LeafBlocked: {
            const long T = grid_.transverse_points();
            if (t_independent_) return sector_singvals(sector(0)).maxCoeff();
            std::vector<double> per_t(std::size_t(T), 0.0);
            const LinOp* self = this;
            parallel_for(T, [&per_t, self](long t) {
                per_t[std::size_t(t)] = sector_singvals(self->sector(t)).maxCoeff();
            });
            return *std::max_element(per_t.begin(), per_t.end());
        }
        default: return sector_singvals(*dense_).maxCoeff();
    }
}

LinOp LinOp::conjugate_by_weights(const std::function<double(const aniso::Covector&)>& wleft,
                                  const std::function<double(const aniso::Covector&)>& wright) const {
    const long T = grid_.transverse_points();
    const long L = grid_.leaf_points();
    Eigen::VectorXcd lw(grid_.points()), rw(grid_.points());
    for (long z = 0; z < L; ++z)
        for (long t = 0; t < T; ++t) {
            const auto xi = grid_.covector(z, t);
            lw[z * T + t] = wleft(xi);
            rw[z * T + t] = wright(xi);
        }
    const LinOp WL = multiplier(grid_, lw, false, {0, 0});
    const LinOp WR = multiplier(grid_, rw, false, {0, 0});
    return WL.compose(*this).compose(WR);
}

void LinOp::save(const std::string& path_base) const {
    nlohmann::json meta;
    meta["schema"] = "bifcalc-linop-v1";
    meta["rep"] = rep_ == Rep::Multiplier ? "multiplier" : (rep_ == Rep::LeafBlocked ? "leaf_blocked" : "dense");
    meta["order"] = {{"m", order_.m}, {"l", order_.leaf_smoothing() ? "-inf" : std::to_string(order_.l)}};
    meta["grid"] = {{"p", grid_.space.p}, {"v", grid_.space.v}, {"n", grid_.space.n},
                    {"N", grid_.base_n},  {"fiber", grid_.fiber}};
    if (support_radius_) meta["support_radius"] = *support_radius_;
    else meta["support_radius"] = "global";

    std::ofstream bin(path_base + ".bin", std::ios::binary);
    auto dump_mat = [&bin](const Mat& m) {
        bin.write(reinterpret_cast<const char*>(m.data()), std::streamsize(sizeof(Complex) * std::size_t(m.size())));
    };
    if (rep_ == Rep::Multiplier) {
        meta["scalar"] = scalar_;
        meta["transverse_only"] = transverse_only_;
        if (scalar_)
            bin.write(reinterpret_cast<const char*>(values_.data()),
                      std::streamsize(sizeof(Complex) * std::size_t(values_.size())));
        else
            for (const auto& b : *blocks_) dump_mat(b);
    } else if (rep_ == Rep::LeafBlocked) {
        for (long t = 0; t < grid_.transverse_points(); ++t) dump_mat(sector(t));
    } else {
        dump_mat(*dense_);
    }
    std::ofstream(path_base + ".json") << meta.dump(2) << "\n";
}

LinOp LinOp::load(const std::string& path_base) {
    std::ifstream mf(path_base + ".json");
    if (!mf) throw std::runtime_error("LinOp::load: missing metadata " + path_base + ".json");
    nlohmann::json meta = nlohmann::json::parse(mf);
    const auto& gj = meta.at("grid");
    TorusGrid g(aniso::AnisoSpace(gj.at("p"), gj.at("v"), gj.at("n")), gj.at("N"), gj.at("fiber"));
    aniso::BiOrder ord;
    ord.m = meta.at("order").at("m");
    const std::string ls = meta.at("order").at("l");
    ord.l = ls == "-inf" ? aniso::BiOrder::minus_inf() : std::stod(ls);

    std::ifstream bin(path_base + ".bin", std::ios::binary);
    auto read_mat = [&bin](long r, long c) {
        Mat m(r, c);
        bin.read(reinterpret_cast<char*>(m.data()), std::streamsize(sizeof(Complex) * std::size_t(m.size())));
        return m;
    };
    const std::string rep = meta.at("rep");
    if (rep == "multiplier") {
        const bool tonly = meta.at("transverse_only");
        const long count = tonly ? g.transverse_points() : g.points();
        if (meta.at("scalar").get<bool>()) {
            Eigen::VectorXcd v(count);
            bin.read(reinterpret_cast<char*>(v.data()), std::streamsize(sizeof(Complex) * std::size_t(count)));
            return multiplier(g, v, tonly, ord);
        }
        std::vector<Mat> blocks;
        for (long i = 0; i < count; ++i) blocks.push_back(read_mat(g.fiber, g.fiber));
        return block_multiplier(g, std::move(blocks), tonly, ord);
    }
    if (rep == "leaf_blocked") {
        const long L = g.leaf_points() * g.fiber;
        auto blocks = std::make_shared<std::vector<Mat>>();
        for (long t = 0; t < g.transverse_points(); ++t) blocks->push_back(read_mat(L, L));
        return leaf_blocked(
            g, [blocks](long t) { return (*blocks)[std::size_t(t)]; }, false, ord);
    }
    return dense(g, read_mat(g.section_dim(), g.section_dim()), ord);
}

}  // namespace bifcalc::torus
