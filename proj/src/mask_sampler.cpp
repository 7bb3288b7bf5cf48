#include "bpnmf/mask_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace bpnmf {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ColumnContext::ColumnContext(const CountMat& x_, const GlobalDraw& g,
                             Eigen::Index t_, MaskCol s_init)
    : t(t_), x(x_), W(g.W), H(g.H), pi(g.pi), s(std::move(s_init)) {
    if (s.size() != W.cols())
        throw ModelError("dimension-mismatch: mask column");
    residual = recompute_residual();
}

Vec ColumnContext::recompute_residual() const {
    Vec r = Vec::Zero(W.rows());
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k))
            r += W.col(k) * H(k, t);
    return r;
}

double log_odds_active(const ColumnContext& ctx, Eigen::Index k) {
    const double pi_k = ctx.pi(k);
    const double h_kt = ctx.H(k, ctx.t);
    double lo = std::log(pi_k) - std::log1p(-pi_k);

    for (Eigen::Index f = 0; f < ctx.x.rows(); ++f) {
        const double wh = ctx.W(f, k) * h_kt;
        const std::int64_t xv = ctx.x(f, ctx.t);
        if (xv > 0) {
            const double res = ctx.residual(f);
            if (res <= 0.0)
                return kInf; // zero rate cannot emit a positive count
            lo += static_cast<double>(xv) *
                  (std::log(res + wh) - std::log(res));
        }
        lo -= wh;
    }
    return lo;
}

void sweep_column(ColumnContext& ctx, RngStream& r, int n_sweeps,
                  bool randomized) {
    if (n_sweeps < 1)
        throw ModelError("n_sweeps must be >= 1");
    const Eigen::Index K = ctx.s.size();
    std::vector<Eigen::Index> order(K);
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    for (int sweep = 0; sweep < n_sweeps; ++sweep) {
        if (randomized) {
            for (Eigen::Index i = K - 1; i > 0; --i) {
                auto j = static_cast<Eigen::Index>(
                    r.next_u64() % static_cast<std::uint64_t>(i + 1));
                std::swap(order[i], order[j]);
            }
        }
        for (Eigen::Index k : order) {
            if (ctx.s(k)) {
                ctx.residual -= ctx.W.col(k) * ctx.H(k, ctx.t);
                ctx.residual = ctx.residual.cwiseMax(0.0);
            }
            const double lo = log_odds_active(ctx, k);
            std::uint8_t bit;
            if (lo == kInf)
                bit = 1;
            else if (lo == -kInf)
                bit = 0;
            else
                bit = static_cast<std::uint8_t>(
                    r.bernoulli(1.0 / (1.0 + std::exp(-lo))));
            ctx.s(k) = bit;
            if (bit)
                ctx.residual += ctx.W.col(k) * ctx.H(k, ctx.t);
        }
    }
}

MaskMat map_mask(const CountMat& x, const GlobalDraw& g, int n_sweeps) {
    const auto K = g.W.cols();
    const auto T = x.cols();
    MaskMat s = MaskMat::Ones(K, T);
    for (Eigen::Index t = 0; t < T; ++t) {
        ColumnContext ctx(x, g, t, s.col(t));
        for (int sweep = 0; sweep < n_sweeps; ++sweep) {
            for (Eigen::Index k = 0; k < K; ++k) {
                if (ctx.s(k)) {
                    ctx.residual -= ctx.W.col(k) * ctx.H(k, ctx.t);
                    ctx.residual = ctx.residual.cwiseMax(0.0);
                }
                const std::uint8_t bit = log_odds_active(ctx, k) > 0.0;
                ctx.s(k) = bit;
                if (bit)
                    ctx.residual += ctx.W.col(k) * ctx.H(k, ctx.t);
            }
        }
        s.col(t) = ctx.s;
    }
    return s;
}

SuffStats accumulate_phi_stats(const CountMat& x, const GlobalDraw& g,
                               const MaskMat& s) {
    const auto F = x.rows();
    const auto T = x.cols();
    const auto K = g.W.cols();
    if (g.W.rows() != F || g.H.cols() != T || s.rows() != K || s.cols() != T)
        throw ModelError("dimension-mismatch");

    SuffStats st;
    st.expZ_rowsum = Mat::Zero(F, K);
    st.expZ_colsum = Mat::Zero(K, T);
    st.HS_rowsum = Vec::Zero(K);
    st.W_colsum = g.W.colwise().sum();
    st.S_count = Eigen::VectorXi::Zero(K);

    std::vector<Eigen::Index> active;
    active.reserve(K);
    for (Eigen::Index t = 0; t < T; ++t) {
        active.clear();
        for (Eigen::Index k = 0; k < K; ++k) {
            if (s(k, t)) {
                active.push_back(k);
                st.HS_rowsum(k) += g.H(k, t);
                st.S_count(k) += 1;
            }
        }
        for (Eigen::Index f = 0; f < F; ++f) {
            const std::int64_t xv = x(f, t);
            if (xv == 0)
                continue;
            double denom = 0.0;
            for (Eigen::Index k : active)
                denom += g.W(f, k) * g.H(k, t);
            if (denom <= 0.0) {
                ++st.inconsistent_cells;
                continue;
            }
            const double xd = static_cast<double>(xv) / denom;
            for (Eigen::Index k : active) {
                const double contrib = xd * g.W(f, k) * g.H(k, t);
                st.expZ_rowsum(f, k) += contrib;
                st.expZ_colsum(k, t) += contrib;
            }
        }
    }
    return st;
}

} // namespace bpnmf
