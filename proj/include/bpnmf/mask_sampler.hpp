#pragma once

#include "bpnmf/rng.hpp"
#include "bpnmf/types.hpp"

namespace bpnmf {

/// Per-column state for the collapsed Gibbs sweep over one mask column s_t.
/// residual[f] holds the rate contributed by every component other than the
/// one currently being resampled, maintained incrementally.
struct ColumnContext {
    ColumnContext(const CountMat& x, const GlobalDraw& g, Eigen::Index t,
                  MaskCol s_init);

    Eigen::Index t;
    const CountMat& x;
    const Mat& W;
    const Mat& H;
    const Vec& pi;
    MaskCol s;    // K
    Vec residual; // F: sum over active components of W_fk * H_kt

    /// From-scratch recomputation, used to verify incremental integrity.
    Vec recompute_residual() const;
};

/// log P1 - log P2 for S_kt, computed in the log domain. residual must
/// already exclude component k's contribution. Returns +inf when some
/// positive count has zero rate without k (S forced on), -inf when the
/// prior term vanishes.
double log_odds_active(const ColumnContext& ctx, Eigen::Index k);

/// n_sweeps full passes over k, resampling each S_kt from its conditional.
/// Sweep order is ascending unless randomized is set.
void sweep_column(ColumnContext& ctx, RngStream& r, int n_sweeps,
                  bool randomized = false);

/// Deterministic MAP-style mask: thresholds each conditional at even odds
/// instead of sampling. Used when reconstructing from posterior means.
MaskMat map_mask(const CountMat& x, const GlobalDraw& g, int n_sweeps = 2);

/// Distributes each count X_ft across active components proportionally to
/// W_fk H_kt S_kt and accumulates the sums consumed by the parameter
/// updates. Cells with positive count but zero rate are counted in
/// inconsistent_cells.
SuffStats accumulate_phi_stats(const CountMat& x, const GlobalDraw& g,
                               const MaskMat& s);

} // namespace bpnmf
