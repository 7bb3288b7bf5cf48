#pragma once

#include "bpnmf/mask_sampler.hpp"
#include "bpnmf/rng.hpp"
#include "bpnmf/types.hpp"

#include <functional>
#include <vector>

namespace bpnmf {

struct SsmfConfig {
    int max_iters = 300;
    double step_exponent = 0.5; // eta_i = i^-step_exponent
    int inner_sweeps = 2;
    bool randomized_order = false;
    std::uint64_t seed = 0;
    double pi_threshold = 0.05;
    int threads = 0; // 0 = hardware concurrency
};

struct TraceRow {
    int iteration = 0;
    double step = 0.0;
    double loglik = 0.0;
    int active = 0;
    double seconds = 0.0;
};

struct FitReport {
    std::vector<TraceRow> trace;
    int active_components = 0;
    MaskMat last_mask;
    GlobalDraw last_draw;
    std::int64_t inconsistent_cells = 0;
};

double step_size(int iteration, double exponent);

/// Independent draws from the variational marginals of every global.
GlobalDraw draw_globals(const VariationalParams& q, RngStream& r);

/// The conjugate conditional parameterization of (W, H, pi) given the
/// accumulated statistics and the mask. This is both the eta=1 SSMF
/// target and the Gibbs complete-conditional parameterization.
VariationalParams conditional_params(const SuffStats& stats, const MaskMat& s,
                                     const Hyperparams& h);

/// Convex-combination step: q <- (1-eta) q + eta * conditional target.
void ssmf_update(VariationalParams& q, const SuffStats& stats,
                 const MaskMat& s, const Hyperparams& h, double eta);

/// Near-prior random initialization of the variational parameters.
VariationalParams init_variational(const Hyperparams& h, Eigen::Index F,
                                   Eigen::Index T, RngStream& r);

/// Resamples every mask column with per-column RNG streams; deterministic
/// for any thread count. iter feeds the per-iteration stream derivation.
void sample_mask(const CountMat& x, const GlobalDraw& g, MaskMat& s,
                 std::uint64_t seed, std::uint64_t iter, int inner_sweeps,
                 bool randomized, int threads);

using IterCallback = std::function<void(int iter, const VariationalParams&,
                                        const TraceRow&)>;

std::pair<VariationalParams, FitReport>
run_ssmf(const CountMat& x, const Hyperparams& h, const SsmfConfig& cfg,
         const IterCallback& on_iter = nullptr);

} // namespace bpnmf
