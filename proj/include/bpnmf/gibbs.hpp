#pragma once

#include "bpnmf/ssmf.hpp"

namespace bpnmf {

struct GibbsConfig {
    int burn_in = 200;
    int post_burn_samples = 1;
    int inner_sweeps = 2;
    bool randomized_order = false;
    std::uint64_t seed = 0;
    double pi_threshold = 0.05;
    int threads = 0;
};

struct PosteriorSample {
    GlobalDraw draw;
    MaskMat mask;
};

struct GibbsResult {
    std::vector<PosteriorSample> samples; // post-burn-in states, in order
    FitReport report;
};

/// One systematic scan over the globals: W from its complete conditional
/// (using the previous H via stats), then H using the freshly drawn W,
/// then pi from the mask counts.
GlobalDraw gibbs_sample_globals(const SuffStats& stats, const MaskMat& s,
                                const GlobalDraw& g_prev,
                                const Hyperparams& h, RngStream& r);

GibbsResult run_gibbs(const CountMat& x, const Hyperparams& h,
                      const GibbsConfig& cfg);

} // namespace bpnmf
