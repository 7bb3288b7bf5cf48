#include "bpnmf/gibbs.hpp"

#include <chrono>

namespace bpnmf {

namespace {

std::uint64_t mix_ids(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a * 0x9e3779b97f4a7c15ULL ^ (b + 0x7f4a7c159e3779b9ULL);
    x ^= x >> 29;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 32;
    return x;
}

constexpr std::uint64_t kGibbsInitTag = 0x61bb50aULL;
constexpr std::uint64_t kGibbsGlobalsTag = 0x61bb5b1ULL;

} // namespace

GlobalDraw gibbs_sample_globals(const SuffStats& stats, const MaskMat& s,
                                const GlobalDraw& g_prev,
                                const Hyperparams& h, RngStream& r) {
    const auto F = stats.expZ_rowsum.rows();
    const auto K = stats.expZ_rowsum.cols();
    const auto T = stats.expZ_colsum.cols();
    VariationalParams cond = conditional_params(stats, s, h);

    GlobalDraw g;
    g.W.resize(F, K);
    g.H.resize(K, T);
    g.pi.resize(K);
    for (Eigen::Index f = 0; f < F; ++f)
        for (Eigen::Index k = 0; k < K; ++k)
            g.W(f, k) = r.gamma(cond.nuW(f, k), cond.rhoW(f, k));
    // H conditions on the W just drawn (Algorithm order: S, W, H, pi).
    Vec w_colsum_new = g.W.colwise().sum();
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index t = 0; t < T; ++t) {
            const double rate = h.d + (s(k, t) ? w_colsum_new(k) : 0.0);
            g.H(k, t) = r.gamma(cond.nuH(k, t), rate);
        }
    for (Eigen::Index k = 0; k < K; ++k)
        g.pi(k) = r.beta(cond.alphaPi(k), cond.betaPi(k));
    (void)g_prev;
    return g;
}

GibbsResult run_gibbs(const CountMat& x, const Hyperparams& h,
                      const GibbsConfig& cfg) {
    validate_model(h, x);
    if (cfg.burn_in < 0 || cfg.post_burn_samples < 1)
        throw ModelError("gibbs config: burn_in >= 0, post_burn_samples >= 1");
    const auto F = x.rows();
    const auto T = x.cols();
    const Eigen::Index K = h.K;

    // Random initialization from the prior.
    RngStream init_rng(cfg.seed, kGibbsInitTag);
    GlobalDraw g;
    g.W.resize(F, K);
    g.H.resize(K, T);
    g.pi.resize(K);
    for (Eigen::Index f = 0; f < F; ++f)
        for (Eigen::Index k = 0; k < K; ++k)
            g.W(f, k) = init_rng.gamma(h.a, h.b);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index t = 0; t < T; ++t)
            g.H(k, t) = init_rng.gamma(h.c, h.d);
    for (Eigen::Index k = 0; k < K; ++k)
        g.pi(k) = init_rng.beta(h.beta_alpha(), h.beta_beta());
    MaskMat s(K, T);
    for (Eigen::Index t = 0; t < T; ++t)
        for (Eigen::Index k = 0; k < K; ++k)
            s(k, t) = static_cast<std::uint8_t>(init_rng.bernoulli(g.pi(k)));

    GibbsResult out;
    const int total = cfg.burn_in + cfg.post_burn_samples;
    const auto t_start = std::chrono::steady_clock::now();
    for (int i = 1; i <= total; ++i) {
        sample_mask(x, g, s, cfg.seed, static_cast<std::uint64_t>(i),
                    cfg.inner_sweeps, cfg.randomized_order, cfg.threads);
        SuffStats stats = accumulate_phi_stats(x, g, s);
        RngStream grng(cfg.seed, mix_ids(kGibbsGlobalsTag,
                                         static_cast<std::uint64_t>(i)));
        g = gibbs_sample_globals(stats, s, g, h, grng);

        TraceRow row;
        row.iteration = i;
        row.step = 1.0;
        row.loglik = surrogate_loglik(x, g, s).value;
        row.active = static_cast<int>((g.pi.array() > cfg.pi_threshold).count());
        row.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
        out.report.trace.push_back(row);
        out.report.inconsistent_cells += stats.inconsistent_cells;
        if (i > cfg.burn_in)
            out.samples.push_back(PosteriorSample{g, s});
    }
    out.report.last_mask = s;
    out.report.last_draw = g;
    out.report.active_components =
        static_cast<int>((g.pi.array() > cfg.pi_threshold).count());
    return out;
}

} // namespace bpnmf
