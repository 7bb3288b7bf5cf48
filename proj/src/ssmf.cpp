#include "bpnmf/ssmf.hpp"

#include <chrono>
#include <cmath>
#include <thread>

namespace bpnmf {

namespace {

// Stream-id derivation: globals and each mask column get their own stream
// per outer iteration, so results do not depend on thread count.
std::uint64_t mix_ids(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a * 0x9e3779b97f4a7c15ULL ^ (b + 0x7f4a7c159e3779b9ULL);
    x ^= x >> 29;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 32;
    return x;
}

constexpr std::uint64_t kInitTag = 0xb01dfaceULL;
constexpr std::uint64_t kGlobalsTag = 0x5eedba11ULL;
constexpr std::uint64_t kMaskTag = 0x3a5cc01dULL;

int resolve_threads(int threads) {
    if (threads > 0)
        return threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

} // namespace

double step_size(int iteration, double exponent) {
    if (iteration < 1)
        throw ModelError("step_size: iteration must be >= 1");
    return std::pow(static_cast<double>(iteration), -exponent);
}

GlobalDraw draw_globals(const VariationalParams& q, RngStream& r) {
    GlobalDraw g;
    const auto F = q.nuW.rows();
    const auto K = q.nuW.cols();
    const auto T = q.nuH.cols();
    g.W.resize(F, K);
    g.H.resize(K, T);
    g.pi.resize(K);
    for (Eigen::Index f = 0; f < F; ++f)
        for (Eigen::Index k = 0; k < K; ++k)
            g.W(f, k) = r.gamma(q.nuW(f, k), q.rhoW(f, k));
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index t = 0; t < T; ++t)
            g.H(k, t) = r.gamma(q.nuH(k, t), q.rhoH(k, t));
    for (Eigen::Index k = 0; k < K; ++k)
        g.pi(k) = r.beta(q.alphaPi(k), q.betaPi(k));
    return g;
}

VariationalParams conditional_params(const SuffStats& stats, const MaskMat& s,
                                     const Hyperparams& h) {
    const auto F = stats.expZ_rowsum.rows();
    const auto K = stats.expZ_rowsum.cols();
    const auto T = stats.expZ_colsum.cols();
    VariationalParams p;
    p.nuW = stats.expZ_rowsum.array() + h.a;
    p.rhoW.resize(F, K);
    for (Eigen::Index k = 0; k < K; ++k)
        p.rhoW.col(k).setConstant(h.b + stats.HS_rowsum(k));
    p.nuH = stats.expZ_colsum.array() + h.c;
    p.rhoH.resize(K, T);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index t = 0; t < T; ++t)
            p.rhoH(k, t) = h.d + (s(k, t) ? stats.W_colsum(k) : 0.0);
    p.alphaPi =
        Vec::Constant(K, h.beta_alpha()) + stats.S_count.cast<double>();
    p.betaPi = Vec::Constant(K, h.beta_beta() + static_cast<double>(T)) -
               stats.S_count.cast<double>();
    return p;
}

void ssmf_update(VariationalParams& q, const SuffStats& stats,
                 const MaskMat& s, const Hyperparams& h, double eta) {
    if (!(eta > 0.0) || eta > 1.0)
        throw ModelError("ssmf_update: eta outside (0,1]");
    VariationalParams target = conditional_params(stats, s, h);
    const double keep = 1.0 - eta;
    q.nuW = keep * q.nuW + eta * target.nuW;
    q.rhoW = keep * q.rhoW + eta * target.rhoW;
    q.nuH = keep * q.nuH + eta * target.nuH;
    q.rhoH = keep * q.rhoH + eta * target.rhoH;
    q.alphaPi = keep * q.alphaPi + eta * target.alphaPi;
    q.betaPi = keep * q.betaPi + eta * target.betaPi;
}

VariationalParams init_variational(const Hyperparams& h, Eigen::Index F,
                                   Eigen::Index T, RngStream& r) {
    const Eigen::Index K = h.K;
    auto perturbed = [&](Eigen::Index rows, Eigen::Index cols, double base) {
        Mat m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                m(i, j) = base * (0.9 + 0.2 * r.uniform());
        return m;
    };
    VariationalParams q;
    q.nuW = perturbed(F, K, h.a);
    q.rhoW = perturbed(F, K, h.b);
    q.nuH = perturbed(K, T, h.c);
    q.rhoH = perturbed(K, T, h.d);
    q.alphaPi = Vec::Constant(K, h.beta_alpha());
    q.betaPi = Vec::Constant(K, h.beta_beta());
    return q;
}

void sample_mask(const CountMat& x, const GlobalDraw& g, MaskMat& s,
                 std::uint64_t seed, std::uint64_t iter, int inner_sweeps,
                 bool randomized, int threads) {
    const auto T = x.cols();
    const int nthreads =
        std::min<int>(resolve_threads(threads), static_cast<int>(T));
    auto work = [&](Eigen::Index t0, Eigen::Index t1) {
        for (Eigen::Index t = t0; t < t1; ++t) {
            ColumnContext ctx(x, g, t, s.col(t));
            RngStream r(seed, mix_ids(kMaskTag + iter,
                                      static_cast<std::uint64_t>(t)));
            sweep_column(ctx, r, inner_sweeps, randomized);
            s.col(t) = ctx.s;
        }
    };
    if (nthreads <= 1) {
        work(0, T);
        return;
    }
    std::vector<std::thread> pool;
    const Eigen::Index chunk = (T + nthreads - 1) / nthreads;
    for (int i = 0; i < nthreads; ++i) {
        Eigen::Index t0 = i * chunk;
        Eigen::Index t1 = std::min<Eigen::Index>(t0 + chunk, T);
        if (t0 >= t1)
            break;
        pool.emplace_back(work, t0, t1);
    }
    for (auto& th : pool)
        th.join();
}

std::pair<VariationalParams, FitReport>
run_ssmf(const CountMat& x, const Hyperparams& h, const SsmfConfig& cfg,
         const IterCallback& on_iter) {
    validate_model(h, x);
    const auto F = x.rows();
    const auto T = x.cols();

    RngStream init_rng(cfg.seed, kInitTag);
    VariationalParams q = init_variational(h, F, T, init_rng);
    // Random mask start: Bernoulli draws at the initial inclusion means.
    MaskMat s(h.K, T);
    const Vec pi0 = q.pi_mean();
    for (Eigen::Index t = 0; t < T; ++t)
        for (Eigen::Index k = 0; k < h.K; ++k)
            s(k, t) = static_cast<std::uint8_t>(init_rng.bernoulli(pi0(k)));

    FitReport report;
    report.last_mask = s;
    const auto t_start = std::chrono::steady_clock::now();
    for (int i = 1; i <= cfg.max_iters; ++i) {
        RngStream grng(cfg.seed,
                       mix_ids(kGlobalsTag, static_cast<std::uint64_t>(i)));
        GlobalDraw g = draw_globals(q, grng);
        sample_mask(x, g, s, cfg.seed, static_cast<std::uint64_t>(i),
                    cfg.inner_sweeps, cfg.randomized_order, cfg.threads);
        SuffStats stats = accumulate_phi_stats(x, g, s);

        const double eta = step_size(i, cfg.step_exponent);
        ssmf_update(q, stats, s, h, eta);
        q.validate();

        TraceRow row;
        row.iteration = i;
        row.step = eta;
        row.loglik = surrogate_loglik(x, g, s).value;
        row.active = q.active_count(cfg.pi_threshold);
        row.seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_start)
                          .count();
        report.trace.push_back(row);
        report.inconsistent_cells += stats.inconsistent_cells;
        if (i == cfg.max_iters) {
            report.last_mask = s;
            report.last_draw = g;
        }
        if (on_iter)
            on_iter(i, q, row);
    }
    report.active_components = q.active_count(cfg.pi_threshold);
    return {std::move(q), std::move(report)};
}

} // namespace bpnmf
