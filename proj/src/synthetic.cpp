#include "bpnmf/synthetic.hpp"

#include <cmath>
#include <limits>

namespace bpnmf {

void SyntheticConfig::validate() const {
    if (F < 1 || T < 1 || L < 1)
        throw ModelError("synthetic config: dimensions must be positive");
    if (!(gammaW_shape > 0) || !(gammaW_rate > 0) || !(gammaH_shape > 0) ||
        !(gammaH_rate > 0) || !(beta_pi_alpha > 0) || !(beta_pi_beta > 0))
        throw ModelError("synthetic config: nonpositive parameter");
}

SyntheticConfig SyntheticConfig::paper_scale(std::uint64_t seed) {
    SyntheticConfig cfg;
    cfg.F = 75;
    cfg.T = 1000;
    cfg.L = 100;
    cfg.seed = seed;
    return cfg;
}

Mat GroundTruth::rate() const {
    Mat hs = H;
    for (Eigen::Index l = 0; l < S.rows(); ++l)
        for (Eigen::Index t = 0; t < S.cols(); ++t)
            if (!S(l, t))
                hs(l, t) = 0.0;
    return W * hs;
}

int GroundTruth::active_count(double tau) const {
    return static_cast<int>((pi.array() > tau).count());
}

std::pair<CountMat, GroundTruth> generate(const SyntheticConfig& cfg) {
    cfg.validate();
    const Eigen::Index F = cfg.F, T = cfg.T, L = cfg.L;

    GroundTruth gt;
    gt.W.resize(F, L);
    gt.H.resize(L, T);
    gt.S.resize(L, T);
    gt.pi.resize(L);

    // Per-row streams keep generation deterministic and parallelizable.
    RngStream pi_rng(cfg.seed, 0);
    for (Eigen::Index l = 0; l < L; ++l)
        gt.pi(l) = pi_rng.beta(cfg.beta_pi_alpha, cfg.beta_pi_beta);

    for (Eigen::Index f = 0; f < F; ++f) {
        RngStream r(cfg.seed, 1 + static_cast<std::uint64_t>(f));
        for (Eigen::Index l = 0; l < L; ++l) {
            double A = r.gamma(cfg.gammaW_shape, cfg.gammaW_rate);
            double B = r.gamma(cfg.gammaW_shape, cfg.gammaW_rate);
            gt.W(f, l) = r.gamma(A, B);
        }
    }
    for (Eigen::Index l = 0; l < L; ++l) {
        RngStream r(cfg.seed, 1 + F + static_cast<std::uint64_t>(l));
        for (Eigen::Index t = 0; t < T; ++t) {
            double C = r.gamma(cfg.gammaH_shape, cfg.gammaH_rate);
            double D = r.gamma(cfg.gammaH_shape, cfg.gammaH_rate);
            gt.H(l, t) = r.gamma(C, D);
            gt.S(l, t) = static_cast<std::uint8_t>(r.bernoulli(gt.pi(l)));
        }
    }

    Mat rate = gt.rate();
    CountMat x(F, T);
    for (Eigen::Index f = 0; f < F; ++f) {
        RngStream r(cfg.seed, 1 + F + L + static_cast<std::uint64_t>(f));
        for (Eigen::Index t = 0; t < T; ++t)
            x(f, t) = r.poisson(rate(f, t));
    }
    return {std::move(x), std::move(gt)};
}

double mean_poisson_deviance(const CountMat& x, const Mat& rate) {
    double dev = 0.0;
    const auto n = x.rows() * x.cols();
    for (Eigen::Index t = 0; t < x.cols(); ++t)
        for (Eigen::Index f = 0; f < x.rows(); ++f) {
            const double xv = static_cast<double>(x(f, t));
            const double mu = rate(f, t);
            if (xv == 0.0) {
                dev += 2.0 * mu;
            } else if (mu <= 0.0) {
                dev = std::numeric_limits<double>::infinity();
                return dev;
            } else {
                dev += 2.0 * (xv * std::log(xv / mu) - (xv - mu));
            }
        }
    return dev / static_cast<double>(n);
}

RecoveryReport recovery_score(const GroundTruth& truth, const CountMat& x,
                              const Mat& lambda_fit, int fitted_active,
                              double tau) {
    Mat lambda_true = truth.rate();
    if (lambda_fit.rows() != lambda_true.rows() ||
        lambda_fit.cols() != lambda_true.cols())
        throw ModelError("dimension-mismatch: rate matrices");
    RecoveryReport rep;
    rep.true_active = truth.active_count(tau);
    rep.fitted_active = fitted_active;
    const double true_norm = lambda_true.norm();
    const double diff_norm = (lambda_fit - lambda_true).norm();
    if (true_norm == 0.0)
        rep.rel_frobenius =
            diff_norm == 0.0 ? 0.0
                             : std::numeric_limits<double>::infinity();
    else
        rep.rel_frobenius = diff_norm / true_norm;
    rep.mean_deviance = mean_poisson_deviance(x, lambda_fit);
    return rep;
}

} // namespace bpnmf
