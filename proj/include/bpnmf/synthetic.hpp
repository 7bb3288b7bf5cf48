#pragma once

#include "bpnmf/rng.hpp"
#include "bpnmf/types.hpp"

namespace bpnmf {

/// Generator configuration. Defaults are the desk-scale protocol; the
/// paper-scale variant is (F=75, T=1000, L=100).
struct SyntheticConfig {
    int F = 30, T = 300, L = 50;
    double gammaW_shape = 1.0, gammaW_rate = 1.0; // hyperpriors on A, B
    double gammaH_shape = 5.0, gammaH_rate = 5.0; // hyperpriors on C, D
    double beta_pi_alpha = 0.05, beta_pi_beta = 0.95;
    std::uint64_t seed = 0;

    void validate() const;
    static SyntheticConfig paper_scale(std::uint64_t seed);
};

struct GroundTruth {
    Mat W;  // F x L
    Mat H;  // L x T
    MaskMat S;
    Vec pi;

    Mat rate() const; // W * (H o S)
    int active_count(double tau) const;
};

/// Samples per-entry hyperparameters, then (W, H, S) and finally the
/// Poisson counts.
std::pair<CountMat, GroundTruth> generate(const SyntheticConfig& cfg);

struct RecoveryReport {
    int true_active = 0;
    int fitted_active = 0;
    double rel_frobenius = 0.0; // ||L_fit - L_true||_F / ||L_true||_F
    double mean_deviance = 0.0; // mean Poisson deviance of X under L_fit
};

RecoveryReport recovery_score(const GroundTruth& truth, const CountMat& x,
                              const Mat& lambda_fit, int fitted_active,
                              double tau);

/// Mean Poisson deviance of X under the rate matrix (saturated-model
/// reference, 0*log(0) := 0 convention).
double mean_poisson_deviance(const CountMat& x, const Mat& rate);

} // namespace bpnmf
