#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bpnmf {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CountMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using MaskMat = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using MaskCol = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 1>;

struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

/// Gamma priors on W (a, b) and H (c, d) under the shape-rate convention,
/// beta process mass parameters (a0, b0), truncation level K. The component
/// inclusion prior is Beta(a0/K, b0*(K-1)/K), so K must be at least 2.
struct Hyperparams {
    double a = 0.5, b = 0.5;
    double c = 5.0, d = 5.0;
    double a0 = 1.0, b0 = 1.0;
    int K = 500;

    double beta_alpha() const { return a0 / K; }
    double beta_beta() const { return b0 * (K - 1) / K; }

    /// Throws ModelError on any violated invariant.
    void validate() const;
};

/// One joint sample (W, H, pi) of the global latent variables.
struct GlobalDraw {
    Mat W;  // F x K, strictly positive
    Mat H;  // K x T, strictly positive
    Vec pi; // K, strictly inside (0,1)

    void validate() const;
};

/// The six arrays parameterizing the variational distribution q:
/// Gamma(nuW, rhoW) on W, Gamma(nuH, rhoH) on H, Beta(alphaPi, betaPi) on pi.
struct VariationalParams {
    Mat nuW, rhoW;       // F x K
    Mat nuH, rhoH;       // K x T
    Vec alphaPi, betaPi; // K

    void validate() const;

    Vec pi_mean() const;
    int active_count(double tau) const;
};

/// Expected-contribution statistics accumulated from the multinomial
/// decomposition of the counts; the F x T x K contribution tensor is never
/// materialized.
struct SuffStats {
    Mat expZ_rowsum; // F x K: sum_t X_ft * phi_ftk
    Mat expZ_colsum; // K x T: sum_f X_ft * phi_ftk
    Vec HS_rowsum;   // K: sum_t H_kt * S_kt
    Vec W_colsum;    // K: sum_f W_fk
    Eigen::VectorXi S_count; // K: sum_t S_kt

    /// Cells with a positive count but zero rate under (g, s); these occur
    /// transiently early in sampling and are surfaced, not fatal.
    std::int64_t inconsistent_cells = 0;
};

/// Validates hyperparameters against a count matrix before fitting.
/// Rejects K=1 (degenerate beta prior), all-zero data, negative counts.
void validate_model(const Hyperparams& h, const CountMat& x);

struct LogLik {
    double value = 0.0;
    /// Number of cells with X_ft > 0 but rate exactly 0; value is -inf
    /// whenever this is nonzero.
    std::int64_t zero_rate_positive_count = 0;
};

/// Poisson log-likelihood of X under the rate matrix W (H o S). Used only
/// as a convergence diagnostic; the structured ELBO is not computable.
LogLik surrogate_loglik(const CountMat& x, const GlobalDraw& g,
                        const MaskMat& s);

/// log Poisson(x; rate) with the 0*log(0) := 0 convention.
double poisson_logpmf(std::int64_t x, double rate);

} // namespace bpnmf
