#include "bpnmf/types.hpp"

#include <cmath>
#include <limits>

namespace bpnmf {

void Hyperparams::validate() const {
    if (!(a > 0) || !(b > 0) || !(c > 0) || !(d > 0) || !(a0 > 0) || !(b0 > 0))
        throw ModelError("nonpositive-hyperparameter");
    if (K < 1)
        throw ModelError("nonpositive-hyperparameter: K");
    if (K == 1)
        throw ModelError("truncation-too-small");
    // With K >= 2 both derived beta parameters are positive.
}

void GlobalDraw::validate() const {
    if (W.cols() != H.rows() || pi.size() != W.cols())
        throw ModelError("dimension-mismatch");
    if (!(W.array() > 0).all() || !(H.array() > 0).all())
        throw ModelError("nonpositive entry in W or H");
    if (!(pi.array() > 0).all() || !(pi.array() < 1).all())
        throw ModelError("pi entry outside (0,1)");
}

void VariationalParams::validate() const {
    auto positive = [](const Mat& m) { return (m.array() > 0).all(); };
    if (!positive(nuW) || !positive(rhoW) || !positive(nuH) || !positive(rhoH))
        throw ModelError("nonpositive variational parameter");
    if (!(alphaPi.array() > 0).all() || !(betaPi.array() > 0).all())
        throw ModelError("nonpositive variational parameter");
    if (nuW.rows() != rhoW.rows() || nuW.cols() != rhoW.cols() ||
        nuH.rows() != rhoH.rows() || nuH.cols() != rhoH.cols() ||
        alphaPi.size() != betaPi.size() || nuW.cols() != alphaPi.size() ||
        nuH.rows() != alphaPi.size())
        throw ModelError("dimension-mismatch");
}

Vec VariationalParams::pi_mean() const {
    return alphaPi.array() / (alphaPi.array() + betaPi.array());
}

int VariationalParams::active_count(double tau) const {
    return static_cast<int>((pi_mean().array() > tau).count());
}

void validate_model(const Hyperparams& h, const CountMat& x) {
    h.validate();
    if (x.rows() < 1 || x.cols() < 1)
        throw ModelError("dimension-mismatch: empty data");
    if ((x.array() < 0).any())
        throw ModelError("negative count entry");
    if ((x.array() == 0).all())
        throw ModelError("all-zero-data");
}

double poisson_logpmf(std::int64_t x, double rate) {
    if (rate == 0.0)
        return x == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return static_cast<double>(x) * std::log(rate) - rate -
           std::lgamma(static_cast<double>(x) + 1.0);
}

LogLik surrogate_loglik(const CountMat& x, const GlobalDraw& g,
                        const MaskMat& s) {
    const auto F = x.rows();
    const auto T = x.cols();
    const auto K = g.W.cols();
    if (g.W.rows() != F || g.H.cols() != T || s.rows() != K || s.cols() != T)
        throw ModelError("dimension-mismatch");

    LogLik out;
    for (Eigen::Index t = 0; t < T; ++t) {
        Vec rate = Vec::Zero(F);
        for (Eigen::Index k = 0; k < K; ++k)
            if (s(k, t))
                rate += g.W.col(k) * g.H(k, t);
        for (Eigen::Index f = 0; f < F; ++f) {
            if (x(f, t) > 0 && rate(f) == 0.0)
                ++out.zero_rate_positive_count;
            out.value += poisson_logpmf(x(f, t), rate(f));
        }
    }
    return out;
}

} // namespace bpnmf
