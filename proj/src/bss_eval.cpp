#include "bpnmf/bss_eval.hpp"

#include <cmath>

namespace bpnmf {

Decomposition decompose(const Vec& estimate, const std::vector<Vec>& sources,
                        int target_index) {
    if (sources.empty() || target_index < 0 ||
        target_index >= static_cast<int>(sources.size()))
        throw ModelError("decompose: bad target index");
    const auto n = estimate.size();
    const auto m = static_cast<Eigen::Index>(sources.size());
    Mat A(n, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        if (sources[j].size() != n)
            throw ModelError("dimension-mismatch: signal lengths");
        A.col(j) = sources[j];
    }

    Mat gram = A.transpose() * A;
    Eigen::FullPivLU<Mat> lu(gram);
    if (lu.rank() < m)
        throw ModelError("degenerate-sources");

    const Vec& tgt = sources[target_index];
    const double tgt2 = tgt.squaredNorm();
    Decomposition d;
    d.s_target = (estimate.dot(tgt) / tgt2) * tgt;
    Vec coeffs = lu.solve(A.transpose() * estimate);
    Vec proj_all = A * coeffs;
    d.e_interf = proj_all - d.s_target;
    d.e_artif = estimate - proj_all;
    return d;
}

namespace {

double db_ratio(double num, double den, double cap) {
    if (num <= 0.0)
        return -cap;
    if (den <= 0.0)
        return cap;
    double db = 10.0 * std::log10(num / den);
    return std::clamp(db, -cap, cap);
}

} // namespace

Scores sdr_sir_sar(const Decomposition& d, double cap) {
    const double st = d.s_target.squaredNorm();
    const double ei = d.e_interf.squaredNorm();
    const double ea = d.e_artif.squaredNorm();
    Scores s;
    s.sdr = db_ratio(st, (d.e_interf + d.e_artif).squaredNorm(), cap);
    s.sir = db_ratio(st, ei, cap);
    s.sar = db_ratio((d.s_target + d.e_interf).squaredNorm(), ea, cap);
    return s;
}

EvalSummary evaluate(const std::vector<Vec>& estimates,
                     const std::vector<Vec>& references, double cap) {
    if (estimates.size() != references.size() || estimates.empty())
        throw ModelError("evaluate: estimate/reference count mismatch");
    EvalSummary out;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        Decomposition d =
            decompose(estimates[i], references, static_cast<int>(i));
        out.per_source.push_back(sdr_sir_sar(d, cap));
    }
    const auto n = static_cast<double>(out.per_source.size());
    for (const auto& s : out.per_source) {
        out.mean.sdr += s.sdr / n;
        out.mean.sir += s.sir / n;
        out.mean.sar += s.sar / n;
    }
    if (out.per_source.size() > 1) {
        double v_sdr = 0, v_sir = 0, v_sar = 0;
        for (const auto& s : out.per_source) {
            v_sdr += (s.sdr - out.mean.sdr) * (s.sdr - out.mean.sdr);
            v_sir += (s.sir - out.mean.sir) * (s.sir - out.mean.sir);
            v_sar += (s.sar - out.mean.sar) * (s.sar - out.mean.sar);
        }
        const double denom = n * (n - 1.0);
        out.stderr_.sdr = std::sqrt(v_sdr / denom);
        out.stderr_.sir = std::sqrt(v_sir / denom);
        out.stderr_.sar = std::sqrt(v_sar / denom);
    }
    return out;
}

} // namespace bpnmf
