#pragma once

#include "bpnmf/types.hpp"

#include <vector>

namespace bpnmf {

/// Zero-delay orthogonal projection decomposition of an estimated signal:
/// estimate = s_target + e_interf + e_artif exactly. This is a documented
/// simplification of the usual filter-allowing bss_eval decomposition, so
/// absolute scores are not comparable with that toolkit; relative
/// orderings are the intended use.
struct Decomposition {
    Vec s_target;
    Vec e_interf;
    Vec e_artif;
};

Decomposition decompose(const Vec& estimate, const std::vector<Vec>& sources,
                        int target_index);

struct Scores {
    double sdr = 0.0;
    double sir = 0.0;
    double sar = 0.0;
};

/// Energy-ratio scores in dB, capped at +/- cap so zero denominators stay
/// finite and serializable.
Scores sdr_sir_sar(const Decomposition& d, double cap = 120.0);

struct EvalSummary {
    std::vector<Scores> per_source;
    Scores mean;
    Scores stderr_; // standard error across sources
};

EvalSummary evaluate(const std::vector<Vec>& estimates,
                     const std::vector<Vec>& references, double cap = 120.0);

} // namespace bpnmf
