#pragma once

#include "bpnmf/gibbs.hpp"
#include "bpnmf/ssmf.hpp"
#include "bpnmf/synthetic.hpp"
#include "bpnmf/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bpnmf {

inline constexpr const char* kCheckpointVersion = "bpnmf-ckpt-1";

/// Optional STFT provenance carried by checkpoints fitted on audio, so
/// separation can rebuild a consistent spectrogram.
struct StftProvenance {
    int fft_size = 512;
    int hop = 256;
    double sample_rate = 22050.0;
    std::int64_t target_max = 1000;
};

struct Checkpoint {
    std::string kind; // "ssmf" | "gibbs"
    Hyperparams hyper;
    Eigen::Index F = 0, T = 0;
    int iterations = 0;
    std::uint64_t seed = 0;

    // kind == "ssmf"
    std::optional<VariationalParams> q;
    // kind == "gibbs"
    std::optional<GlobalDraw> draw;
    std::optional<MaskMat> mask;

    std::optional<StftProvenance> stft;

    /// Posterior-mean component matrices used for separation/diagnostics:
    /// W and the masked activations H o S.
    Mat component_W() const;
    Mat component_HS(const MaskMat& s) const;
    Vec component_pi_mean() const;
};

void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

void save_count_matrix(const std::string& path, const CountMat& x,
                       std::uint64_t seed);
CountMat load_count_matrix(const std::string& path);

void save_ground_truth(const std::string& path, const GroundTruth& gt,
                       std::uint64_t seed);
GroundTruth load_ground_truth(const std::string& path);

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& trace);

/// Appends one JSON line per run to <dir>/manifests.jsonl.
void append_manifest(const std::string& dir, const std::string& command,
                     const std::vector<std::string>& args,
                     std::uint64_t seed,
                     const std::vector<std::string>& outputs);

} // namespace bpnmf
