#include "bpnmf/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>

namespace bpnmf {

using nlohmann::json;

namespace {

json mat_to_json(const Mat& m) {
    // Flat row-major list; dimensions live alongside in the document.
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            flat.push_back(m(i, j));
    return json(flat);
}

Mat mat_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
    auto flat = j.get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
        throw ModelError("checkpoint: array size mismatch");
    Mat m(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2)
            m(i, j2) = flat[idx++];
    return m;
}

json mask_to_json(const MaskMat& m) {
    std::vector<int> flat;
    flat.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            flat.push_back(m(i, j));
    return json(flat);
}

MaskMat mask_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
    auto flat = j.get<std::vector<int>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
        throw ModelError("checkpoint: mask size mismatch");
    MaskMat m(rows, cols);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2)
            m(i, j2) = static_cast<std::uint8_t>(flat[idx++] != 0);
    return m;
}

json vec_to_json(const Vec& v) {
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Vec vec_from_json(const json& j, Eigen::Index n) {
    auto flat = j.get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != n)
        throw ModelError("checkpoint: vector size mismatch");
    return Eigen::Map<const Vec>(flat.data(), n);
}

json hyper_to_json(const Hyperparams& h) {
    return json{{"a", h.a},   {"b", h.b},   {"c", h.c}, {"d", h.d},
                {"a0", h.a0}, {"b0", h.b0}, {"K", h.K}};
}

Hyperparams hyper_from_json(const json& j) {
    Hyperparams h;
    h.a = j.at("a");
    h.b = j.at("b");
    h.c = j.at("c");
    h.d = j.at("d");
    h.a0 = j.at("a0");
    h.b0 = j.at("b0");
    h.K = j.at("K");
    return h;
}

json load_doc(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ModelError("file-not-found: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw ModelError("format-mismatch: " + path + ": " + e.what());
    }
    if (j.value("version", "") != kCheckpointVersion)
        throw ModelError("format-mismatch: bad checkpoint version in " + path);
    return j;
}

void dump_doc(const std::string& path, const json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ModelError("cannot open for writing: " + path);
    f << j.dump();
    f << '\n';
}

} // namespace

Mat Checkpoint::component_W() const {
    if (kind == "ssmf")
        return q->nuW.array() / q->rhoW.array();
    return draw->W;
}

Mat Checkpoint::component_HS(const MaskMat& s) const {
    Mat h = kind == "ssmf" ? Mat(q->nuH.array() / q->rhoH.array()) : draw->H;
    for (Eigen::Index k = 0; k < h.rows(); ++k)
        for (Eigen::Index t = 0; t < h.cols(); ++t)
            if (!s(k, t))
                h(k, t) = 0.0;
    return h;
}

Vec Checkpoint::component_pi_mean() const {
    if (kind == "ssmf")
        return q->pi_mean();
    return draw->pi;
}

void save_checkpoint(const std::string& path, const Checkpoint& c) {
    json j{{"version", kCheckpointVersion},
           {"kind", c.kind},
           {"hyperparams", hyper_to_json(c.hyper)},
           {"F", c.F},
           {"T", c.T},
           {"iterations", c.iterations},
           {"seed", c.seed}};
    if (c.kind == "ssmf") {
        const auto& q = *c.q;
        j["nuW"] = mat_to_json(q.nuW);
        j["rhoW"] = mat_to_json(q.rhoW);
        j["nuH"] = mat_to_json(q.nuH);
        j["rhoH"] = mat_to_json(q.rhoH);
        j["alphaPi"] = vec_to_json(q.alphaPi);
        j["betaPi"] = vec_to_json(q.betaPi);
    } else if (c.kind == "gibbs") {
        j["W"] = mat_to_json(c.draw->W);
        j["H"] = mat_to_json(c.draw->H);
        j["S"] = mask_to_json(*c.mask);
        j["pi"] = vec_to_json(c.draw->pi);
    } else {
        throw ModelError("checkpoint: unknown kind " + c.kind);
    }
    if (c.stft) {
        j["stft"] = json{{"fft_size", c.stft->fft_size},
                         {"hop", c.stft->hop},
                         {"sample_rate", c.stft->sample_rate},
                         {"target_max", c.stft->target_max}};
    }
    dump_doc(path, j);
}

Checkpoint load_checkpoint(const std::string& path) {
    json j = load_doc(path);
    Checkpoint c;
    c.kind = j.at("kind");
    c.hyper = hyper_from_json(j.at("hyperparams"));
    c.F = j.at("F").get<Eigen::Index>();
    c.T = j.at("T").get<Eigen::Index>();
    c.iterations = j.at("iterations");
    c.seed = j.at("seed");
    const Eigen::Index K = c.hyper.K;
    if (c.kind == "ssmf") {
        VariationalParams q;
        q.nuW = mat_from_json(j.at("nuW"), c.F, K);
        q.rhoW = mat_from_json(j.at("rhoW"), c.F, K);
        q.nuH = mat_from_json(j.at("nuH"), K, c.T);
        q.rhoH = mat_from_json(j.at("rhoH"), K, c.T);
        q.alphaPi = vec_from_json(j.at("alphaPi"), K);
        q.betaPi = vec_from_json(j.at("betaPi"), K);
        q.validate();
        c.q = std::move(q);
    } else if (c.kind == "gibbs") {
        GlobalDraw g;
        g.W = mat_from_json(j.at("W"), c.F, K);
        g.H = mat_from_json(j.at("H"), K, c.T);
        g.pi = vec_from_json(j.at("pi"), K);
        g.validate();
        c.draw = std::move(g);
        c.mask = mask_from_json(j.at("S"), K, c.T);
    } else {
        throw ModelError("checkpoint: unknown kind " + c.kind);
    }
    if (j.contains("stft")) {
        StftProvenance sp;
        sp.fft_size = j["stft"].at("fft_size");
        sp.hop = j["stft"].at("hop");
        sp.sample_rate = j["stft"].at("sample_rate");
        sp.target_max = j["stft"].at("target_max");
        c.stft = sp;
    }
    return c;
}

void save_count_matrix(const std::string& path, const CountMat& x,
                       std::uint64_t seed) {
    std::vector<std::int64_t> flat;
    flat.reserve(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            flat.push_back(x(i, j));
    json j{{"version", kCheckpointVersion}, {"kind", "data"},
           {"F", x.rows()},                 {"T", x.cols()},
           {"seed", seed},                  {"X", flat}};
    dump_doc(path, j);
}

CountMat load_count_matrix(const std::string& path) {
    json j = load_doc(path);
    if (j.value("kind", "") != "data")
        throw ModelError("format-mismatch: not a data file: " + path);
    const auto F = j.at("F").get<Eigen::Index>();
    const auto T = j.at("T").get<Eigen::Index>();
    auto flat = j.at("X").get<std::vector<std::int64_t>>();
    if (static_cast<Eigen::Index>(flat.size()) != F * T)
        throw ModelError("format-mismatch: data size");
    CountMat x(F, T);
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < F; ++i)
        for (Eigen::Index j2 = 0; j2 < T; ++j2)
            x(i, j2) = flat[idx++];
    return x;
}

void save_ground_truth(const std::string& path, const GroundTruth& gt,
                       std::uint64_t seed) {
    json j{{"version", kCheckpointVersion},
           {"kind", "ground-truth"},
           {"F", gt.W.rows()},
           {"T", gt.H.cols()},
           {"L", gt.W.cols()},
           {"seed", seed},
           {"W", mat_to_json(gt.W)},
           {"H", mat_to_json(gt.H)},
           {"S", mask_to_json(gt.S)},
           {"pi", vec_to_json(gt.pi)}};
    dump_doc(path, j);
}

GroundTruth load_ground_truth(const std::string& path) {
    json j = load_doc(path);
    if (j.value("kind", "") != "ground-truth")
        throw ModelError("format-mismatch: not a ground-truth file: " + path);
    const auto F = j.at("F").get<Eigen::Index>();
    const auto T = j.at("T").get<Eigen::Index>();
    const auto L = j.at("L").get<Eigen::Index>();
    GroundTruth gt;
    gt.W = mat_from_json(j.at("W"), F, L);
    gt.H = mat_from_json(j.at("H"), L, T);
    gt.S = mask_from_json(j.at("S"), L, T);
    gt.pi = vec_from_json(j.at("pi"), L);
    return gt;
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& trace) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ModelError("cannot open for writing: " + path);
    f << "iteration,step_size,surrogate_loglik,active_components,seconds\n";
    for (const auto& r : trace) {
        f << r.iteration << ',' << r.step << ',' << r.loglik << ','
          << r.active << ',' << r.seconds << '\n';
    }
}

void append_manifest(const std::string& dir, const std::string& command,
                     const std::vector<std::string>& args,
                     std::uint64_t seed,
                     const std::vector<std::string>& outputs) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    json j{{"command", command},
           {"args", args},
           {"seed", seed},
           {"version", kCheckpointVersion},
           {"unix_millis",
            std::chrono::duration_cast<std::chrono::milliseconds>(now)
                .count()}};
    json outs = json::object();
    for (const auto& path : outputs) {
        // FNV-1a over the file bytes; a content fingerprint, not crypto.
        std::ifstream f(path, std::ios::binary);
        std::uint64_t hash = 0xcbf29ce484222325ULL;
        char ch;
        while (f.get(ch)) {
            hash ^= static_cast<unsigned char>(ch);
            hash *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(hash));
        outs[path] = buf;
    }
    j["outputs"] = outs;
    std::ofstream f(dir + "/manifests.jsonl", std::ios::app);
    if (!f)
        throw ModelError("cannot open manifest in " + dir);
    f << j.dump() << '\n';
}

} // namespace bpnmf
