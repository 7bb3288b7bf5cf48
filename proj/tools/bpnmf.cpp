// bpnmf: beta process Poisson NMF - synthesis, fitting, separation,
// evaluation, and diagnostics.

#include "bpnmf/audio.hpp"
#include "bpnmf/bss_eval.hpp"
#include "bpnmf/checkpoint.hpp"
#include "bpnmf/gibbs.hpp"
#include "bpnmf/mask_sampler.hpp"
#include "bpnmf/ssmf.hpp"
#include "bpnmf/synthetic.hpp"
#include "bpnmf/wav.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bpnmf;

namespace {

int default_threads() {
    if (const char* env = std::getenv("BPNMF_THREADS"))
        return std::max(0, std::atoi(env));
    return 0;
}

std::uint64_t resolve_seed(CLI::Option* opt, std::uint64_t seed) {
    if (opt->count() > 0)
        return seed;
    // No explicit seed: generate one and record it in the manifest.
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) | rd();
}

std::vector<std::string> collect_args(int argc, char** argv) {
    return {argv + 1, argv + argc};
}

json load_json_config(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw ModelError("file-not-found: " + path);
    json j;
    f >> j;
    return j;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct FitArgs {
    std::string data_path, out_dir, algorithm = "ssmf", config_path;
    Hyperparams hyper;
    int iters = 300, burn_in = 200, post_samples = 1, inner_sweeps = 2;
    double kappa = 0.5, tau = 0.05;
    std::uint64_t seed = 0;
    int threads = default_threads();
    int fft_size = 512, hop = 0;
    std::int64_t target_max = 1000;
    double sample_rate = 22050.0;
};

int cmd_fit(const FitArgs& a, const std::vector<std::string>& argv_rest) {
    CountMat x;
    std::optional<StftProvenance> prov;
    if (ends_with(a.data_path, ".wav")) {
        StftConfig sc;
        sc.fft_size = a.fft_size;
        sc.hop = a.hop > 0 ? a.hop : a.fft_size / 2;
        sc.sample_rate = a.sample_rate;
        WavData wav = read_wav(a.data_path, sc.sample_rate);
        Spectrogram sp = stft(wav.samples, sc);
        x = quantize(sp, a.target_max);
        prov = StftProvenance{sc.fft_size, sc.hop, sc.sample_rate,
                              a.target_max};
    } else {
        x = load_count_matrix(a.data_path);
    }

    fs::create_directories(a.out_dir);
    Checkpoint ckpt;
    ckpt.hyper = a.hyper;
    ckpt.F = x.rows();
    ckpt.T = x.cols();
    ckpt.seed = a.seed;
    ckpt.stft = prov;

    std::vector<TraceRow> trace;
    if (a.algorithm == "ssmf") {
        SsmfConfig cfg;
        cfg.max_iters = a.iters;
        cfg.step_exponent = a.kappa;
        cfg.inner_sweeps = a.inner_sweeps;
        cfg.seed = a.seed;
        cfg.pi_threshold = a.tau;
        cfg.threads = a.threads;
        auto [q, report] = run_ssmf(x, a.hyper, cfg);
        ckpt.kind = "ssmf";
        ckpt.iterations = a.iters;
        ckpt.q = std::move(q);
        trace = report.trace;
        std::cout << "active components: " << report.active_components
                  << "\n";
    } else if (a.algorithm == "gibbs") {
        GibbsConfig cfg;
        cfg.burn_in = a.burn_in;
        cfg.post_burn_samples = a.post_samples;
        cfg.inner_sweeps = a.inner_sweeps;
        cfg.seed = a.seed;
        cfg.pi_threshold = a.tau;
        cfg.threads = a.threads;
        GibbsResult res = run_gibbs(x, a.hyper, cfg);
        ckpt.kind = "gibbs";
        ckpt.iterations = a.burn_in + a.post_samples;
        ckpt.draw = res.samples.back().draw;
        ckpt.mask = res.samples.back().mask;
        trace = res.report.trace;
        std::cout << "active components: " << res.report.active_components
                  << "\n";
    } else {
        throw ModelError("invalid algorithm: " + a.algorithm);
    }

    const std::string ckpt_path = a.out_dir + "/checkpoint.json";
    const std::string trace_path = a.out_dir + "/trace.csv";
    save_checkpoint(ckpt_path, ckpt);
    write_trace_csv(trace_path, trace);
    append_manifest(a.out_dir, "fit", argv_rest, a.seed,
                    {ckpt_path, trace_path});
    return 0;
}

} // namespace

int main(int argc, char** argv) try {
    CLI::App app{"truncated beta process Poisson NMF"};
    app.require_subcommand(1);
    const auto argv_rest = collect_args(argc, argv);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate synthetic data");
    std::string synth_out, synth_config;
    std::uint64_t synth_seed = 0;
    bool paper_scale = false;
    synth->add_option("--out", synth_out, "output directory")->required();
    auto* synth_seed_opt = synth->add_option("--seed", synth_seed);
    synth->add_option("--config", synth_config, "JSON config file");
    synth->add_flag("--paper-scale", paper_scale,
                    "75x1000 data with L=100 components");

    // ---- fit ----
    auto* fit = app.add_subcommand("fit", "fit the model to count data");
    FitArgs fa;
    fit->add_option("--data", fa.data_path,
                    "data file (checkpoint-format JSON) or WAV")
        ->required();
    fit->add_option("--out", fa.out_dir, "output directory")->required();
    fit->add_option("--algorithm", fa.algorithm, "ssmf | gibbs");
    fit->add_option("--config", fa.config_path, "JSON config file");
    fit->add_option("--K", fa.hyper.K, "truncation level");
    fit->add_option("--a", fa.hyper.a);
    fit->add_option("--b", fa.hyper.b);
    fit->add_option("--c", fa.hyper.c);
    fit->add_option("--d", fa.hyper.d);
    fit->add_option("--a0", fa.hyper.a0);
    fit->add_option("--b0", fa.hyper.b0);
    fit->add_option("--iters", fa.iters, "SSMF iterations");
    fit->add_option("--burn-in", fa.burn_in, "Gibbs burn-in iterations");
    fit->add_option("--post-samples", fa.post_samples);
    fit->add_option("--inner-sweeps", fa.inner_sweeps);
    fit->add_option("--kappa", fa.kappa, "step-size exponent");
    fit->add_option("--tau", fa.tau, "active-component threshold");
    auto* fit_seed_opt = fit->add_option("--seed", fa.seed);
    fit->add_option("--threads", fa.threads);
    fit->add_option("--fft", fa.fft_size, "FFT size for WAV input");
    fit->add_option("--hop", fa.hop, "hop size (default fft/2)");
    fit->add_option("--target-max", fa.target_max, "quantization peak");
    fit->add_option("--rate", fa.sample_rate, "resample rate for WAV input");

    // ---- separate ----
    auto* sep = app.add_subcommand("separate", "separate a mixture WAV");
    std::string sep_mix, sep_model, sep_out;
    std::vector<std::string> sep_refs;
    sep->add_option("--mix", sep_mix, "mixture WAV")->required();
    sep->add_option("--model", sep_model, "fitted checkpoint")->required();
    sep->add_option("--refs", sep_refs, "reference WAVs for matching")
        ->required()
        ->delimiter(',');
    sep->add_option("--out", sep_out, "output directory")->required();

    // ---- eval ----
    auto* ev = app.add_subcommand("eval", "SDR/SIR/SAR evaluation");
    std::string ev_est, ev_refs, ev_out;
    ev->add_option("--est", ev_est, "directory of estimated WAVs")
        ->required();
    ev->add_option("--refs", ev_refs, "directory of reference WAVs")
        ->required();
    ev->add_option("--out", ev_out, "output directory (default --est)");

    // ---- diag ----
    auto* diag = app.add_subcommand("diag", "diagnostic CSVs");
    std::string diag_model, diag_out, diag_data;
    double diag_tau = 0.05;
    diag->add_option("--model", diag_model)->required();
    diag->add_option("--out", diag_out)->required();
    diag->add_option("--data", diag_data,
                     "count data for SSMF mask reconstruction");
    diag->add_option("--tau", diag_tau);

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) {
        SyntheticConfig cfg;
        if (paper_scale)
            cfg = SyntheticConfig::paper_scale(0);
        if (!synth_config.empty()) {
            json j = load_json_config(synth_config);
            cfg.F = j.value("F", cfg.F);
            cfg.T = j.value("T", cfg.T);
            cfg.L = j.value("L", cfg.L);
            cfg.gammaW_shape = j.value("gammaW_shape", cfg.gammaW_shape);
            cfg.gammaW_rate = j.value("gammaW_rate", cfg.gammaW_rate);
            cfg.gammaH_shape = j.value("gammaH_shape", cfg.gammaH_shape);
            cfg.gammaH_rate = j.value("gammaH_rate", cfg.gammaH_rate);
            cfg.beta_pi_alpha = j.value("beta_pi_alpha", cfg.beta_pi_alpha);
            cfg.beta_pi_beta = j.value("beta_pi_beta", cfg.beta_pi_beta);
            cfg.seed = j.value("seed", cfg.seed);
        }
        cfg.seed = resolve_seed(synth_seed_opt, synth_seed);
        if (synth_seed_opt->count() == 0 && !synth_config.empty())
            cfg.seed = synth_seed; // config seed wins over auto
        fs::create_directories(synth_out);
        auto [x, gt] = generate(cfg);
        const std::string data_path = synth_out + "/data.json";
        const std::string gt_path = synth_out + "/ground_truth.json";
        save_count_matrix(data_path, x, cfg.seed);
        save_ground_truth(gt_path, gt, cfg.seed);
        append_manifest(synth_out, "synth", argv_rest, cfg.seed,
                        {data_path, gt_path});
        std::cout << "wrote " << data_path << " (" << x.rows() << "x"
                  << x.cols() << ")\n";
        return 0;
    }

    if (fit->parsed()) {
        if (!fa.config_path.empty()) {
            // Flags override config: apply config values only where the
            // flag was not given.
            json j = load_json_config(fa.config_path);
            auto maybe = [&](const char* flag, auto& field) {
                using T = std::decay_t<decltype(field)>;
                if (fit->get_option(flag)->count() == 0 && j.contains(&flag[2]))
                    field = j.at(&flag[2]).get<T>();
            };
            maybe("--K", fa.hyper.K);
            maybe("--a", fa.hyper.a);
            maybe("--b", fa.hyper.b);
            maybe("--c", fa.hyper.c);
            maybe("--d", fa.hyper.d);
            maybe("--a0", fa.hyper.a0);
            maybe("--b0", fa.hyper.b0);
            maybe("--iters", fa.iters);
            maybe("--kappa", fa.kappa);
            maybe("--tau", fa.tau);
            maybe("--seed", fa.seed);
            if (fit->get_option("--algorithm")->count() == 0 &&
                j.contains("algorithm"))
                fa.algorithm = j.at("algorithm").get<std::string>();
        }
        fa.seed = resolve_seed(fit_seed_opt, fa.seed);
        return cmd_fit(fa, argv_rest);
    }

    if (sep->parsed()) {
        Checkpoint ckpt = load_checkpoint(sep_model);
        StftConfig sc;
        if (ckpt.stft) {
            sc.fft_size = ckpt.stft->fft_size;
            sc.hop = ckpt.stft->hop;
            sc.sample_rate = ckpt.stft->sample_rate;
        }
        WavData mix = read_wav(sep_mix, sc.sample_rate);
        Spectrogram mix_spec = stft(mix.samples, sc);
        if (mix_spec.bins() != ckpt.F || mix_spec.frames() != ckpt.T)
            throw ModelError("model/data dimension mismatch");

        Mat W = ckpt.component_W();
        MaskMat mask;
        if (ckpt.kind == "gibbs") {
            mask = *ckpt.mask;
        } else {
            Spectrogram qspec = mix_spec;
            CountMat x = quantize(
                qspec, ckpt.stft ? ckpt.stft->target_max : 1000);
            GlobalDraw means{W, Mat(ckpt.q->nuH.array() / ckpt.q->rhoH.array()),
                             ckpt.component_pi_mean()};
            mask = map_mask(x, means);
        }
        Mat HS = ckpt.component_HS(mask);

        // --refs accepts WAV files or a directory of them.
        std::vector<std::string> ref_paths;
        for (const auto& ref : sep_refs) {
            if (fs::is_directory(ref)) {
                for (const auto& e : fs::directory_iterator(ref))
                    if (e.path().extension() == ".wav")
                        ref_paths.push_back(e.path().string());
            } else {
                ref_paths.push_back(ref);
            }
        }
        std::sort(ref_paths.begin(), ref_paths.end());

        std::vector<Vec> envelopes;
        for (const auto& ref : ref_paths) {
            WavData rw = read_wav(ref, sc.sample_rate);
            envelopes.push_back(power_envelope(rw.samples, sc));
            if (envelopes.back().size() != HS.cols())
                envelopes.back().conservativeResize(HS.cols());
        }
        std::vector<int> picks = match_components(HS, envelopes);
        std::vector<std::vector<int>> groups;
        for (int p : picks)
            groups.push_back({p});
        auto parts = wiener_separate(mix_spec, W, HS, groups);

        fs::create_directories(sep_out);
        std::vector<std::string> outs;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            auto sig = istft(parts[i]);
            std::string path =
                sep_out + "/source_" + std::to_string(i) + ".wav";
            write_wav(path, sig, sc.sample_rate);
            outs.push_back(path);
        }
        append_manifest(sep_out, "separate", argv_rest, ckpt.seed, outs);
        for (std::size_t i = 0; i < picks.size(); ++i)
            std::cout << "source " << i << " <- component " << picks[i]
                      << "\n";
        return 0;
    }

    if (ev->parsed()) {
        auto list_wavs = [](const std::string& dir) {
            std::vector<std::string> out;
            for (const auto& e : fs::directory_iterator(dir))
                if (e.path().extension() == ".wav")
                    out.push_back(e.path().string());
            std::sort(out.begin(), out.end());
            return out;
        };
        auto est_files = list_wavs(ev_est);
        auto ref_files = list_wavs(ev_refs);
        if (est_files.size() != ref_files.size() || est_files.empty())
            throw ModelError("eval: estimate/reference file count mismatch");

        std::size_t min_len = SIZE_MAX;
        std::vector<Vec> est, refs;
        for (std::size_t i = 0; i < est_files.size(); ++i) {
            WavData e = read_wav(est_files[i]);
            // References are brought to the estimate's sample rate so the
            // comparison is sample-aligned.
            WavData r = read_wav(ref_files[i], e.sample_rate);
            min_len = std::min({min_len, e.samples.size(), r.samples.size()});
            est.push_back(
                Eigen::Map<const Vec>(e.samples.data(), e.samples.size()));
            refs.push_back(
                Eigen::Map<const Vec>(r.samples.data(), r.samples.size()));
        }
        for (auto& v : est)
            v.conservativeResize(min_len);
        for (auto& v : refs)
            v.conservativeResize(min_len);
        EvalSummary summary = evaluate(est, refs);

        const std::string out_dir = ev_out.empty() ? ev_est : ev_out;
        fs::create_directories(out_dir);
        const std::string csv = out_dir + "/scores.csv";
        std::ofstream f(csv);
        f << "source,sdr,sir,sar\n";
        // Zero-delay projection variant: not comparable with the
        // filter-allowing bss_eval toolkit in absolute terms.
        for (std::size_t i = 0; i < summary.per_source.size(); ++i)
            f << fs::path(est_files[i]).stem().string() << ','
              << summary.per_source[i].sdr << ',' << summary.per_source[i].sir
              << ',' << summary.per_source[i].sar << '\n';
        f << "mean," << summary.mean.sdr << ',' << summary.mean.sir << ','
          << summary.mean.sar << '\n';
        f << "stderr," << summary.stderr_.sdr << ',' << summary.stderr_.sir
          << ',' << summary.stderr_.sar << '\n';
        f.close();
        append_manifest(out_dir, "eval", argv_rest, 0, {csv});
        std::cout << "mean SDR " << summary.mean.sdr << " dB (zero-delay "
                     "projection metric; not comparable to filter-allowing "
                     "bss_eval)\n";
        return 0;
    }

    if (diag->parsed()) {
        Checkpoint ckpt = load_checkpoint(diag_model);
        Vec pim = ckpt.component_pi_mean();
        fs::create_directories(diag_out);
        const std::string hist_csv = diag_out + "/pi_posterior.csv";
        std::ofstream hf(hist_csv);
        hf << "component,pi_mean,active\n";
        for (Eigen::Index k = 0; k < pim.size(); ++k)
            hf << k << ',' << pim(k) << ',' << (pim(k) > diag_tau ? 1 : 0)
               << '\n';
        hf.close();

        MaskMat mask;
        if (ckpt.kind == "gibbs") {
            mask = *ckpt.mask;
        } else if (!diag_data.empty()) {
            CountMat x = load_count_matrix(diag_data);
            GlobalDraw means{ckpt.component_W(),
                             Mat(ckpt.q->nuH.array() / ckpt.q->rhoH.array()),
                             pim};
            mask = map_mask(x, means);
        } else {
            mask = MaskMat::Ones(ckpt.hyper.K, ckpt.T);
        }
        Mat W = ckpt.component_W();
        Mat HS = ckpt.component_HS(mask);

        const std::string comp_csv = diag_out + "/components.csv";
        const std::string act_csv = diag_out + "/activations.csv";
        std::ofstream cf(comp_csv), af(act_csv);
        std::vector<Eigen::Index> active;
        for (Eigen::Index k = 0; k < pim.size(); ++k)
            if (pim(k) > diag_tau)
                active.push_back(k);
        cf << "f";
        for (auto k : active)
            cf << ",component_" << k;
        cf << '\n';
        for (Eigen::Index f2 = 0; f2 < W.rows(); ++f2) {
            cf << f2;
            for (auto k : active)
                cf << ',' << W(f2, k);
            cf << '\n';
        }
        af << "t";
        for (auto k : active)
            af << ",component_" << k;
        af << '\n';
        for (Eigen::Index t = 0; t < HS.cols(); ++t) {
            af << t;
            for (auto k : active)
                af << ',' << HS(k, t);
            af << '\n';
        }
        cf.close();
        af.close();
        append_manifest(diag_out, "diag", argv_rest, ckpt.seed,
                        {hist_csv, comp_csv, act_csv});
        return 0;
    }

    return 0;
} catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
}
