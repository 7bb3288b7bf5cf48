#include "bpnmf/audio.hpp"
#include "bpnmf/bss_eval.hpp"
#include "bpnmf/gibbs.hpp"
#include "bpnmf/mask_sampler.hpp"
#include "bpnmf/ssmf.hpp"
#include "bpnmf/synthetic.hpp"
#include "bpnmf/types.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace bpnmf;

namespace {

Hyperparams make_hyper(double a, double b, double c, double d, double a0,
                       double b0, int K) {
    Hyperparams h{a, b, c, d, a0, b0, K};
    h.validate();
    return h;
}

py::dict trace_to_dict(const std::vector<TraceRow>& trace) {
    py::list iters, steps, logliks, actives;
    for (const auto& r : trace) {
        iters.append(r.iteration);
        steps.append(r.step);
        logliks.append(r.loglik);
        actives.append(r.active);
    }
    py::dict d;
    d["iteration"] = iters;
    d["step_size"] = steps;
    d["surrogate_loglik"] = logliks;
    d["active_components"] = actives;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "beta process Poisson NMF core";

    py::class_<Hyperparams>(m, "Hyperparams")
        .def(py::init(&make_hyper), py::arg("a") = 0.5, py::arg("b") = 0.5,
             py::arg("c") = 5.0, py::arg("d") = 5.0, py::arg("a0") = 1.0,
             py::arg("b0") = 1.0, py::arg("K") = 500)
        .def_readonly("a", &Hyperparams::a)
        .def_readonly("b", &Hyperparams::b)
        .def_readonly("c", &Hyperparams::c)
        .def_readonly("d", &Hyperparams::d)
        .def_readonly("a0", &Hyperparams::a0)
        .def_readonly("b0", &Hyperparams::b0)
        .def_readonly("K", &Hyperparams::K);

    m.def("step_size", &step_size, py::arg("iteration"),
          py::arg("exponent") = 0.5);

    m.def(
        "surrogate_loglik",
        [](const CountMat& x, const Mat& W, const Mat& H, const MaskMat& s,
           const Vec& pi) {
            GlobalDraw g{W, H, pi};
            LogLik ll = surrogate_loglik(x, g, s);
            return py::make_tuple(ll.value, ll.zero_rate_positive_count);
        },
        py::arg("x"), py::arg("W"), py::arg("H"), py::arg("S"),
        py::arg("pi"));

    m.def(
        "fit_ssmf",
        [](const CountMat& x, const Hyperparams& h, int max_iters,
           double step_exponent, int inner_sweeps, std::uint64_t seed,
           double pi_threshold, int threads) {
            SsmfConfig cfg;
            cfg.max_iters = max_iters;
            cfg.step_exponent = step_exponent;
            cfg.inner_sweeps = inner_sweeps;
            cfg.seed = seed;
            cfg.pi_threshold = pi_threshold;
            cfg.threads = threads;
            auto [q, report] = run_ssmf(x, h, cfg);
            py::dict out;
            out["nuW"] = q.nuW;
            out["rhoW"] = q.rhoW;
            out["nuH"] = q.nuH;
            out["rhoH"] = q.rhoH;
            out["alphaPi"] = q.alphaPi;
            out["betaPi"] = q.betaPi;
            out["pi_mean"] = q.pi_mean();
            out["active_components"] = report.active_components;
            out["last_mask"] = report.last_mask;
            out["trace"] = trace_to_dict(report.trace);
            return out;
        },
        py::arg("x"), py::arg("hyper"), py::arg("max_iters") = 300,
        py::arg("step_exponent") = 0.5, py::arg("inner_sweeps") = 2,
        py::arg("seed") = 0, py::arg("pi_threshold") = 0.05,
        py::arg("threads") = 0);

    m.def(
        "fit_gibbs",
        [](const CountMat& x, const Hyperparams& h, int burn_in,
           int post_burn_samples, int inner_sweeps, std::uint64_t seed,
           double pi_threshold, int threads) {
            GibbsConfig cfg;
            cfg.burn_in = burn_in;
            cfg.post_burn_samples = post_burn_samples;
            cfg.inner_sweeps = inner_sweeps;
            cfg.seed = seed;
            cfg.pi_threshold = pi_threshold;
            cfg.threads = threads;
            GibbsResult res = run_gibbs(x, h, cfg);
            const auto& last = res.samples.back();
            py::dict out;
            out["W"] = last.draw.W;
            out["H"] = last.draw.H;
            out["pi"] = last.draw.pi;
            out["S"] = last.mask;
            out["active_components"] = res.report.active_components;
            out["trace"] = trace_to_dict(res.report.trace);
            return out;
        },
        py::arg("x"), py::arg("hyper"), py::arg("burn_in") = 200,
        py::arg("post_burn_samples") = 1, py::arg("inner_sweeps") = 2,
        py::arg("seed") = 0, py::arg("pi_threshold") = 0.05,
        py::arg("threads") = 0);

    m.def(
        "generate",
        [](int F, int T, int L, double gammaW_shape, double gammaW_rate,
           double gammaH_shape, double gammaH_rate, double beta_pi_alpha,
           double beta_pi_beta, std::uint64_t seed) {
            SyntheticConfig cfg;
            cfg.F = F;
            cfg.T = T;
            cfg.L = L;
            cfg.gammaW_shape = gammaW_shape;
            cfg.gammaW_rate = gammaW_rate;
            cfg.gammaH_shape = gammaH_shape;
            cfg.gammaH_rate = gammaH_rate;
            cfg.beta_pi_alpha = beta_pi_alpha;
            cfg.beta_pi_beta = beta_pi_beta;
            cfg.seed = seed;
            auto [x, gt] = generate(cfg);
            py::dict out;
            out["X"] = x;
            out["W"] = gt.W;
            out["H"] = gt.H;
            out["S"] = gt.S;
            out["pi"] = gt.pi;
            return out;
        },
        py::arg("F") = 30, py::arg("T") = 300, py::arg("L") = 50,
        py::arg("gammaW_shape") = 1.0, py::arg("gammaW_rate") = 1.0,
        py::arg("gammaH_shape") = 5.0, py::arg("gammaH_rate") = 5.0,
        py::arg("beta_pi_alpha") = 0.05, py::arg("beta_pi_beta") = 0.95,
        py::arg("seed") = 0);

    m.def(
        "stft",
        [](const std::vector<double>& signal, int fft_size, int hop,
           double sample_rate) {
            StftConfig cfg{fft_size, hop > 0 ? hop : fft_size / 2,
                           sample_rate};
            return stft(std::span<const double>(signal), cfg).coef;
        },
        py::arg("signal"), py::arg("fft_size") = 512, py::arg("hop") = 0,
        py::arg("sample_rate") = 22050.0);

    m.def(
        "istft",
        [](const Eigen::MatrixXcd& coef, int fft_size, int hop,
           double sample_rate) {
            Spectrogram sp;
            sp.coef = coef;
            sp.config = StftConfig{fft_size, hop > 0 ? hop : fft_size / 2,
                                   sample_rate};
            return istft(sp);
        },
        py::arg("coef"), py::arg("fft_size") = 512, py::arg("hop") = 0,
        py::arg("sample_rate") = 22050.0);

    m.def(
        "quantize",
        [](const Eigen::MatrixXcd& coef, std::int64_t target_max) {
            Spectrogram sp;
            sp.coef = coef;
            CountMat counts = quantize(sp, target_max);
            return py::make_tuple(counts, sp.scale);
        },
        py::arg("coef"), py::arg("target_max") = 1000);

    m.def(
        "wiener_separate",
        [](const Eigen::MatrixXcd& mix, const Mat& W, const Mat& HS,
           const std::vector<std::vector<int>>& groups, int fft_size,
           int hop) {
            Spectrogram sp;
            sp.coef = mix;
            sp.config =
                StftConfig{fft_size, hop > 0 ? hop : fft_size / 2, 22050.0};
            auto parts = wiener_separate(sp, W, HS, groups);
            std::vector<Eigen::MatrixXcd> out;
            for (auto& p : parts)
                out.push_back(std::move(p.coef));
            return out;
        },
        py::arg("mix"), py::arg("W"), py::arg("HS"), py::arg("groups"),
        py::arg("fft_size") = 512, py::arg("hop") = 0);

    m.def("match_components", &match_components, py::arg("activations"),
          py::arg("references"));

    m.def(
        "bss_eval",
        [](const std::vector<Vec>& estimates,
           const std::vector<Vec>& references, double cap) {
            EvalSummary s = evaluate(estimates, references, cap);
            py::list rows;
            for (const auto& sc : s.per_source)
                rows.append(py::make_tuple(sc.sdr, sc.sir, sc.sar));
            py::dict out;
            out["per_source"] = rows;
            out["mean"] = py::make_tuple(s.mean.sdr, s.mean.sir, s.mean.sar);
            out["stderr"] = py::make_tuple(s.stderr_.sdr, s.stderr_.sir,
                                           s.stderr_.sar);
            return out;
        },
        py::arg("estimates"), py::arg("references"), py::arg("cap") = 120.0);
}
