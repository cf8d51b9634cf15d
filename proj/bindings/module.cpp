#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fmuad/checkpoint.hpp"
#include "fmuad/eval.hpp"
#include "fmuad/loss.hpp"
#include "fmuad/model.hpp"
#include "fmuad/synthetic.hpp"
#include "fmuad/trainer.hpp"
#include "fmuad/transforms.hpp"

namespace py = pybind11;
using namespace fmuad;

namespace {

Tensor tensor_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    std::vector<int> shape;
    for (py::ssize_t i = 0; i < a.ndim(); ++i) shape.push_back(static_cast<int>(a.shape(i)));
    std::vector<double> data(a.data(), a.data() + a.size());
    return Tensor(std::move(shape), std::move(data));
}

py::array_t<double> array_from_tensor(const Tensor& t) {
    std::vector<py::ssize_t> shape(t.shape.begin(), t.shape.end());
    py::array_t<double> out(shape);
    std::copy(t.data.begin(), t.data.end(), out.mutable_data());
    return out;
}

std::vector<Tensor> tensors_from_list(const py::list& arrays) {
    std::vector<Tensor> out;
    for (auto item : arrays)
        out.push_back(tensor_from_array(
            item.cast<py::array_t<double, py::array::c_style | py::array::forcecast>>()));
    return out;
}

SeriesMatrix series_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw ContractError("series must be a 2-D array (features x time)");
    SeriesMatrix s;
    s.values = tensor_from_array(a);
    return s;
}

// Owns the model plus its normalization stats; mirrors what the CLI persists.
struct PyDetector {
    std::unique_ptr<Model> model;
    NormStats stats;

    PyDetector(int m, int tau, int k, int stride, int hidden_ch, std::vector<int> channels,
               bool use_correlation, bool use_temporal, bool use_spatial, uint64_t seed) {
        ModelConfig cfg;
        cfg.m = m;
        cfg.tau = tau;
        cfg.k = k;
        cfg.stride = stride;
        cfg.hidden_ch = hidden_ch;
        cfg.channels = std::move(channels);
        cfg.use_correlation = use_correlation;
        cfg.use_temporal = use_temporal;
        cfg.use_spatial = use_spatial;
        model = std::make_unique<Model>(cfg, seed);
    }
    explicit PyDetector(LoadedModel loaded)
        : model(std::move(loaded.model)), stats(std::move(loaded.stats)) {}

    py::list fit(const py::array_t<double, py::array::c_style | py::array::forcecast>& train,
                 int epochs, int warmup_epochs, int batch_size, double learning_rate,
                 bool compactness, int threads, uint64_t shuffle_seed) {
        SeriesMatrix s = series_from_array(train);
        stats = compute_norm_stats(s);
        apply_normalization(s, stats, false);
        TrainOptions opts;
        opts.epochs = epochs;
        opts.warmup_epochs = warmup_epochs;
        opts.batch_size = batch_size;
        opts.learning_rate = learning_rate;
        opts.compactness = compactness;
        opts.threads = threads;
        opts.shuffle_seed = shuffle_seed;
        std::vector<EpochLog> log;
        {
            py::gil_scoped_release release;
            log = train_model(*model, s, opts);
        }
        py::list out;
        for (const auto& e : log) {
            py::dict d;
            d["epoch"] = e.epoch;
            d["l1"] = e.l1;
            d["l2"] = e.l2;
            d["loss"] = e.loss;
            out.append(d);
        }
        return out;
    }

    py::tuple score(const py::array_t<double, py::array::c_style | py::array::forcecast>& test,
                    int threads) {
        SeriesMatrix s = series_from_array(test);
        apply_normalization(s, stats, true);
        ScoreSeries scores;
        {
            py::gil_scoped_release release;
            scores = score_series(*model, s, threads);
        }
        py::array_t<long> ts(static_cast<py::ssize_t>(scores.timestamps.size()));
        std::copy(scores.timestamps.begin(), scores.timestamps.end(), ts.mutable_data());
        py::array_t<double> sc(static_cast<py::ssize_t>(scores.scores.size()));
        std::copy(scores.scores.begin(), scores.scores.end(), sc.mutable_data());
        return py::make_tuple(ts, sc);
    }

    void save(const std::string& path) { save_checkpoint(*model, stats, path); }
};

py::dict report_to_dict(const EvalReport& r) {
    py::dict d;
    d["threshold"] = r.threshold;
    d["precision"] = r.raw.precision;
    d["recall"] = r.raw.recall;
    d["f1"] = r.raw.f1;
    d["precision_adjusted"] = r.adjusted.precision;
    d["recall_adjusted"] = r.adjusted.recall;
    d["f1_adjusted"] = r.adjusted.f1;
    d["tp"] = r.adjusted.tp;
    d["fp"] = r.adjusted.fp;
    d["fn"] = r.adjusted.fn;
    return d;
}

}  // namespace

PYBIND11_MODULE(_fmuad, m) {
    m.doc() = "Forecast-based multi-aspect anomaly detection core";

    m.def("signature_matrix",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& w) {
              return array_from_tensor(signature_matrix(tensor_from_array(w)));
          },
          py::arg("window"), "Pairwise cosine similarities between the rows of an m x k window");
    m.def("frequency_matrix",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& w) {
              return array_from_tensor(frequency_matrix(tensor_from_array(w)));
          },
          py::arg("window"), "Per-row DFT magnitudes for bins 1..k/2 (1/k normalization)");
    m.def("build_target",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& w) {
              return array_from_tensor(build_target(tensor_from_array(w)));
          },
          py::arg("window"), "Concatenated [signature | frequency | window] target");

    m.def("forecast_loss",
          [](const py::list& truths, const py::list& preds) {
              return forecast_loss(nullptr, tensors_from_list(truths), tensors_from_list(preds))
                  .data[0];
          },
          py::arg("truths"), py::arg("preds"));
    m.def("compactness_loss",
          [](const py::list& preds) {
              return compactness_loss(nullptr, tensors_from_list(preds)).data[0];
          },
          py::arg("preds"));
    m.def("training_loss",
          [](double l1, double l2) {
              return training_loss(nullptr, Tensor::scalar(l1), Tensor::scalar(l2)).data[0];
          },
          py::arg("l1"), py::arg("l2"));
    m.def("anomaly_score",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& truth,
             const py::array_t<double, py::array::c_style | py::array::forcecast>& pred) {
              return anomaly_score(tensor_from_array(truth), tensor_from_array(pred));
          },
          py::arg("truth"), py::arg("pred"));

    m.def("point_adjust", &point_adjust, py::arg("pred_flags"), py::arg("labels"));
    m.def("evaluate",
          [](const std::vector<double>& scores, const std::vector<bool>& labels) {
              return report_to_dict(select_threshold(scores, labels));
          },
          py::arg("scores"), py::arg("labels"),
          "Best-threshold sweep by point-adjusted F1; returns the full report");

    m.def("generate_synthetic",
          [](uint64_t seed, const std::vector<std::string>& kinds, double anomaly_fraction, int m,
             int t_train, int t_test) {
              std::vector<AnomalyKind> parsed;
              for (const auto& name : kinds) parsed.push_back(anomaly_kind_from_name(name));
              SyntheticSpec spec =
                  default_synthetic_spec(seed, parsed, anomaly_fraction, m, t_train, t_test);
              SyntheticData data = generate_synthetic(spec);
              py::list labels;
              for (bool b : data.labels) labels.append(b);
              return py::make_tuple(array_from_tensor(data.train.values),
                                    array_from_tensor(data.test.values), labels);
          },
          py::arg("seed"), py::arg("kinds"), py::arg("anomaly_fraction") = 0.05, py::arg("m") = 5,
          py::arg("t_train") = 20000, py::arg("t_test") = 5000,
          "Synthetic train/test series plus test labels; kinds are "
          "'frequency-change', 'correlation-change', 'abrupt-value', 'subtle-value'");

    py::class_<PyDetector>(m, "Detector")
        .def(py::init<int, int, int, int, int, std::vector<int>, bool, bool, bool, uint64_t>(),
             py::arg("m"), py::arg("tau") = 500, py::arg("k") = 30, py::arg("stride") = 10,
             py::arg("hidden_ch") = 16, py::arg("channels") = std::vector<int>{32, 64, 128},
             py::arg("use_correlation") = true, py::arg("use_temporal") = true,
             py::arg("use_spatial") = true, py::arg("seed") = 1)
        .def("fit", &PyDetector::fit, py::arg("train"), py::arg("epochs") = 10,
             py::arg("warmup_epochs") = 3, py::arg("batch_size") = 32,
             py::arg("learning_rate") = 1e-3, py::arg("compactness") = true,
             py::arg("threads") = 0, py::arg("shuffle_seed") = 1,
             "Min-max normalizes the raw m x T train series and trains; returns the epoch log")
        .def("score", &PyDetector::score, py::arg("test"), py::arg("threads") = 0,
             "Scores a raw m x T test series; returns (timestamps, scores)")
        .def("save", &PyDetector::save, py::arg("path"))
        .def_static("load", [](const std::string& path) {
            return PyDetector(load_checkpoint(path));
        }, py::arg("path"));
}
