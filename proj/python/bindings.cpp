#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "elmsol/dataset.hpp"
#include "elmsol/diagnostics.hpp"
#include "elmsol/elm.hpp"
#include "elmsol/error.hpp"
#include "elmsol/metrics.hpp"
#include "elmsol/selection.hpp"
#include "elmsol/synth.hpp"

namespace py = pybind11;
using namespace elmsol;

namespace {

std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

PYBIND11_MODULE(_elmsol, m) {
  m.doc() = "Extreme learning machine for hydrocarbon solubility in brines";

  // Base first: pybind11 tries the most recently registered translator first.
  auto base = py::register_exception<Error>(m, "ElmsolError", PyExc_RuntimeError);
  py::register_exception<InvalidInputError>(m, "InvalidInputError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<ModelFormatError>(m, "ModelFormatError", base.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());

  m.attr("FEATURE_NAMES") = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());

  py::class_<Dataset>(m, "Dataset")
      .def("__len__", &Dataset::size)
      .def_property_readonly("provenance", &Dataset::provenance)
      .def("features", &Dataset::features)
      .def("targets", &Dataset::targets);

  m.def("load_csv", [](const std::filesystem::path& path, bool percent, bool ion_columns) {
    return load_csv(path, CsvOptions{percent, ion_columns});
  }, py::arg("path"), py::arg("percent") = false, py::arg("ion_columns") = false);
  m.def("write_csv", &write_csv, py::arg("data"), py::arg("path"));
  m.def("gen_synth", [](std::size_t count, std::uint64_t seed, double noise) {
    return gen_synth(SynthSpec{count, seed, noise});
  }, py::arg("count") = 1000, py::arg("seed") = 42, py::arg("noise") = 0.05);
  m.def("split", &split, py::arg("data"), py::arg("fraction") = 0.75, py::arg("seed") = 42);

  py::class_<ElmConfig>(m, "ElmConfig")
      .def(py::init([](int hidden_nodes, std::optional<double> c, std::uint64_t seed) {
        ElmConfig cfg;
        cfg.hidden_nodes = hidden_nodes;
        cfg.regularization = c;
        cfg.seed = seed;
        cfg.validate();
        return cfg;
      }), py::arg("hidden_nodes") = 30, py::arg("C") = py::none(), py::arg("seed") = 42)
      .def_readwrite("hidden_nodes", &ElmConfig::hidden_nodes)
      .def_readwrite("C", &ElmConfig::regularization)
      .def_readwrite("seed", &ElmConfig::seed);

  py::class_<ElmModel>(m, "ElmModel")
      .def_property_readonly("config", &ElmModel::config)
      .def_property_readonly("input_weights", &ElmModel::input_weights)
      .def_property_readonly("biases", &ElmModel::biases)
      .def_property_readonly("output_weights", &ElmModel::output_weights)
      .def("predict", &ElmModel::predict, py::arg("x"))
      .def("hidden_matrix", &ElmModel::hidden_matrix, py::arg("x"))
      .def("save", [](const ElmModel& self, const std::filesystem::path& p) { save_model(self, p); })
      .def("to_json", &model_to_json);

  m.def("train", py::overload_cast<const ElmConfig&, const Dataset&>(&train), py::arg("config"), py::arg("data"));
  m.def("train_arrays", [](const ElmConfig& cfg, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t) {
    return train(cfg, x, t);
  }, py::arg("config"), py::arg("x"), py::arg("t"));
  m.def("load_model", &load_model, py::arg("path"));

  m.def("mre", [](const std::vector<double>& a, const std::vector<double>& p) { return mre(a, p); });
  m.def("mse", [](const std::vector<double>& a, const std::vector<double>& p) { return mse(a, p); });
  m.def("rmse", [](const std::vector<double>& a, const std::vector<double>& p) { return rmse(a, p); });
  m.def("r_squared", [](const std::vector<double>& a, const std::vector<double>& p) { return r_squared(a, p); });
  m.def("evaluate", [](const std::vector<double>& a, const std::vector<double>& p) {
    const EvalReport r = evaluate(a, p);
    py::dict d;
    d["r2"] = r.r2;
    d["mre_percent"] = r.mre_percent;
    d["mse"] = r.mse;
    d["rmse"] = r.rmse;
    d["n"] = r.n;
    return d;
  });

  m.def("hat_diagonal", &hat_diagonal, py::arg("design"));
  m.def("critical_leverage", &critical_leverage, py::arg("parameters"), py::arg("points"));
  m.def("williams_report", [](const Eigen::MatrixXd& design, const std::vector<double>& actual,
                              const std::vector<double>& predicted, bool intercept) {
    const LeverageReport r = williams_report(design, actual, predicted, {intercept});
    std::vector<std::string> flags;
    for (PointFlag f : r.flags) flags.emplace_back(to_string(f));
    py::dict d;
    d["hat"] = as_vector(r.hat_diagonal);
    d["std_residual"] = as_vector(r.std_residuals);
    d["critical_leverage"] = r.critical_leverage;
    d["flags"] = flags;
    return d;
  }, py::arg("design"), py::arg("actual"), py::arg("predicted"), py::arg("intercept") = false);
  m.def("relevancy_factor", [](const std::vector<double>& x, const std::vector<double>& y) {
    return relevancy_factor(x, y);
  });
  m.def("sensitivity", [](const Dataset& data) {
    const SensitivityReport r = sensitivity_report(data);
    py::dict d;
    for (std::size_t k = 0; k < kFeatureCount; ++k)
      d[py::str(std::string(kFeatureNames[k]))] = r.factors[k] ? py::object(py::float_(*r.factors[k])) : py::none();
    return d;
  }, py::arg("data"));

  m.def("sweep", [](const Dataset& train_set, const Dataset& test_set, const std::string& node_range, int repeats,
                    std::uint64_t seed, unsigned threads) {
    SweepOptions opts;
    opts.nodes = NodeRange::parse(node_range);
    opts.repeats = repeats;
    opts.threads = threads;
    ElmConfig cfg;
    cfg.seed = seed;
    SweepReport r;
    {
      py::gil_scoped_release release;
      r = sweep(train_set, test_set, opts, cfg);
    }
    py::list points;
    for (const auto& p : r.points) points.append(py::make_tuple(p.hidden_nodes, p.repeat_index, p.train_rmse, p.test_rmse));
    return py::make_tuple(r.selected_nodes, points);
  }, py::arg("train"), py::arg("test"), py::arg("node_range") = "1:60", py::arg("repeats") = 5,
     py::arg("seed") = 42, py::arg("threads") = 0);
}
