#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <random>
#include <sstream>

#include "storn/checkpoint.hpp"
#include "storn/cli.hpp"
#include "storn/errors.hpp"
#include "storn/estimator.hpp"
#include "storn/seed.hpp"
#include "storn/tasks.hpp"

namespace py = pybind11;
using namespace storn;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor to_tensor(const Array& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-d array (steps x channels)");
  const auto rows = static_cast<std::size_t>(a.shape(0)), cols = static_cast<std::size_t>(a.shape(1));
  return Tensor({rows, cols}, std::vector<double>(a.data(), a.data() + rows * cols));
}

Array to_array(const Tensor& t) {
  Array a({t.dim(0), t.dim(1)});
  std::copy(t.data().begin(), t.data().end(), a.mutable_data());
  return a;
}

SequenceBatch to_batch(const std::vector<Array>& seqs) {
  std::vector<Tensor> ts;
  ts.reserve(seqs.size());
  for (const auto& s : seqs) ts.push_back(to_tensor(s));
  return SequenceBatch::from_sequences(ts);
}

std::vector<Array> to_arrays(const Dataset& ds) {
  std::vector<Array> out;
  for (const auto& s : ds.sequences) out.push_back(to_array(s));
  return out;
}

Tensor normal_noise(std::size_t steps, std::size_t batch, std::size_t latent, std::uint64_t seed) {
  Tensor eps({steps, batch, latent});
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  for (auto& v : eps.data()) v = n01(rng);
  return eps;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stochastic recurrent network core";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> argv{"storn"};
        argv.insert(argv.end(), args.begin(), args.end());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(argv, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a command line (without the program name); returns (exit code, stdout, stderr).");

  m.def(
      "synth_coupled",
      [](std::size_t n, std::size_t steps, std::size_t channels, std::uint64_t seed) {
        return to_arrays(synth_coupled_binary(n, steps, channels, seed));
      },
      py::arg("n"), py::arg("steps") = 10, py::arg("channels") = 4, py::arg("seed") = 0);
  m.def(
      "synth_sines",
      [](std::size_t n, std::size_t steps, std::size_t channels, double noise, std::uint64_t seed) {
        return to_arrays(synth_sines(n, steps, channels, noise, seed));
      },
      py::arg("n"), py::arg("steps") = 10, py::arg("channels") = 4, py::arg("noise") = 0.1,
      py::arg("seed") = 0);

  py::class_<Checkpoint>(m, "Model")
      .def_static(
          "load", [](const std::filesystem::path& p) { return load_checkpoint(p); }, py::arg("path"))
      .def(
          "save", [](const Checkpoint& c, const std::filesystem::path& p) { save_checkpoint(p, c); },
          py::arg("path"))
      .def_property_readonly("kind", [](const Checkpoint& c) { return std::string(to_string(c.model.spec.kind)); })
      .def_property_readonly("input", [](const Checkpoint& c) { return c.model.spec.input; })
      .def_property_readonly("hidden", [](const Checkpoint& c) { return c.model.spec.hidden; })
      .def_property_readonly("latent", [](const Checkpoint& c) { return c.model.spec.latent; })
      .def_property_readonly("likelihood",
                             [](const Checkpoint& c) { return std::string(to_string(c.model.spec.likelihood)); })
      .def_property_readonly("recognition",
                             [](const Checkpoint& c) { return std::string(to_string(c.model.spec.recognition)); })
      .def_property_readonly("standardization",
                             [](const Checkpoint& c) -> py::object {
                               if (!c.standardization) return py::none();
                               return py::make_tuple(c.standardization->mean, c.standardization->std);
                             })
      .def(
          "parameters",
          [](const Checkpoint& c) {
            py::dict d;
            for (const auto& [name, t] : parameters_of(c.model)) {
              Array a(std::vector<py::ssize_t>(t.shape().begin(), t.shape().end()));
              std::copy(t.data().begin(), t.data().end(), a.mutable_data());
              d[py::str(name)] = a;
            }
            return d;
          },
          "Copies of the trainable tensors by name.")
      .def(
          "bound",
          [](const Checkpoint& c, const std::vector<Array>& seqs, std::uint64_t seed) {
            const SequenceBatch x = to_batch(seqs);
            const Tensor eps = normal_noise(x.steps(), x.batch(), c.model.spec.latent, seed);
            py::gil_scoped_release release;
            const BoundReport r = storn_bound(c.model, x, eps);
            return std::make_tuple(r.bound, r.kl, r.recon_nll);
          },
          py::arg("sequences"), py::arg("seed") = 0,
          "Single-draw bound per sequence in model space: (bound, kl, recon).")
      .def(
          "nll",
          [](const Checkpoint& c, const std::vector<Array>& seqs, std::size_t samples, std::uint64_t seed) {
            const SequenceBatch x = to_batch(seqs);
            ImportanceOptions opt;
            opt.samples = samples;
            opt.seed = seed;
            py::gil_scoped_release release;
            const ImportanceReport r = importance_nll(c.model, x, opt);
            std::vector<double> value, se;
            for (const auto& e : r.per_sequence) {
              value.push_back(e.value);
              se.push_back(e.std_error);
            }
            return std::make_tuple(value, se);
          },
          py::arg("sequences"), py::arg("samples") = kDefaultImportanceSamples, py::arg("seed") = 0,
          "Importance-sampled NLL per sequence in model space: (value, std_error).")
      .def(
          "generate",
          [](const Checkpoint& c, const std::vector<Array>& prefixes, std::size_t horizon, std::uint64_t seed) {
            const SequenceBatch x = to_batch(prefixes);
            SequenceBatch y;
            {
              py::gil_scoped_release release;
              y = generate(c.model, x, horizon, seed);
            }
            std::vector<Array> out;
            for (std::size_t b = 0; b < y.batch(); ++b) out.push_back(to_array(y.sequence(b)));
            return out;
          },
          py::arg("prefixes"), py::arg("horizon"), py::arg("seed") = 0,
          "Continues each prefix by `horizon` steps of model output.");
}
