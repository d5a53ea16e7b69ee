#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fpprep/addition.hpp"
#include "fpprep/compressors.hpp"
#include "fpprep/error.hpp"
#include "fpprep/fp_core.hpp"
#include "fpprep/multiplication.hpp"
#include "fpprep/pipeline.hpp"

namespace py = pybind11;
using namespace fpprep;

namespace {

py::bytes to_py(const Bytes& b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

Bytes from_py(const py::bytes& b) {
  const std::string s = b;
  return Bytes(s.begin(), s.end());
}

PipelineConfig make_config(const ErrorBound& bound, const std::string& transform,
                           const std::string& fallback, const std::vector<std::string>& compressors) {
  PipelineConfig c;
  c.bound = bound;
  c.transform = transform_kind_from_string(transform);
  c.fallback = fallback_from_string(fallback);
  for (const auto& d : compressors) c.compressors.push_back(Backend::parse(d));
  if (c.compressors.empty()) c.compressors.push_back(Backend::builtin());
  return c;
}

std::vector<ColumnSeries> ingest_text(const std::string& csv, const std::vector<std::string>& columns) {
  std::istringstream in(csv);
  return ingest(in, {columns, std::nullopt});
}

}  // namespace

PYBIND11_MODULE(_fpprep, m) {
  m.doc() = "Error-bounded binary32 preprocessing for better compression";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = to_string(e.code());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<ErrorBound>(m, "ErrorBound")
      .def_static("absolute", &ErrorBound::absolute)
      .def_static("relative", &ErrorBound::relative)
      .def_static("unbounded", &ErrorBound::unbounded)
      .def_property_readonly("kind", [](const ErrorBound& b) { return std::string(to_string(b.kind)); })
      .def_readonly("limit", &ErrorBound::limit)
      .def("admits", &ErrorBound::admits)
      .def("__repr__", [](const ErrorBound& b) {
        return "ErrorBound." + std::string(to_string(b.kind)) + "(" + std::to_string(b.limit) + ")";
      });

  py::class_<FloatAnatomy>(m, "FloatAnatomy")
      .def(py::init([](std::uint32_t s, std::uint32_t e, std::uint32_t mant) { return FloatAnatomy{s, e, mant}; }),
           py::arg("sign"), py::arg("biased_exponent"), py::arg("mantissa"))
      .def_readonly("sign", &FloatAnatomy::sign)
      .def_readonly("biased_exponent", &FloatAnatomy::biased_exponent)
      .def_readonly("mantissa", &FloatAnatomy::mantissa)
      .def_property_readonly("unbiased_exponent", &FloatAnatomy::unbiased_exponent)
      .def("__eq__", [](const FloatAnatomy& a, const FloatAnatomy& b) { return a == b; });

  m.def("to_bits", &to_bits);
  m.def("from_bits", &from_bits);
  m.def("decompose", &decompose);
  m.def("compose", &compose);
  m.def("precision", &precision);
  m.def("trailing_zero_count", &trailing_zero_count);
  m.def("step_by_ulp", &step_by_ulp);

  py::class_<AdditionPlan>(m, "AdditionPlan")
      .def_readonly("a", &AdditionPlan::a)
      .def_readonly("target_e_u", &AdditionPlan::target_e_u)
      .def_readonly("predicted_bound", &AdditionPlan::predicted_bound);
  m.def("select_addition_parameter", [](const std::vector<float>& x, const ErrorBound& b) {
    return select_addition_parameter(x, b);
  });
  m.def("addition_plan_for_exponent", [](const std::vector<float>& x, int e_u) {
    return addition_plan_for_exponent(x, e_u);
  });
  m.def("apply_addition", [](const std::vector<float>& x, const AdditionPlan& p) { return apply_addition(x, p); });
  m.def("invert_addition", [](const std::vector<float>& y, const AdditionPlan& p) { return invert_addition(y, p); });

  py::class_<Pattern>(m, "Pattern")
      .def_readonly("m", &Pattern::m)
      .def_readonly("length", &Pattern::length)
      .def_readonly("block", &Pattern::block)
      .def_readonly("canonical", &Pattern::canonical)
      .def("block_bits", &Pattern::block_bits)
      .def("canonical_hex", &Pattern::canonical_hex);
  m.def("pattern_for", &pattern_for);
  m.def("verify_pattern", [](int mult, const std::string& p) { return verify_pattern(mult, p); });

  py::class_<Substitution>(m, "Substitution")
      .def_readonly("original", &Substitution::original)
      .def_readonly("substituted", &Substitution::substituted)
      .def_readonly("product", &Substitution::product)
      .def_readonly("trailing_zeros", &Substitution::trailing_zeros)
      .def_readonly("abs_error", &Substitution::abs_error)
      .def_readonly("rel_error", &Substitution::rel_error)
      .def_readonly("bit_distance", &Substitution::bit_distance);
  m.def("enumerate_substitutions", &enumerate_substitutions);
  m.def("multiply_and_check", &multiply_and_check);

  py::class_<MultiplicationPlan>(m, "MultiplicationPlan")
      .def_readonly("m", &MultiplicationPlan::m)
      .def_readonly("min_common_zeros", &MultiplicationPlan::min_common_zeros)
      .def_readonly("per_sample", &MultiplicationPlan::per_sample);
  m.def("select_multiplication_parameter", [](const std::vector<float>& x, const ErrorBound& b) {
    return select_multiplication_parameter(x, b);
  });
  m.def("multiplication_plan_for", [](const std::vector<float>& x, int mult, const ErrorBound& b) {
    return multiplication_plan_for(x, mult, b);
  });
  m.def("apply_multiplication",
        [](const std::vector<float>& x, const MultiplicationPlan& p) { return apply_multiplication(x, p); });
  m.def("invert_multiplication",
        [](const std::vector<float>& y, int mult) { return invert_multiplication(y, mult); });

  m.def("choose_base_bits", [](const std::vector<std::uint32_t>& w) { return choose_base_bits(w); });
  m.def("gd_compress", [](const std::vector<std::uint32_t>& w, int base_bits) {
    return to_py(gd_compress(w, base_bits));
  });
  m.def("gd_decompress", [](const py::bytes& blob) { return gd_decompress(from_py(blob)); });

  m.def(
      "transform_csv",
      [](const std::string& csv, const ErrorBound& bound, const std::string& transform,
         const std::string& fallback, const std::vector<std::string>& columns) {
        const auto config = make_config(bound, transform, fallback, {});
        py::list out;
        for (const auto& s : ingest_text(csv, columns)) {
          const auto t = transform_column(s, config);
          py::dict d;
          d["column"] = t.record.column;
          d["kind"] = to_string(t.record.kind);
          d["transformed"] = t.transformed;
          d["recovered"] = t.recovered;
          d["max_abs"] = t.record.max_abs;
          d["max_rel"] = t.record.max_rel;
          d["warnings"] = t.warnings;
          out.append(d);
        }
        return out;
      },
      py::arg("csv"), py::arg("bound"), py::arg("transform") = "auto", py::arg("fallback") = "fail",
      py::arg("columns") = std::vector<std::string>{});

  m.def(
      "bench_csv",
      [](const std::string& csv, const ErrorBound& bound, const std::string& transform,
         const std::string& fallback, const std::vector<std::string>& compressors,
         const std::vector<std::string>& columns) {
        const auto config = make_config(bound, transform, fallback, compressors);
        return report_to_json(run_pipeline(ingest_text(csv, columns), config), config);
      },
      py::arg("csv"), py::arg("bound"), py::arg("transform") = "auto", py::arg("fallback") = "fail",
      py::arg("compressors") = std::vector<std::string>{}, py::arg("columns") = std::vector<std::string>{},
      "Runs the full pipeline and returns the report as JSON text.");
}
