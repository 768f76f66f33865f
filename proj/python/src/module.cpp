// Python bindings. Subspaces are passed as 2-D arrays whose rows span them
// (the scenario-file layout); a complex array puts the whole system in C^d.
// Results come back as plain dicts mirroring the JSON reports.

#include "subrep/parallel.hpp"
#include "subrep/scenario.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <optional>

namespace py = pybind11;
using namespace subrep;

namespace {

NormKind norm_kind(const py::object& p) {
  if (py::isinstance<py::str>(p)) {
    if (p.cast<std::string>() == "inf") return NormKind::Linf;
  } else {
    const double v = p.cast<double>();
    if (v == 1.0) return NormKind::L1;
    if (v == 2.0) return NormKind::L2;
    if (std::isinf(v) && v > 0) return NormKind::Linf;
  }
  throw ValidationError("p must be 1, 2 or inf");
}

bool is_complex_array(const py::handle& a) {
  return py::module_::import("numpy").attr("iscomplexobj")(a).cast<bool>();
}

Matrix rows_of(const py::handle& obj, const AmbientSpace* amb) {
  py::array arr = py::module_::import("numpy").attr("atleast_2d")(obj);
  if (arr.ndim() != 2) throw ValidationError("a subspace must be given as a 2-D array of basis rows");
  if (is_complex_array(arr)) {
    const auto z = arr.cast<Eigen::MatrixXcd>();
    Matrix out(z.rows(), 2 * z.cols());
    for (Eigen::Index r = 0; r < z.rows(); ++r) out.row(r) = realify(z.row(r).transpose()).transpose();
    return out;
  }
  Matrix m = arr.cast<Matrix>();
  if (amb && amb->is_complex()) {
    Matrix out = Matrix::Zero(m.rows(), 2 * m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.col(2 * c) = m.col(c);
    return out;
  }
  return m;
}

SubspaceSystem make_system(const py::list& subspaces, const py::object& p, bool cyclic) {
  if (subspaces.empty()) throw ValidationError("need at least one subspace");
  bool cplx = false;
  Eigen::Index dim = -1;
  for (const auto& s : subspaces) {
    cplx = cplx || is_complex_array(s);
    py::array arr = py::module_::import("numpy").attr("atleast_2d")(s);
    const Eigen::Index d = arr.ndim() == 2 ? arr.shape(1) : -1;
    if (dim >= 0 && d != dim) throw ValidationError("subspaces disagree on the ambient dimension");
    dim = d;
  }
  if (dim < 1) throw ValidationError("empty ambient dimension");
  const AmbientSpace amb(static_cast<int>(dim), cplx ? Field::Complex : Field::Real, norm_kind(p));
  std::vector<Subspace> members;
  for (const auto& s : subspaces) {
    const Matrix rows = rows_of(s, &amb);
    std::vector<Vector> vs;
    for (Eigen::Index r = 0; r < rows.rows(); ++r) vs.push_back(rows.row(r).transpose());
    members.push_back(orthonormalize(std::span<const Vector>(vs), amb));
  }
  return SubspaceSystem(amb, std::move(members), cyclic);
}

Vector make_vector(const py::object& x, const AmbientSpace& amb) {
  const Matrix m = rows_of(x, &amb);
  if (m.rows() != 1) throw ValidationError("x must be a 1-D array");
  Vector v = m.row(0).transpose();
  amb.check_vector(v, "x");
  return v;
}

// JSON report -> Python objects; the "inf"/"nan" strings turn back into floats.
py::object to_py(const io::json& j) {
  switch (j.type()) {
  case io::json::value_t::null:
    return py::none();
  case io::json::value_t::boolean:
    return py::bool_(j.get<bool>());
  case io::json::value_t::number_integer:
    return py::int_(j.get<std::int64_t>());
  case io::json::value_t::number_unsigned:
    return py::int_(j.get<std::uint64_t>());
  case io::json::value_t::number_float:
    return py::float_(j.get<double>());
  case io::json::value_t::string: {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return py::float_(std::numeric_limits<double>::infinity());
    if (s == "-inf") return py::float_(-std::numeric_limits<double>::infinity());
    if (s == "nan") return py::float_(std::numeric_limits<double>::quiet_NaN());
    return py::str(s);
  }
  case io::json::value_t::array: {
    py::list out;
    for (const auto& e : j) out.append(to_py(e));
    return out;
  }
  default: {
    py::dict out;
    for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
    return out;
  }
  }
}

template <class Fn>
py::object released(Fn&& fn) {
  io::json j;
  {
    py::gil_scoped_release nogil;
    j = fn();
  }
  return to_py(j);
}

SearchOptions search_opts(std::uint64_t seed) {
  SearchOptions o;
  o.seed = seed;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Systems of subspaces: decompositions, margins, theta quantities, C-constants";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<BudgetError>(m, "BudgetError", base.ptr());

  m.def("set_threads", &set_default_threads, py::arg("threads"),
        "Default worker count for searches (0 restores SUBREP_THREADS / 1).");

  m.def(
      "greedy",
      [](py::list subspaces, py::object x, py::object p, bool cyclic, int max_terms, double stop_tol) {
        const auto S = make_system(subspaces, p, cyclic);
        const Vector v = make_vector(x, S.ambient());
        return released([&] { return io::to_json(greedy_decompose(S, v, max_terms, stop_tol)); });
      },
      py::arg("subspaces"), py::arg("x"), py::arg("p") = 2, py::arg("cyclic") = false, py::arg("max_terms") = 100,
      py::arg("stop_tol") = 1e-9, "Greedy decomposition of x; raises NumericError when it stagnates.");

  m.def(
      "alternating",
      [](py::list subspaces, py::object x, int steps, py::object p, bool cyclic) {
        const auto S = make_system(subspaces, p, cyclic);
        const Vector v = make_vector(x, S.ambient());
        return released([&] { return io::to_json(alternating_decompose(S, v, steps)); });
      },
      py::arg("subspaces"), py::arg("x"), py::arg("steps") = 20, py::arg("p") = 2, py::arg("cyclic") = false);

  auto margin = [&m](const char* name, MarginReport (*fn)(const SubspaceSystem&, const SearchOptions&),
                     const char* doc) {
    m.def(
        name,
        [fn](py::list subspaces, py::object p, bool cyclic, std::uint64_t seed) {
          const auto S = make_system(subspaces, p, cyclic);
          return released([&] { return io::to_json(fn(S, search_opts(seed))); });
        },
        py::arg("subspaces"), py::arg("p") = 2, py::arg("cyclic") = false, py::arg("seed") = SearchOptions{}.seed, doc);
  };
  margin("psr_margin", &psr_margin, "Representation margin (min over unit functionals and block splits).");
  margin("apss_margin", &apss_margin, "Absolute representation margin.");
  margin("lambda_S", &lambda_S, "max over unit x of the distance to the nearest member.");

  m.def(
      "theta_x_eps",
      [](py::list subspaces, py::object x, double eps, std::optional<int> n, py::object p, bool cyclic) {
        const auto S = make_system(subspaces, p, cyclic);
        const Vector v = make_vector(x, S.ambient());
        const int len = n.value_or(theta_horizon(S));
        return released([&] { return io::to_json(theta_x_eps(S, v, eps, len)); });
      },
      py::arg("subspaces"), py::arg("x"), py::arg("eps"), py::arg("n") = py::none(), py::arg("p") = 2,
      py::arg("cyclic") = false, "Smallest partial-sum bound of a tuple whose sum is eps-close to x.");

  m.def(
      "theta_star",
      [](py::list subspaces, py::object x, py::object p, bool cyclic) {
        const auto S = make_system(subspaces, p, cyclic);
        const Vector v = make_vector(x, S.ambient());
        return released([&] { return io::to_json(theta_star(S, v)); });
      },
      py::arg("subspaces"), py::arg("x"), py::arg("p") = 2, py::arg("cyclic") = false);

  m.def(
      "theta_bar",
      [](py::list subspaces, py::object p, bool cyclic) {
        const auto S = make_system(subspaces, p, cyclic);
        return released([&] { return io::to_json(theta_bar(S)); });
      },
      py::arg("subspaces"), py::arg("p") = 2, py::arg("cyclic") = false);

  m.def(
      "c_constant",
      [](int dim, int n, py::object p, std::string field, bool complex_phases, int starts, std::uint64_t seed) {
        if (field != "real" && field != "complex") throw ValidationError("field must be 'real' or 'complex'");
        const AmbientSpace amb(dim, field == "complex" ? Field::Complex : Field::Real, norm_kind(p));
        CConvOptions o;
        o.starts = starts;
        o.seed = seed;
        return released([&] {
          return io::to_json(complex_phases ? c_constant_complex(amb, n, o) : c_constant(amb, n, o));
        });
      },
      py::arg("dim"), py::arg("n"), py::arg("p") = 2, py::arg("field") = "real", py::arg("complex_phases") = false,
      py::arg("starts") = CConvOptions{}.starts, py::arg("seed") = CConvOptions{}.seed,
      "Lower estimate of the n-th C-constant of the space (max sign sum over unit vectors).");

  m.def(
      "_run_scenario_text",
      [](const std::string& text, std::optional<std::uint64_t> seed, std::optional<double> tol) {
        ScenarioOverrides over;
        over.seed = seed;
        over.tol = tol;
        io::json doc;
        try {
          doc = io::json::parse(text);
        } catch (const io::json::parse_error& e) {
          throw ValidationError(std::string("scenario is not valid JSON: ") + e.what());
        }
        const Scenario sc = parse_scenario(doc, over);
        RunOutcome out;
        {
          py::gil_scoped_release nogil;
          out = run_scenario(sc);
        }
        return py::make_tuple(out.exit_code, report_text(out.report), out.csv);
      },
      py::arg("text"), py::arg("seed") = py::none(), py::arg("tol") = py::none());

  m.def(
      "_run_scenario_file",
      [](const std::string& path, std::optional<std::uint64_t> seed, std::optional<double> tol) {
        ScenarioOverrides over;
        over.seed = seed;
        over.tol = tol;
        RunOutcome out;
        {
          py::gil_scoped_release nogil;
          out = run_scenario_file(path, over);
        }
        return py::make_tuple(out.exit_code, report_text(out.report), out.csv);
      },
      py::arg("path"), py::arg("seed") = py::none(), py::arg("tol") = py::none());

  m.def("scenario_schema", [] { return to_py(scenario_schema()); });
  m.def("task_names", &task_names);
  m.attr("SCHEMA_VERSION") = io::kSchemaVersion;
}
