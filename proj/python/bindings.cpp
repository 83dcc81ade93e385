#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "valab/error.hpp"
#include "valab/faces.hpp"
#include "valab/hausdorff.hpp"
#include "valab/kernels.hpp"
#include "valab/transforms.hpp"
#include "valab/valuation.hpp"
#include "valab/version.hpp"

namespace py = pybind11;
using namespace valab;

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Polytope from_rows(const RowMat& pts) {
    std::vector<Vec> v;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) v.push_back(pts.row(i).transpose());
    return convex_hull(v);
}

RowMat vertex_rows(const Polytope& p) {
    RowMat out(static_cast<Eigen::Index>(p.vertices().size()), p.ambient_dim());
    for (std::size_t i = 0; i < p.vertices().size(); ++i) out.row(static_cast<Eigen::Index>(i)) = p.vertices()[i].transpose();
    return out;
}

std::string faces_json(const Polytope& p, int k, const std::string& method, long samples, std::uint64_t seed) {
    const Method m = parse_method(method);
    nlohmann::json rows = nlohmann::json::array();
    const std::vector<Face> faces = enumerate_faces(p, k);
    for (std::size_t i = 0; i < faces.size(); ++i) {
        const Estimate e = region_measure(exterior_angle(p, faces[i]), m, samples, derive_seed(seed, i));
        nlohmann::json row = faces[i].to_json();
        row["measure"] = e.value;
        row["measure_error"] = e.error;
        rows.push_back(row);
    }
    return rows.dump();
}

std::string probe_json(const Kernel& f, const std::string& sequence, const std::vector<int>& members,
                       const std::string& reference, const std::string& extrapolation) {
    const PolytopeSequence seq = sequence_from_json(nlohmann::json::parse(sequence));
    ProbeOptions o;
    o.members = members.empty() ? default_members(seq.family(), 64) : members;
    o.extrapolation = parse_extrapolation(extrapolation);
    if (!reference.empty()) o.reference = sequence_from_json(nlohmann::json::parse(reference));
    return continuity_probe(f, seq, o).to_json().dump();
}

} // namespace

PYBIND11_MODULE(_valab, m) {
    m.doc() = "Polytope valuations from kernels on flag spaces";
    m.attr("__version__") = kVersion;

    static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
    static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ValidationError& e) {
            py::set_error(validation, e.what());
        } catch (const NumericalError& e) {
            py::set_error(numerical, e.what());
        } catch (const nlohmann::json::exception& e) {
            py::set_error(validation, e.what());
        }
    });

    py::class_<Polytope>(m, "Polytope")
        .def_static("from_vertices", &from_rows, py::arg("points"))
        .def_static("from_json", [](const std::string& s) { return polytope_from_json(nlohmann::json::parse(s)); })
        .def_static("cube", &unit_cube, py::arg("n"))
        .def_static("simplex", &standard_simplex, py::arg("n"))
        .def_static("box", [](const std::vector<double>& sides) { return box(sides); }, py::arg("sides"))
        .def_property_readonly("vertices", &vertex_rows)
        .def_property_readonly("ambient_dim", &Polytope::ambient_dim)
        .def_property_readonly("affine_dim", &Polytope::affine_dim)
        .def_property_readonly("num_facets", [](const Polytope& p) { return p.facets().size(); })
        .def("support", &Polytope::support, py::arg("u"))
        .def("translated", &Polytope::translated, py::arg("t"))
        .def("scaled", &Polytope::scaled, py::arg("s"))
        .def("to_json", [](const Polytope& p) { return p.to_json().dump(); })
        .def("__repr__", [](const Polytope& p) {
            return "<Polytope dim " + std::to_string(p.affine_dim()) + " in R^" + std::to_string(p.ambient_dim()) + ", " +
                   std::to_string(p.vertices().size()) + " vertices>";
        });

    py::class_<Kernel>(m, "Kernel")
        .def_readonly("n", &Kernel::n)
        .def_readonly("k", &Kernel::k)
        .def_readonly("label", &Kernel::label)
        .def_property_readonly("spec", [](const Kernel& f) { return f.spec.dump(); })
        .def("__call__", [](const Kernel& f, const Mat& e, const Vec& l) { return f(e, l); }, py::arg("E"), py::arg("l"))
        .def("__repr__", [](const Kernel& f) { return "<Kernel " + f.label + ">"; });

    m.def("kernel_from_json", [](const std::string& s) { return kernel_from_json(nlohmann::json::parse(s)); });
    m.def("constant_kernel", &constant_kernel, py::arg("n"), py::arg("k"), py::arg("value") = 1.0);
    m.def("separable_kernel", [](int n, int k, std::uint64_t seed) { return separable_kernel(n, k, seed); },
          py::arg("n"), py::arg("k"), py::arg("seed"));

    m.def("phi",
          [](const Kernel& f, const Polytope& p, const std::string& method, long samples, std::uint64_t seed) {
              PhiOptions o;
              o.method = parse_method(method);
              o.samples = samples;
              o.seed = seed;
              return phi(f, p, o).to_json().dump();
          },
          py::arg("kernel"), py::arg("polytope"), py::arg("method") = "auto", py::arg("samples") = 100000,
          py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("faces", &faces_json, py::arg("polytope"), py::arg("k"), py::arg("method") = "auto",
          py::arg("samples") = 100000, py::arg("seed") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("klain_function", &klain_function, py::arg("kernel"), py::arg("E"));
    m.def("smap", [](const Kernel& f, const Mat& e) { return smap(f)(e); }, py::arg("kernel"), py::arg("E"));
    m.def("hausdorff_distance", py::overload_cast<const Polytope&, const Polytope&>(&hausdorff_distance));
    m.def("probe", &probe_json, py::arg("kernel"), py::arg("sequence"), py::arg("members") = std::vector<int>{},
          py::arg("reference") = "", py::arg("extrapolation") = "richardson", py::call_guard<py::gil_scoped_release>());
    m.def("cosine_multipliers", [](int d) { return cosine_multipliers(d).to_json().dump(); }, py::arg("max_degree") = 8,
          py::call_guard<py::gil_scoped_release>());
    m.def("range_diagnostic", [](const Kernel& f, int d) { return range_diagnostic(f, d).to_json().dump(); },
          py::arg("kernel"), py::arg("max_degree") = 8, py::call_guard<py::gil_scoped_release>());
}
