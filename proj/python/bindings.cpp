#include "spinorsurf/mnv.hpp"
#include "spinorsurf/moebius.hpp"
#include "spinorsurf/pipelines.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace spinorsurf;

namespace {

py::object to_py(const nlohmann::json &j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_py(const py::object &o)
{
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Scenario scenario_of(const py::object &o)
{
    if (py::isinstance<py::str>(o))
        return builtin_scenario(o.cast<std::string>());
    return parse_scenario(from_py(o));
}

template <class T> using Array = py::array_t<T, py::array::c_style | py::array::forcecast>;

void expect_shape(const py::buffer_info &b, std::vector<py::ssize_t> shape, const char *what)
{
    if (b.shape != shape)
        throw py::value_error(std::string(what) + " has the wrong shape");
}

ScalarField scalar_in(const Grid2D &g, const Array<double> &a)
{
    const auto b = a.request();
    expect_shape(b, {g.ny(), g.nx()}, "scalar field");
    ScalarField f(g);
    const double *p = static_cast<const double *>(b.ptr);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            f(i, j) = p[j * g.nx() + i];
    return f;
}

SpinorField spinor_in(const Grid2D &g, const Array<cplx> &a)
{
    const auto b = a.request();
    expect_shape(b, {g.ny(), g.nx(), 2}, "spinor field");
    SpinorField f(g);
    const cplx *p = static_cast<const cplx *>(b.ptr);
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            f(i, j) = {p[2 * (j * g.nx() + i)], p[2 * (j * g.nx() + i) + 1]};
    return f;
}

template <class T> Array<T> out_array(const Grid2D &g, int comps)
{
    if (comps == 1)
        return Array<T>({g.ny(), g.nx()});
    return Array<T>({py::ssize_t(g.ny()), py::ssize_t(g.nx()), py::ssize_t(comps)});
}

Array<double> scalar_out(const ScalarField &f)
{
    const Grid2D &g = f.grid();
    auto a = out_array<double>(g, 1);
    auto m = a.mutable_unchecked<2>();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            m(j, i) = f(i, j);
    return a;
}

Array<cplx> complex_out(const ComplexField &f)
{
    const Grid2D &g = f.grid();
    auto a = out_array<cplx>(g, 1);
    auto m = a.mutable_unchecked<2>();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            m(j, i) = f(i, j);
    return a;
}

Array<cplx> spinor_out(const SpinorField &f)
{
    const Grid2D &g = f.grid();
    auto a = out_array<cplx>(g, 2);
    auto m = a.mutable_unchecked<3>();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            m(j, i, 0) = f(i, j).s1;
            m(j, i, 1) = f(i, j).s2;
        }
    return a;
}

Array<double> vec3_out(const Vec3Field &f)
{
    const Grid2D &g = f.grid();
    auto a = out_array<double>(g, 3);
    auto m = a.mutable_unchecked<3>();
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            for (int c = 0; c < 3; ++c)
                m(j, i, c) = f(i, j)[c];
    return a;
}

Grid2D grid_of(const std::pair<double, double> &xr, const std::pair<double, double> &yr, int nx, int ny,
               bool periodic)
{
    if (periodic)
        return Grid2D::periodic(xr.second - xr.first, yr.second - yr.first, nx, ny, cplx(xr.first, yr.first));
    return Grid2D::box(xr.first, xr.second, yr.first, yr.second, nx, ny);
}

Vec3 vec3_in(const std::array<double, 3> &v) { return {v[0], v[1], v[2]}; }

} // namespace

PYBIND11_MODULE(_spinorsurf, m)
{
    m.doc() = "spinor representation of surfaces: Weierstrass, inversion, Moutard and mNV numerics";

    auto base = py::register_exception<std::runtime_error>(m, "SpinorsurfError");
    py::register_exception<ConfigParseError>(m, "ConfigParseError", base);
    py::register_exception<ValidationError>(m, "ValidationError", base);
    py::register_exception<SingularityError>(m, "SingularityError", base);
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<ConformalityError>(m, "ConformalityError", base);
    py::register_exception<ConstraintError>(m, "ConstraintError", base);
    py::register_exception<InstabilityError>(m, "InstabilityError", base);
    py::register_exception<UnsupportedGridError>(m, "UnsupportedGridError", base);
    py::register_exception<NotFloquetError>(m, "NotFloquetError", base);
    py::register_exception<IncompatibilityError>(m, "IncompatibilityError", base);

    m.def("pipeline_names", &pipeline_names);
    m.def("builtin_scenarios", [] { return to_py(list_scenarios_json()); });
    m.def("parse_scenario", [](const py::object &o) { return to_py(scenario_of(o).to_json()); },
          py::arg("scenario"));
    m.def("load_scenario", [](const std::string &path) { return to_py(load_scenario(path).to_json()); },
          py::arg("path"));

    m.def(
        "run_pipeline",
        [](const std::string &command, const py::object &scenario, int refine, std::optional<std::string> out,
           std::optional<double> tolerance_scale) {
            RunOptions opt;
            opt.refine = refine;
            opt.tolerance_scale = tolerance_scale;
            opt.write_artifacts = out.has_value();
            if (out)
                opt.out = *out;
            const Scenario sc = scenario_of(scenario);
            Report r;
            {
                py::gil_scoped_release nogil;
                r = run_pipeline(command, sc, opt);
            }
            return to_py(r.to_json());
        },
        py::arg("command"), py::arg("scenario"), py::arg("refine") = 1, py::arg("out") = py::none(),
        py::arg("tolerance_scale") = py::none());

    m.def(
        "realize",
        [](const py::object &scenario) {
            const Realization R = realize(scenario_of(scenario));
            const Grid2D &g = R.grid;
            Array<double> x(g.nx()), y(g.ny());
            for (int i = 0; i < g.nx(); ++i)
                x.mutable_at(i) = g.x(i);
            for (int j = 0; j < g.ny(); ++j)
                y.mutable_at(j) = g.y(j);
            py::dict d;
            d["x"] = x;
            d["y"] = y;
            d["psi"] = spinor_out(R.psi);
            d["U"] = scalar_out(R.U);
            d["base"] = std::make_pair(R.base.i, R.base.j);
            d["x0"] = std::array<double, 3>{R.x0[0], R.x0[1], R.x0[2]};
            d["periodic"] = std::make_pair(g.periodic_x(), g.periodic_y());
            return d;
        },
        py::arg("scenario"));

    m.def(
        "weierstrass_surface",
        [](const Array<cplx> &psi, std::pair<double, double> x_range, std::pair<double, double> y_range,
           std::pair<int, int> base, std::array<double, 3> x0, bool periodic) {
            const auto b = psi.request();
            if (b.ndim != 3)
                throw py::value_error("psi must have shape (ny, nx, 2)");
            const Grid2D g = grid_of(x_range, y_range, int(b.shape[1]), int(b.shape[0]), periodic);
            const SurfaceFrame f = integrate_surface(spinor_in(g, psi), {base.first, base.second}, vec3_in(x0),
                                                     PathOrder::XThenY,
                                                     periodic ? Scheme::Spectral : Scheme::FiniteDifference);
            py::dict d;
            d["r"] = vec3_out(f.r);
            d["n"] = vec3_out(f.n);
            d["e_alpha"] = scalar_out(f.e_alpha);
            return d;
        },
        py::arg("psi"), py::arg("x_range"), py::arg("y_range"), py::arg("base"),
        py::arg("x0") = std::array<double, 3>{0, 0, 0}, py::arg("periodic") = false);

    m.def("invert_point", [](std::array<double, 3> x) {
        const Vec3 v = invert_point(vec3_in(x));
        return std::array<double, 3>{v[0], v[1], v[2]};
    });

    m.def(
        "solve_v",
        [](const Array<double> &U, double lx, double ly) {
            const auto b = U.request();
            if (b.ndim != 2)
                throw py::value_error("U must have shape (ny, nx)");
            const Grid2D g = Grid2D::periodic(lx, ly, int(b.shape[1]), int(b.shape[0]));
            return complex_out(solve_v(scalar_in(g, U)));
        },
        py::arg("U"), py::arg("lx"), py::arg("ly"));

    m.def(
        "mnv_rhs",
        [](const Array<double> &U, double lx, double ly) {
            const auto b = U.request();
            if (b.ndim != 2)
                throw py::value_error("U must have shape (ny, nx)");
            const Grid2D g = Grid2D::periodic(lx, ly, int(b.shape[1]), int(b.shape[0]));
            return scalar_out(mnv_rhs(make_state(scalar_in(g, U))));
        },
        py::arg("U"), py::arg("lx"), py::arg("ly"));
}
