#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ide/desingularization.hpp"
#include "ide/elastic_sphere.hpp"
#include "ide/solver.hpp"
#include "ide/stratification.hpp"

namespace py = pybind11;
using namespace ide;

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

py::dict trajectory_to_dict(const Trajectory& traj) {
    py::dict out;
    out["variables"] = traj.variables;
    py::list segments;
    for (const auto& seg : traj.segments) {
        py::dict d;
        d["system_id"] = seg.system_id;
        d["termination"] = to_string(seg.termination);
        d["times"] = seg.times;
        py::list states, derivs, residuals, constraint_norms;
        for (std::size_t i = 0; i < seg.size(); ++i) {
            states.append(to_std(seg.states[i]));
            derivs.append(to_std(seg.derivs[i]));
            residuals.append(seg.diagnostics[i].residual);
            constraint_norms.append(seg.diagnostics[i].constraint_norm);
        }
        d["states"] = states;
        d["derivs"] = derivs;
        d["residuals"] = residuals;
        d["constraint_norms"] = constraint_norms;
        segments.append(d);
    }
    out["segments"] = segments;
    return out;
}

IntegrationOptions make_options(double t0, double t1, double step,
                                const std::optional<std::string>& constraints_json,
                                double rank_tol) {
    IntegrationOptions opts;
    opts.t0 = t0;
    opts.t1 = t1;
    opts.step = step;
    opts.rank_tol = rank_tol;
    if (constraints_json) opts.projection_constraints = constraints_from_json_string(*constraints_json);
    return opts;
}

}  // namespace

PYBIND11_MODULE(_idekit, m) {
    m.doc() = "implicit differential equations: stratification, lifts and constant-rank solving";

    py::register_exception<IdeError>(m, "IdeError");
    py::register_exception<NoSolutionAtPoint>(m, "NoSolutionAtPointError");

    py::class_<Polynomial>(m, "Polynomial")
        .def_static("parse", &parse_polynomial, py::arg("text"), py::arg("variables"))
        .def("__str__", &Polynomial::to_string)
        .def("__eq__", [](const Polynomial& a, const Polynomial& b) { return a == b; })
        .def("evaluate",
             [](const Polynomial& p, const std::vector<double>& x) { return p.evaluate(x); })
        .def("differentiate", &Polynomial::differentiate)
        .def_property_readonly("variables", &Polynomial::variables)
        .def_property_readonly("total_degree", &Polynomial::total_degree);

    py::class_<IdeSystem>(m, "IdeSystem")
        .def_property_readonly("name", [](const IdeSystem& s) { return s.name; })
        .def_property_readonly("variables", [](const IdeSystem& s) { return s.variables; })
        .def_property_readonly("n", &IdeSystem::n)
        .def_property_readonly("m", &IdeSystem::m)
        .def("residual",
             [](const IdeSystem& s, const std::vector<double>& x, const std::vector<double>& v) {
                 Eigen::VectorXd vv = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
                 return to_std(s.residual(x, vv));
             })
        .def("to_json", &model_to_json_string)
        .def("__repr__", [](const IdeSystem& s) {
            return "<IdeSystem '" + s.name + "' " + std::to_string(s.m()) + "x" +
                   std::to_string(s.n()) + ">";
        });

    m.def("load_model", &load_model, py::arg("path"));
    m.def("model_from_json", &model_from_json_string, py::arg("text"));
    m.def("homogenize", &homogenize);

    m.def(
        "stratify",
        [](const IdeSystem& s, std::uint64_t seed, int budget) {
            SamplingOptions opts;
            opts.seed = seed;
            opts.budget = budget;
            return decompose_domain(s, opts).to_json_string();
        },
        py::arg("system"), py::arg("seed") = 2024, py::arg("budget") = 10000,
        "JSON stratification report");

    m.def(
        "classify",
        [](const IdeSystem& s, const std::vector<double>& x, double tol) {
            auto label = classify_point(s, x, tol);
            return py::make_tuple(to_string(label.stratum), label.rank_a, label.rank_af);
        },
        py::arg("system"), py::arg("point"), py::arg("tol") = 1e-8);

    m.def(
        "integrate",
        [](const IdeSystem& s, const std::vector<double>& x0, double t0, double t1, double step,
           const std::optional<std::string>& constraints_json, double rank_tol) {
            auto opts = make_options(t0, t1, step, constraints_json, rank_tol);
            return trajectory_to_dict(integrate(s, x0, opts));
        },
        py::arg("system"), py::arg("x0"), py::arg("t0") = 0.0, py::arg("t1") = 1.0,
        py::arg("step") = 1e-3, py::arg("constraints_json") = std::nullopt,
        py::arg("rank_tol") = 1e-8);

    m.def(
        "integrate_homogeneous",
        [](const IdeSystem& s, const std::vector<double>& x0, double t0, double arc_length,
           double step, int orientation) {
            IntegrationOptions opts;
            opts.t0 = 0.0;
            opts.t1 = arc_length;
            opts.step = step;
            opts.orientation = orientation;
            return trajectory_to_dict(integrate_homogeneous(s, x0, t0, opts));
        },
        py::arg("system"), py::arg("x0"), py::arg("t0") = 0.0, py::arg("arc_length") = 1.0,
        py::arg("step") = 1e-3, py::arg("orientation") = 1);

    m.def(
        "lift",
        [](const IdeSystem& s, const std::string& map_json,
           const std::optional<std::string>& constraints_json) {
            std::optional<ConstraintSet> constraints;
            if (constraints_json) constraints = constraints_from_json_string(*constraints_json);
            auto lifted = lift_system(
                s, DesingMap::from_map(map_from_json_string(map_json), std::move(constraints)));
            return lifted.system;
        },
        py::arg("system"), py::arg("map_json"), py::arg("constraints_json") = std::nullopt);

    auto sph = m.def_submodule("sphere", "the symmetric elastic sphere example");
    sph.def(
        "params",
        [](const std::string& alpha, const std::string& beta, const std::string& epsilon) {
            return sphere::SphereParams::make(parse_rational(alpha), parse_rational(beta),
                                              parse_rational(epsilon));
        },
        py::arg("alpha") = "2", py::arg("beta") = "1", py::arg("epsilon") = "1");
    py::class_<sphere::SphereParams>(sph, "SphereParams")
        .def_property_readonly("mu", [](const sphere::SphereParams& p) { return p.mu_d(); })
        .def_property_readonly("lambda_",
                               [](const sphere::SphereParams& p) { return p.lambda_d(); })
        .def_property_readonly("b", &sphere::SphereParams::b);

    sph.def("full_system", &sphere::build_full_system);
    sph.def("extended_lifted_system", &sphere::build_extended_lifted_system);
    sph.def("lifted_system",
            [](const sphere::SphereParams& p) { return sphere::build_lifted_system(p).system; });
    sph.def("manifold_constraints_json", [](const sphere::SphereParams& p) {
        return constraints_to_json_string(sphere::manifold_constraints(p));
    });
    sph.def(
        "chart_embed",
        [](double theta, double phi, double psi, const sphere::SphereParams& p) {
            return to_std(sphere::chart_embed({theta, phi, psi}, p).as_vector());
        },
        py::arg("theta"), py::arg("phi"), py::arg("psi"), py::arg("params"));
    sph.def(
        "reduced_rhs",
        [](double theta, double phi, double psi, const sphere::SphereParams& p) {
            Eigen::Vector3d v = sphere::reduced_rhs({theta, phi, psi}, p);
            return std::vector<double>{v[0], v[1], v[2]};
        },
        py::arg("theta"), py::arg("phi"), py::arg("psi"), py::arg("params"));
    sph.def(
        "planar_rhs",
        [](double theta, double w, const sphere::SphereParams& p) {
            Eigen::Vector2d v = sphere::planar_rhs(theta, w, p);
            return std::vector<double>{v[0], v[1]};
        },
        py::arg("theta"), py::arg("w"), py::arg("params"));
    sph.def("first_integral", &sphere::first_integral, py::arg("theta"), py::arg("w"));
    sph.def(
        "verify_manifold_rank",
        [](const sphere::SphereParams& p, int n, std::uint64_t seed, double tol) {
            return sphere::verify_manifold_rank(p, n, seed, tol).to_json_string();
        },
        py::arg("params"), py::arg("n") = 1000, py::arg("seed") = 7, py::arg("tol") = 1e-8);
    sph.def(
        "verify_chart_rank",
        [](const sphere::SphereParams& p, int n, std::uint64_t seed, double tol) {
            return sphere::verify_chart_rank(p, n, seed, tol).to_json_string();
        },
        py::arg("params"), py::arg("n") = 1000, py::arg("seed") = 7, py::arg("tol") = 1e-8);
}
