#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "beckner/bochner.hpp"
#include "beckner/chain.hpp"
#include "beckner/config.hpp"
#include "beckner/constants.hpp"
#include "beckner/dynamics.hpp"
#include "beckner/entropy.hpp"
#include "beckner/errors.hpp"
#include "beckner/fokker_planck.hpp"
#include "beckner/models.hpp"

namespace py = pybind11;
using namespace beckner;

namespace {

/// A built chain together with the spec it came from and its R-function.
struct Model {
    explicit Model(const std::string &json_text)
        : spec(model_from_json(nlohmann::json::parse(json_text))), chain(build_chain(spec)),
          bochner(r_function(spec, chain)) {}

    ModelSpec spec;
    FiniteChain chain;
    BochnerStructure bochner;
};

ConvexEntropy entropy_for(double alpha) {
    return alpha == 1.0 ? ConvexEntropy::log() : ConvexEntropy::power(alpha);
}

py::dict trajectory_dict(const Trajectory &t) {
    py::dict d;
    d["times"] = t.times;
    d["entropy"] = t.entropy_values;
    d["dirichlet"] = t.dirichlet_values;
    std::vector<double> rates;
    for (std::size_t k = 0; k < t.times.size(); ++k)
        rates.push_back(t.instantaneous_rate(k));
    d["inst_rate"] = rates;
    return d;
}

py::dict estimate_dict(const ConstantEstimate &e) {
    py::dict d;
    d["kind"] = to_string(e.kind);
    d["value"] = e.value;
    d["minimizer"] = e.minimizer;
    d["method"] = to_string(e.method);
    d["iterations"] = e.iterations;
    d["converged_starts"] = e.converged_starts;
    d["starts"] = e.starts;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete Bochner identities, Beckner inequalities and entropy decay";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<HypothesisError>(m, "HypothesisError", PyExc_ValueError);
    py::register_exception<DegenerateInputError>(m, "DegenerateInputError", PyExc_ValueError);
    py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<ConvexEntropy>(m, "ConvexEntropy")
        .def_static("log", &ConvexEntropy::log)
        .def_static("quadratic", &ConvexEntropy::quadratic)
        .def_static("power", &ConvexEntropy::power, py::arg("alpha"))
        .def_property_readonly("name", &ConvexEntropy::name)
        .def_property_readonly("alpha", &ConvexEntropy::alpha)
        .def("phi", &ConvexEntropy::phi)
        .def("d1", &ConvexEntropy::d1)
        .def("d2", &ConvexEntropy::d2);

    m.def(
        "theta",
        [](double alpha, double s, double t) { return MeanFunction(entropy_for(alpha))(s, t); },
        py::arg("alpha"), py::arg("s"), py::arg("t"));
    m.def(
        "big_theta",
        [](double alpha, double A, double B) { return big_theta(entropy_for(alpha), A, B).value; },
        py::arg("alpha"), py::arg("A"), py::arg("B"));
    m.def(
        "theta_surface_csv",
        [](double alpha, const std::vector<double> &grid) {
            return theta_surface_csv(theta_surface(alpha, grid, grid));
        },
        py::arg("alpha"), py::arg("grid"));
    m.def("erf", &beckner::erf, py::arg("s"));
    m.def("fv_phi", &fv_phi, py::arg("u"));
    m.def("lambda_h", &lambda_h, py::arg("h"), py::arg("lambda_conv"));

    py::class_<Model>(m, "Model")
        .def(py::init<const std::string &>(), py::arg("json_text"))
        .def_property_readonly("name", [](const Model &md) { return model_name(md.spec); })
        .def_property_readonly("size", [](const Model &md) { return md.chain.size(); })
        .def_property_readonly("num_moves", [](const Model &md) { return md.chain.num_moves(); })
        .def_property_readonly("pi", [](const Model &md) { return Vector(md.chain.pi()); })
        .def_property_readonly("rates", [](const Model &md) { return Matrix(md.chain.rates()); })
        .def("key", [](const Model &md, std::size_t i) { return md.chain.key(i); })
        .def("generator", [](const Model &md) { return dense_generator(md.chain); })
        .def("apply", [](const Model &md, const Vector &f) { return generator_apply(md.chain, f); })
        .def("dirichlet_form",
             [](const Model &md, const Vector &f, const Vector &g) {
                 return dirichlet_form(md.chain, f, g);
             })
        .def("entropy",
             [](const Model &md, double alpha, const Vector &rho) {
                 return entropy(md.chain, entropy_for(alpha), rho);
             })
        .def("spectral_gap", [](const Model &md) { return spectral_gap(md.chain); })
        .def("paper_lambda",
             [](const Model &md, double alpha) { return paper_lambda(md.spec, alpha).value; })
        .def("random_density",
             [](const Model &md, std::uint64_t seed, double amplitude) {
                 auto rng = make_rng(seed, "python/density");
                 return random_density(md.chain, rng, amplitude);
             },
             py::arg("seed"), py::arg("amplitude") = 1.0)
        .def("ineq_ratio",
             [](const Model &md, double alpha, const Vector &rho) {
                 return ineq_ratio(md.chain, md.bochner, entropy_for(alpha), rho);
             })
        .def("proposition_sides",
             [](const Model &md, double alpha, const Vector &rho) {
                 const auto s = proposition_sides(md.chain, md.bochner, entropy_for(alpha), rho);
                 return py::make_tuple(s.lhs, s.rhs);
             })
        .def("evolve",
             [](const Model &md, double alpha, const Vector &rho0,
                const std::vector<double> &times) {
                 return trajectory_dict(evolve(md.chain, entropy_for(alpha), rho0, times));
             })
        .def("beckner_constant",
             [](const Model &md, double alpha, std::size_t starts, std::uint64_t seed) {
                 OptimizerOptions o;
                 o.starts = starts;
                 o.seed = seed;
                 return estimate_dict(beckner_constant(md.chain, alpha, o));
             },
             py::arg("alpha"), py::arg("starts") = 32, py::arg("seed") = 0)
        .def("mlsi_constant",
             [](const Model &md, std::size_t starts, std::uint64_t seed) {
                 OptimizerOptions o;
                 o.starts = starts;
                 o.seed = seed;
                 return estimate_dict(mlsi_constant(md.chain, o));
             },
             py::arg("starts") = 32, py::arg("seed") = 0)
        .def("lsi_constant",
             [](const Model &md, std::size_t starts, std::uint64_t seed) {
                 OptimizerOptions o;
                 o.starts = starts;
                 o.seed = seed;
                 return estimate_dict(lsi_constant(md.chain, o));
             },
             py::arg("starts") = 32, py::arg("seed") = 0)
        .def("to_json", [](const Model &md) { return chain_to_json(md.chain); });

    m.def(
        "fv_refinement_csv",
        [](double coeff, double lambda_conv, const std::vector<int> &cells, double alpha,
           std::uint64_t seed) {
            return refinement_csv(mesh_refinement_study(Potential::quadratic(coeff), lambda_conv,
                                                        cells, alpha, seed));
        },
        py::arg("coeff"), py::arg("lambda_conv"), py::arg("cells"), py::arg("alpha"),
        py::arg("seed") = 0);
}
