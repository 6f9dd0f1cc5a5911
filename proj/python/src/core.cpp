#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "crn/adaptation.hpp"
#include "crn/conservation.hpp"
#include "crn/dynamics.hpp"
#include "crn/equilibrium.hpp"
#include "crn/error.hpp"
#include "crn/models.hpp"
#include "crn/netdsl.hpp"
#include "crn/response.hpp"

namespace py = pybind11;
using namespace crn;

namespace {

// Rationals cross the boundary as "p/q" strings; the package wraps them in Fraction.
std::vector<std::string> rational_strings(const RationalVector& v) {
  std::vector<std::string> out;
  for (const auto& x : v) out.push_back(x.get_str());
  return out;
}

std::vector<std::vector<std::string>> rational_rows(const std::vector<RationalVector>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) out.push_back(rational_strings(r));
  return out;
}

py::dict trajectory_dict(const Trajectory& tr) {
  py::dict d;
  Matrix states(static_cast<Eigen::Index>(tr.size()), tr.size() ? tr.states[0].size() : 0);
  for (std::size_t k = 0; k < tr.size(); ++k) states.row(static_cast<Eigen::Index>(k)) = tr.states[k].transpose();
  d["t"] = tr.times;
  d["states"] = states;
  d["ext_flux"] = tr.ext_flux;
  d["cumulative_flux"] = tr.cumulative_flux;
  d["steady"] = tr.steady;
  d["used_implicit"] = tr.used_implicit;
  return d;
}

py::dict adaptation_dict(const AdaptationReport& r) {
  py::dict d;
  d["converged"] = r.converged;
  d["limit_state"] = r.limit_state;
  d["returns"] = r.returns;
  d["deviation"] = r.deviation;
  d["responds"] = r.responds;
  d["excursion"] = r.excursion;
  d["baseline"] = r.baseline;
  d["adapts"] = r.adapts;
  return d;
}

SimulationConfig config(double t_max, double rel_tol, double abs_tol, bool detect_steady) {
  SimulationConfig c;
  c.t_max = t_max;
  c.rel_tol = rel_tol;
  c.abs_tol = abs_tol;
  c.detect_steady = detect_steady;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Reaction network adaptation analysis";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidNetwork>(m, "InvalidNetwork", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<NotBidirectional>(m, "NotBidirectional", base.ptr());
  py::register_exception<PreconditionFailed>(m, "PreconditionFailed", base.ptr());
  py::register_exception<NotConnected>(m, "NotConnected", base.ptr());
  py::register_exception<NotAtEquilibrium>(m, "NotAtEquilibrium", base.ptr());
  py::register_exception<UnknownModel>(m, "UnknownModel", base.ptr());
  py::register_exception<InvalidParams>(m, "InvalidParams", base.ptr());
  py::register_exception<NoConvergence>(m, "NoConvergence", base.ptr());
  py::register_exception<StepSizeUnderflow>(m, "StepSizeUnderflow", base.ptr());
  py::register_exception<SearchExhausted>(m, "SearchExhausted", base.ptr());
  py::register_exception<SingularD>(m, "SingularD", base.ptr());

  py::class_<KineticSystem>(m, "KineticSystem")
      .def(py::init([](std::vector<std::string> species, std::vector<Stoich> reactions, RateFunction rates) {
             std::vector<Reaction> rx;
             for (auto& s : reactions) rx.emplace_back(std::move(s));
             return KineticSystem(ReactionNetwork(std::move(species), std::move(rx)), std::move(rates));
           }),
           py::arg("species"), py::arg("reactions"), py::arg("rates"))
      .def_property_readonly("species", [](const KineticSystem& s) { return s.network().species(); })
      .def_property_readonly("reactions",
                             [](const KineticSystem& s) {
                               std::vector<Stoich> out;
                               for (const auto& r : s.network().reactions()) out.push_back(r.stoich());
                               return out;
                             })
      .def_property_readonly("rates", &KineticSystem::rates)
      .def("with_rates", &KineticSystem::with_rates, py::arg("rates"))
      .def("describe", [](const KineticSystem& s, std::size_t r) { return s.network().describe(r); })
      .def("index", [](const KineticSystem& s, const std::string& name) { return s.network().require_species(name); })
      .def("__len__", &KineticSystem::num_species)
      .def("__repr__", [](const KineticSystem& s) {
        std::ostringstream os;
        os << "<KineticSystem " << s.num_species() << " species, " << s.network().num_reactions() << " reactions>";
        return os.str();
      });

  py::class_<NetworkDocument>(m, "NetworkDocument")
      .def_readonly("system", &NetworkDocument::system)
      .def_readonly("signal", &NetworkDocument::signal)
      .def_readonly("product", &NetworkDocument::product)
      .def_readonly("initial_state", &NetworkDocument::initial_state)
      .def("serialize", [](const NetworkDocument& d) { return serialize_network(d); });

  m.def("parse_network", [](const std::string& text) { return parse_network(text); }, py::arg("text"));
  m.def("parse_network_file", &parse_network_file, py::arg("path"));
  m.def("serialize_network", &serialize_network, py::arg("doc"));
  m.def("equivalent", &equivalent, py::arg("a"), py::arg("b"));

  m.def("is_bidirectional", [](const KineticSystem& s) { return is_bidirectional(s.network()); });
  m.def("canonical_half", [](const KineticSystem& s) { return canonical_half(s.network()); });
  m.def("has_boundary_reactions", [](const KineticSystem& s) { return has_boundary_reactions(s.network()); });

  m.def("_conservation_space", [](const KineticSystem& s) { return rational_rows(conservation_space(s.network())); });
  m.def("_cycle_space", [](const KineticSystem& s) { return rational_rows(cycle_space(s.network())); });
  m.def("extreme_rays", [](const KineticSystem& s) { return extreme_rays(s.network()).rays(); });
  m.def("is_conservative", [](const KineticSystem& s) { return is_conservative(s.network()); });
  m.def("m_connectivity", [](const KineticSystem& s) {
    const auto mc = m_connectivity(extreme_rays(s.network()));
    py::dict d;
    d["connected"] = mc.connected;
    d["pairwise"] = mc.pairwise;
    d["failing_pairs"] = mc.failing_pairs;
    d["components"] = mc.components;
    return d;
  });

  m.def("check_detailed_balance", [](const KineticSystem& s, double tol) {
    const auto c = check_detailed_balance(s, tol);
    py::dict d;
    d["holds"] = c.holds;
    d["residual"] = c.residual;
    d["energy"] = c.energy ? py::cast(*c.energy) : py::none();
    if (c.violation) {
      d["violation_cycle"] = rational_strings(c.violation->cycle);
      d["affinity"] = c.violation->affinity;
    }
    return d;
  }, py::arg("system"), py::arg("tol") = kDetailedBalanceTol);
  m.def("is_closed", [](const KineticSystem& s) {
    const auto c = is_closed(s);
    py::dict d;
    d["closed"] = c.closed;
    d["detailed_balance"] = c.detailed_balance;
    d["conservative"] = c.conservative;
    d["boundary_free"] = c.boundary_free;
    return d;
  });
  m.def("make_db_rates", [](const KineticSystem& s, const Vector& e, const std::vector<double>& fwd) {
    return make_db_rates(s.network(), e, fwd);
  }, py::arg("system"), py::arg("energy"), py::arg("forward"));
  m.def("equilibrium_from_totals",
        [](const Vector& e0, const Matrix& laws, const Vector& totals) { return equilibrium_from_totals(e0, laws, totals); },
        py::arg("e0"), py::arg("laws"), py::arg("totals"));
  m.def("delta_from_rates", &delta_from_rates, py::arg("system"), py::arg("reference"));
  m.def("one_directional_limit", &one_directional_limit, py::arg("system"));

  m.def("rhs", &rhs, py::arg("system"), py::arg("n"));
  m.def("reaction_flux", &reaction_flux, py::arg("system"), py::arg("r"), py::arg("n"));
  m.def("simulate_kinetic",
        [](const KineticSystem& s, const Vector& n0, double t_max, double rel_tol, double abs_tol, bool steady) {
          return trajectory_dict(simulate_kinetic(s, n0, config(t_max, rel_tol, abs_tol, steady)));
        },
        py::arg("system"), py::arg("n0"), py::arg("t_max") = 100.0, py::arg("rel_tol") = 1e-8,
        py::arg("abs_tol") = 1e-10, py::arg("detect_steady") = true);
  m.def("simulate_signalling",
        [](const KineticSystem& s, const Vector& n0, std::size_t signal, double f_inf, double r, double t_max,
           double rel_tol, double abs_tol, bool steady) {
          const Signal f = make_admissible_signal(n0(static_cast<Eigen::Index>(signal)), f_inf, r);
          return trajectory_dict(simulate_signalling(s, n0, signal, f, config(t_max, rel_tol, abs_tol, steady)));
        },
        py::arg("system"), py::arg("n0"), py::arg("signal"), py::arg("f_inf"), py::arg("r") = 0.9,
        py::arg("t_max") = 100.0, py::arg("rel_tol") = 1e-8, py::arg("abs_tol") = 1e-10,
        py::arg("detect_steady") = true);
  m.def("predict_limit", [](const KineticSystem& s, const Vector& n0, std::size_t signal, double f_inf) {
    const auto p = predict_limit(s, n0, signal, f_inf);
    py::dict d;
    d["state"] = p.state;
    d["energy"] = p.energy;
    d["cumulative_flux"] = p.cumulative_flux;
    return d;
  }, py::arg("system"), py::arg("n0"), py::arg("signal"), py::arg("f_inf"));

  m.def("response", [](const KineticSystem& s, const Vector& energy, std::size_t signal, std::size_t product) {
    const auto lin = linearized_matrix(s, energy, signal);
    const auto layers = layer_hierarchy(s.network(), signal, product);
    const auto rep = response_coefficients(lin, layers);
    py::dict d;
    d["L"] = rep.depth;
    d["layers"] = layers.layers;
    d["coefficients"] = rep.coefficients;
    d["c_Lp"] = rep.c_lp;
    d["scale"] = rep.scale;
    d["verdict"] = rep.responds ? "responds" : "degenerate";
    d["taylor_oracle"] = taylor_oracle(lin, product, rep.depth + 1);
    d["A"] = lin.A;
    return d;
  }, py::arg("system"), py::arg("energy"), py::arg("signal"), py::arg("product"));
  m.def("perturb_for_response", [](const KineticSystem& s, const Vector& e, std::size_t signal, std::size_t product,
                                   double delta) {
    const auto out = perturb_for_response(s, e, signal, product, delta);
    return py::make_tuple(out.system, out.energy, out.rate_change);
  }, py::arg("system"), py::arg("energy"), py::arg("signal"), py::arg("product"), py::arg("delta"));

  m.def("test_adaptation",
        [](const KineticSystem& s, const Vector& n0, std::size_t signal, std::size_t product, double f_inf, double r) {
          const Signal f = make_admissible_signal(n0(static_cast<Eigen::Index>(signal)), f_inf, r);
          return adaptation_dict(test_adaptation(s, n0, signal, f, product));
        },
        py::arg("system"), py::arg("n0"), py::arg("signal"), py::arg("product"), py::arg("f_inf"),
        py::arg("r") = 0.9);
  m.def("obstruction_pairing", [](const KineticSystem& s, const Vector& zeta, std::size_t signal, std::size_t product) {
    return obstruction_pairing(extreme_rays(s.network()), zeta, signal, product);
  }, py::arg("system"), py::arg("zeta"), py::arg("signal"), py::arg("product"));
  m.def("equivalence_classes", [](const KineticSystem& s, const Vector& zeta, std::uint64_t seed) {
    return equivalence_classes(extreme_rays(s.network()), zeta, seed);
  }, py::arg("system"), py::arg("zeta"), py::arg("seed") = 0);
  m.def("audit", [](const KineticSystem& s, std::size_t signal, std::size_t product, std::optional<Vector> initial,
                    std::uint64_t seed) {
    const auto a = audit(s, signal, product, std::nullopt, {}, seed, initial);
    py::dict d;
    d["conclusion"] = a.conclusion;
    d["closed"] = a.closed.closed;
    d["m_connected"] = a.connectivity.connected;
    d["pairing"] = a.pairing;
    d["pairing_tol"] = a.pairing_tol;
    d["classes"] = a.classes;
    d["same_class"] = a.same_class;
    d["responds"] = a.responds;
    d["prediction_holds"] = a.prediction_holds;
    d["simulation"] = adaptation_dict(a.simulation);
    return d;
  }, py::arg("system"), py::arg("signal"), py::arg("product"), py::arg("initial") = std::nullopt,
     py::arg("seed") = 0);

  m.def("builtin_ids", &builtin_ids);
  m.def("builtin", [](const std::string& id, const ParamMap& params) {
    auto b = builtin(id, params);
    if (!b.document) throw InvalidParams("model '" + id + "' is not a mass-action network");
    return *b.document;
  }, py::arg("id"), py::arg("params") = ParamMap{});
  m.def("qss_reduce_bl", [](double f, double horizon) {
    const auto q = qss_reduce_bl({}, f, horizon);
    py::dict d;
    d["c"] = q.c;
    d["warnings"] = q.warnings;
    d["p_rel_error"] = q.p_rel_error;
    d["enzyme_drift"] = q.enzyme_drift;
    d["yE_rel_error"] = q.yE_rel_error;
    return d;
  }, py::arg("f") = 1.0, py::arg("horizon") = 50.0);
  m.def("verify_completion_claims", [](std::uint64_t seed, std::size_t trials) {
    const auto c = verify_completion_claims(seed, trials);
    py::dict d;
    d["species"] = c.species;
    d["cycle_dim"] = c.cycle_dim;
    d["conservation_dim"] = c.conservation_dim;
    d["length_mismatch"] = c.length_mismatch;
    d["db_passed"] = c.db_passed;
    d["db_trials"] = c.db_trials;
    d["summary"] = c.summary;
    return d;
  }, py::arg("seed") = 0, py::arg("trials") = 100);
}
