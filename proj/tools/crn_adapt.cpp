// crn-adapt: command-line front end for the crnadapt library.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crn/adaptation.hpp"
#include "crn/conservation.hpp"
#include "crn/dynamics.hpp"
#include "crn/equilibrium.hpp"
#include "crn/error.hpp"
#include "crn/models.hpp"
#include "crn/netdsl.hpp"
#include "crn/response.hpp"

#ifndef CRN_VERSION
#define CRN_VERSION "0.0.0"
#endif

using json = nlohmann::json;
using namespace crn;

namespace {

enum Exit { kOk = 0, kNegative = 1, kInput = 2, kNumerical = 3 };

struct Common {
  std::uint64_t seed = 0;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double t_max = 0.0;  // 0 keeps the command's default
  double steady_tol = 1e-9;
  std::string output;
};

// ---------------------------------------------------------------- helpers

json vec(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json rational_vec(const RationalVector& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(q.get_str());
  return a;
}

json names(const ReactionNetwork& net, const std::vector<std::size_t>& idx) {
  json a = json::array();
  for (std::size_t i : idx) a.push_back(net.species_name(i));
  return a;
}

json meta(const Common& c, const AdaptationOptions* adapt = nullptr) {
  json tol = {{"rel_tol", c.rel_tol},
              {"abs_tol", c.abs_tol},
              {"steady_tol", c.steady_tol},
              {"detailed_balance", kDetailedBalanceTol},
              {"response", kResponseTol}};
  if (adapt) {
    tol["eps_adapt"] = adapt->eps_adapt;
    tol["theta_resp"] = adapt->theta_resp;
    tol["floor"] = adapt->floor;
    tol["equilibrium"] = adapt->equilibrium_tol;
  }
  return {{"tool_version", CRN_VERSION}, {"seed", c.seed}, {"generator", "mt19937_64"}, {"tolerances", tol}};
}

void emit_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidParams("cannot write '" + path + "'");
  out << text;
}

void emit_json(json doc, const Common& c, const AdaptationOptions* adapt = nullptr) {
  doc["meta"] = meta(c, adapt);
  emit_text(doc.dump(2) + "\n", c.output);
}

SimulationConfig sim_config(const Common& c, double default_t_max) {
  SimulationConfig cfg;
  cfg.rel_tol = c.rel_tol;
  cfg.abs_tol = c.abs_tol;
  cfg.steady_tol = c.steady_tol;
  cfg.t_max = c.t_max > 0.0 ? c.t_max : default_t_max;
  return cfg;
}

AdaptationOptions adapt_options(const Common& c) {
  AdaptationOptions o;
  o.sim = sim_config(c, o.sim.t_max);
  return o;
}

std::size_t species_or(const NetworkDocument& doc, const std::string& name, const std::optional<std::size_t>& fallback,
                       const char* role) {
  if (!name.empty()) return doc.system.network().require_species(name);
  if (fallback) return *fallback;
  throw InvalidParams(std::string("no ") + role + " species: annotate the file or pass --" + role);
}

Vector document_state(const NetworkDocument& doc) {
  if (doc.initial_state) {
    return Eigen::Map<const Vector>(doc.initial_state->data(), static_cast<Eigen::Index>(doc.initial_state->size()));
  }
  if (is_bidirectional(doc.system.network())) {
    auto cert = check_detailed_balance(doc.system);
    if (cert.holds) return equilibrium_state(*cert.energy);
  }
  throw InvalidParams("no init line and no detailed-balance equilibrium to start from");
}

std::size_t thread_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CRN_ADAPT_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs body(k) for k < jobs on up to thread_count(jobs) threads.
void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  auto worker = [&] {
    for (std::size_t k; (k = next++) < jobs;) {
      try {
        body(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < thread_count(jobs); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Rng draw_rng(std::uint64_t seed, std::size_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(k)};
  return Rng(seq);
}

std::string csv_trajectory(const ReactionNetwork& net, const Trajectory& tr) {
  std::ostringstream out;
  out << "t";
  for (const auto& s : net.species()) out << ',' << s;
  out << ",J_ext,J_ext_cum\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t k = 0; k < tr.size(); ++k) {
    put(tr.times[k]);
    for (Eigen::Index i = 0; i < tr.states[k].size(); ++i) {
      out << ',';
      put(tr.states[k](i));
    }
    out << ',';
    put(tr.ext_flux.empty() ? 0.0 : tr.ext_flux[k]);
    out << ',';
    put(tr.cumulative_flux.empty() ? 0.0 : tr.cumulative_flux[k]);
    out << '\n';
  }
  return out.str();
}

json adaptation_json(const AdaptationReport& r) {
  return {{"converged", r.converged},      {"returns", r.returns},   {"responds", r.responds},
          {"adapts", r.adapts},            {"deviation", r.deviation}, {"excursion", r.excursion},
          {"baseline", r.baseline},        {"limit_state", vec(r.limit_state)}};
}

Signal make_signal(double f0, const std::optional<double>& f_inf, double r, json& warnings) {
  bool warn = false;
  Signal s = make_admissible_signal(f0, f_inf.value_or(2.0 * f0), r, &warn);
  if (warn) warnings.push_back("signal violates |d/dt log f| < e^{-rt}");
  return s;
}

// ------------------------------------------------------------------- net

int net_validate(const std::string& path, const Common& c) {
  const auto doc = parse_network_file(path);
  const auto& net = doc.system.network();
  json out = {{"valid", true},
              {"species", net.species()},
              {"reactions", net.num_reactions()},
              {"bidirectional", is_bidirectional(net)},
              {"boundary_reactions", has_boundary_reactions(net)}};
  if (doc.signal) out["signal"] = net.species_name(*doc.signal);
  if (doc.product) out["product"] = net.species_name(*doc.product);
  if (doc.initial_state) out["initial_state"] = *doc.initial_state;
  emit_json(out, c);
  return kOk;
}

int net_conservation(const std::string& path, const Common& c) {
  const auto doc = parse_network_file(path);
  const auto& net = doc.system.network();
  const auto rep = analyze_conservation(net);
  json space = json::array(), rays = json::array(), pairs = json::array(), comps = json::array();
  for (const auto& v : rep.space) space.push_back(rational_vec(v));
  for (const auto& r : rep.rays.rays()) rays.push_back(r);
  for (const auto& [i, j] : rep.connectivity.failing_pairs) pairs.push_back({net.species_name(i), net.species_name(j)});
  for (const auto& comp : rep.connectivity.components) comps.push_back(names(net, comp));
  emit_json({{"dim", rep.dim},
             {"cycle_dim", rep.cycle_dim},
             {"basis", space},
             {"extreme_rays", rays},
             {"conservative", rep.conservative},
             {"m_connected", rep.connectivity.connected},
             {"m_pairwise", rep.connectivity.pairwise},
             {"failing_pairs", pairs},
             {"components", comps},
             {"species", net.species()}},
            c);
  return kOk;
}

int net_db_check(const std::string& path, const Common& c) {
  const auto doc = parse_network_file(path);
  const auto cert = check_detailed_balance(doc.system);
  json out = {{"holds", cert.holds}, {"residual", cert.residual}};
  if (cert.energy) out["energy"] = vec(*cert.energy);
  if (cert.violation) {
    out["violation_cycle"] = rational_vec(cert.violation->cycle);
    out["affinity"] = cert.violation->affinity;
  }
  out["closed"] = is_closed(doc.system).closed;
  emit_json(out, c);
  return cert.holds ? kOk : kNegative;
}

int net_cycles(const std::string& path, const Common& c) {
  const auto doc = parse_network_file(path);
  const auto& net = doc.system.network();
  const auto cycles = cycle_space(net);
  json cyc = json::array(), reactions = json::array();
  for (const auto& v : cycles) cyc.push_back(rational_vec(v));
  for (std::size_t r : canonical_half(net)) reactions.push_back(net.describe(r));
  json out = {{"cycle_dim", cycles.size()}, {"cycles", cyc}, {"reactions", reactions}};
  if (is_bidirectional(net)) out["affinities"] = cycle_affinities(doc.system);
  emit_json(out, c);
  return kOk;
}

// ------------------------------------------------------------------- sim

int sim_run(const std::string& path, const Common& c) {
  const auto doc = parse_network_file(path);
  const auto tr = simulate_kinetic(doc.system, document_state(doc), sim_config(c, 100.0));
  emit_text(csv_trajectory(doc.system.network(), tr), c.output);
  return kOk;
}

struct SignalArgs {
  std::string signal;
  std::optional<double> f_inf;
  double r = 0.9;
};

int sim_signalling(const std::string& path, const SignalArgs& a, const Common& c) {
  const auto doc = parse_network_file(path);
  const std::size_t s = species_or(doc, a.signal, doc.signal, "signal");
  const Vector n0 = document_state(doc);
  json warnings = json::array();
  const Signal f = make_signal(n0(static_cast<Eigen::Index>(s)), a.f_inf, a.r, warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w.get<std::string>() << '\n';
  SimulationConfig cfg = sim_config(c, 100.0);
  cfg.detect_steady = c.t_max <= 0.0;
  const auto tr = simulate_signalling(doc.system, n0, s, f, cfg);
  emit_text(csv_trajectory(doc.system.network(), tr), c.output);
  return kOk;
}

// -------------------------------------------------------------- response

struct PairArgs {
  std::string signal;
  std::string product;
};

int response_coeffs(const std::string& path, const PairArgs& a, const Common& c) {
  const auto doc = parse_network_file(path);
  const auto& net = doc.system.network();
  const std::size_t s = species_or(doc, a.signal, doc.signal, "signal");
  const std::size_t p = species_or(doc, a.product, doc.product, "p");
  const auto cert = check_detailed_balance(doc.system);
  if (!cert.holds) throw PreconditionFailed("response coefficients need a detailed-balance system");
  const Vector energy = doc.initial_state ? Vector(-document_state(doc).array().log()) : *cert.energy;
  const auto lin = linearized_matrix(doc.system, energy, s);
  const auto layers = layer_hierarchy(net, s, p);
  const auto rep = response_coefficients(lin, layers);
  json lay = json::array(), coeffs = json::array();
  for (std::size_t n = 0; n < layers.layers.size(); ++n) {
    lay.push_back(names(net, layers.layers[n]));
    coeffs.push_back(rep.coefficients[n]);
  }
  emit_json({{"L", rep.depth},
             {"layers", lay},
             {"coefficients", coeffs},
             {"c_Lp", rep.c_lp},
             {"scale", rep.scale},
             {"verdict", rep.responds ? "responds" : "degenerate"},
             {"taylor_oracle", taylor_oracle(lin, p, rep.depth + 1)},
             {"order", rep.depth + 1}},
            c);
  return rep.responds ? kOk : kNegative;
}

// Document with new rates whose init line is the equilibrium e^{-E}, moved
// along a law through the signal so that n(signal) keeps its old value.
NetworkDocument rebuilt(const NetworkDocument& doc, const RateFunction& rates, const Vector& energy, std::size_t s) {
  NetworkDocument out = doc;
  out.system = doc.system.with_rates(rates);
  Vector e = energy;
  const auto basis = extreme_rays(doc.system.network());
  for (const auto& ray : basis.rays()) {
    if (ray[s] == 0) continue;
    Vector law(static_cast<Eigen::Index>(ray.size()));
    for (std::size_t i = 0; i < ray.size(); ++i) law(static_cast<Eigen::Index>(i)) = static_cast<double>(ray[i]);
    e = reference_energy(energy, law, s, document_state(doc)(static_cast<Eigen::Index>(s)));
    break;
  }
  const Vector z = equilibrium_state(e);
  out.initial_state = std::vector<double>(z.data(), z.data() + z.size());
  return out;
}

int response_perturb(const std::string& path, const PairArgs& a, double delta, const Common& c) {
  const auto doc = parse_network_file(path);
  const std::size_t s = species_or(doc, a.signal, doc.signal, "signal");
  const std::size_t p = species_or(doc, a.product, doc.product, "p");
  const auto cert = check_detailed_balance(doc.system);
  if (!cert.holds) throw PreconditionFailed("response perturb needs a detailed-balance system");
  const Vector energy = -document_state(doc).array().log().matrix();
  const auto res = perturb_for_response(doc.system, energy, s, p, delta);
  std::cerr << "c_lp = " << res.report.c_lp << ", ||K - K'||_inf = " << res.rate_change << '\n';
  emit_text(serialize_network(rebuilt(doc, res.system.rates(), res.energy, s)), c.output);
  return kOk;
}

// ----------------------------------------------------------------- adapt

struct AdaptArgs {
  SignalArgs signal;
  std::string product;
  std::size_t draws = 0;
  double amplitude = 2.0;
};

int adapt_test(const std::string& path, const AdaptArgs& a, const Common& c) {
  const auto doc = parse_network_file(path);
  const auto& net = doc.system.network();
  const std::size_t s = species_or(doc, a.signal.signal, doc.signal, "signal");
  const std::size_t p = species_or(doc, a.product, doc.product, "p");
  const AdaptationOptions opts = adapt_options(c);

  if (a.draws == 0) {
    const Vector n0 = document_state(doc);
    json warnings = json::array();
    const Signal f = make_signal(n0(static_cast<Eigen::Index>(s)), a.signal.f_inf, a.signal.r, warnings);
    const auto rep = test_adaptation(doc.system, n0, s, f, p, opts);
    json out = adaptation_json(rep);
    out["signal"] = {{"f0", f.f0}, {"f_inf", f.f_inf}, {"r", f.r}};
    out["warnings"] = warnings;
    emit_json(out, c, &opts);
    return rep.adapts ? kOk : kNegative;
  }

  std::vector<json> results(a.draws);
  parallel_for(a.draws, [&](std::size_t k) {
    Rng rng = draw_rng(c.seed, k);
    const auto db = random_db_rates(net, rng);
    const KineticSystem sys(net, db.rates);
    const Vector n0 = equilibrium_state(db.energy);
    const double f0 = n0(static_cast<Eigen::Index>(s));
    const Signal f = make_admissible_signal(f0, a.amplitude * f0, a.signal.r);
    json r = adaptation_json(test_adaptation(sys, n0, s, f, p, opts));
    r["draw"] = k;
    results[k] = std::move(r);
  });
  std::size_t passed = 0;
  for (const auto& r : results) passed += r["adapts"].get<bool>() ? 1 : 0;
  emit_json({{"draws", results}, {"total", a.draws}, {"adapts", passed}, {"amplitude", a.amplitude}, {"r", a.signal.r}}, c,
            &opts);
  return kOk;
}

int adapt_audit(const std::string& path, const AdaptArgs& a, const Common& c) {
  const auto doc = parse_network_file(path);
  const auto& net = doc.system.network();
  const std::size_t s = species_or(doc, a.signal.signal, doc.signal, "signal");
  const std::size_t p = species_or(doc, a.product, doc.product, "p");
  const AdaptationOptions opts = adapt_options(c);
  std::optional<Signal> f;
  std::optional<Vector> init;
  if (doc.initial_state) init = document_state(doc);
  if (a.signal.f_inf) {
    const double f0 = init ? (*init)(static_cast<Eigen::Index>(s)) : document_state(doc)(static_cast<Eigen::Index>(s));
    f = make_admissible_signal(f0, *a.signal.f_inf, a.signal.r);
  }
  const auto rep = audit(doc.system, s, p, f, opts, c.seed, init);
  json classes = json::array(), pairs = json::array();
  for (const auto& cl : rep.classes) classes.push_back(names(net, cl));
  for (const auto& [i, j] : rep.connectivity.failing_pairs) pairs.push_back({net.species_name(i), net.species_name(j)});
  json out = {{"closed", rep.closed.closed},
              {"detailed_balance", rep.closed.detailed_balance},
              {"conservative", rep.closed.conservative},
              {"boundary_free", rep.closed.boundary_free},
              {"m_connected", rep.connectivity.connected},
              {"m_pairwise", rep.connectivity.pairwise},
              {"failing_pairs", pairs},
              {"graph_connected", rep.graph_connected},
              {"product_unconserved", rep.product_unconserved},
              {"pairing_tol", rep.pairing_tol},
              {"classes", classes},
              {"same_class", rep.same_class},
              {"simulation", adaptation_json(rep.simulation)},
              {"conclusion", rep.conclusion},
              {"initial_state", vec(rep.initial_state)},
              {"signal", net.species_name(s)},
              {"product", net.species_name(p)}};
  out["pairing"] = rep.pairing ? json(*rep.pairing) : json(nullptr);
  out["responds"] = rep.responds ? json(*rep.responds) : json(nullptr);
  out["prediction_holds"] = rep.prediction_holds ? json(*rep.prediction_holds) : json(nullptr);
  emit_json(out, c, &opts);
  return (rep.prediction_holds && !*rep.prediction_holds) ? kNegative : kOk;
}

int adapt_break(const std::string& path, const AdaptArgs& a, double delta, std::size_t max_samples, const Common& c) {
  const auto doc = parse_network_file(path);
  const std::size_t s = species_or(doc, a.signal.signal, doc.signal, "signal");
  const std::size_t p = species_or(doc, a.product, doc.product, "p");
  const auto cert = check_detailed_balance(doc.system);
  if (!cert.holds) throw PreconditionFailed("adapt break needs a detailed-balance system");
  const Vector energy = -document_state(doc).array().log().matrix();
  const auto res = perturb_to_break_adaptation(doc.system, energy, s, p, delta, c.seed, max_samples);
  std::cerr << (res.unchanged ? "pairing already nonzero; rates unchanged" : "pairing now " + std::to_string(res.pairing))
            << ", samples " << res.samples << ", ||K - K'||_inf = " << res.rate_change << '\n';
  NetworkDocument out = doc;
  out.system = doc.system.with_rates(res.rates);
  const Vector z = equilibrium_state(res.energy);
  out.initial_state = std::vector<double>(z.data(), z.data() + z.size());
  emit_text(serialize_network(out), c.output);
  return kOk;
}

// ---------------------------------------------------------------- models

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidParams("parameter '" + item + "' is not name=value");
    const std::string value = item.substr(eq + 1);
    char* end = nullptr;
    double v = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0') throw InvalidParams("parameter '" + item + "' has a bad value");
    out[item.substr(0, eq)] = v;
  }
  return out;
}

int models_list(const Common& c) {
  json models = json::array();
  for (const auto& id : builtin_ids()) {
    const auto m = builtin(id);
    json params = json::array();
    for (const auto& ps : m.params) {
      params.push_back({{"name", ps.name}, {"default", ps.value}, {"description", ps.description}, {"positive", ps.positive}});
    }
    models.push_back({{"id", id}, {"description", m.description}, {"custom", m.is_custom()}, {"params", params}});
  }
  emit_json({{"models", models}}, c);
  return kOk;
}

int models_export(const std::string& id, const std::vector<std::string>& params, const Common& c) {
  const auto m = builtin(id, parse_params(params));
  if (!m.document) throw InvalidParams("model '" + id + "' is not a reaction network and has no .crn form");
  emit_text(serialize_network(*m.document), c.output);
  return kOk;
}

struct RunArgs {
  std::vector<std::string> params;
  double f = 1.0;
  std::optional<double> f_inf;
  double r = 0.9;
  bool qss = false;
  bool verify = false;
  std::size_t trials = 100;
};

int models_run(const std::string& id, const RunArgs& a, const Common& c) {
  if (a.verify) {
    const auto rep = verify_completion_claims(c.seed, a.trials);
    json basis = json::array(), ins = json::array();
    for (const auto& v : rep.conservation_basis) basis.push_back(rational_vec(v));
    for (const auto& [k, x] : rep.consistent_insertions) ins.push_back({{"position", k + 1}, {"value", x.get_str()}});
    emit_json({{"species", rep.species},
               {"cycle_dim", rep.cycle_dim},
               {"conservation_dim", rep.conservation_dim},
               {"conservation_basis", basis},
               {"conservative", rep.conservative},
               {"claimed", rep.claimed},
               {"length_mismatch", rep.length_mismatch},
               {"consistent_insertions", ins},
               {"db_trials", rep.db_trials},
               {"db_passed", rep.db_passed},
               {"summary", rep.summary}},
              c);
    return rep.db_passed == rep.db_trials ? kOk : kNegative;
  }
  const auto m = builtin(id, parse_params(a.params));
  if (a.qss) {
    if (id != "bl-mass-action") throw InvalidParams("--qss applies to bl-mass-action only");
    BlParams bp{m.param("k1"), m.param("km1"), m.param("k2"), m.param("km2"), m.param("lambda"), m.param("C0")};
    const double horizon = c.t_max > 0.0 ? c.t_max : 50.0;
    const auto rep = qss_reduce_bl(bp, a.f, horizon);
    emit_json({{"c", rep.c},
               {"warnings", rep.warnings},
               {"p_rel_error", rep.p_rel_error},
               {"enzyme_drift", rep.enzyme_drift},
               {"yE_rel_error", rep.yE_rel_error},
               {"horizon", rep.horizon},
               {"f", a.f}},
              c);
    return rep.warnings.empty() ? kOk : kNegative;
  }
  if (m.custom) {
    const auto& model = *m.custom;
    SimulationConfig cfg = sim_config(c, 100.0);
    cfg.detect_steady = false;
    const double f0 = a.f, f1 = a.f_inf.value_or(a.f), r = a.r;
    const Signal sig{f0, f1, r};
    const auto tr = simulate_custom(model, model.initial_state, [&](double t) { return sig.value(t); }, cfg);
    std::ostringstream out;
    out << "t";
    for (const auto& n : model.state_names) out << ',' << n;
    out << ",f\n";
    char buf[32];
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", tr.times[k]);
      out << buf;
      for (Eigen::Index i = 0; i < tr.states[k].size(); ++i) {
        std::snprintf(buf, sizeof buf, ",%.17g", tr.states[k](i));
        out << buf;
      }
      std::snprintf(buf, sizeof buf, ",%.17g\n", sig.value(tr.times[k]));
      out << buf;
    }
    emit_text(out.str(), c.output);
    return kOk;
  }
  const auto& doc = *m.document;
  const Vector n0 = document_state(doc);
  SimulationConfig cfg = sim_config(c, 100.0);
  if (id == "bl-mass-action") cfg.method = Method::implicit_euler;
  Trajectory tr;
  if (doc.signal && a.f_inf) {
    const auto s = static_cast<Eigen::Index>(*doc.signal);
    tr = simulate_signalling(doc.system, n0, *doc.signal, make_admissible_signal(n0(s), *a.f_inf, a.r), cfg);
  } else {
    tr = simulate_kinetic(doc.system, n0, cfg);
  }
  emit_text(csv_trajectory(doc.system.network(), tr), c.output);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structural and dynamical analysis of adaptation in chemical reaction networks", "crn-adapt"};
  app.set_version_flag("--version", CRN_VERSION);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seed", common.seed, "Seed for random draws");
    cmd->add_option("--rel-tol", common.rel_tol, "Relative integration tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--abs-tol", common.abs_tol, "Absolute integration tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--steady-tol", common.steady_tol, "Steady-state residual threshold")->check(CLI::PositiveNumber);
    cmd->add_option("--t-max", common.t_max, "Simulation horizon")->check(CLI::PositiveNumber);
    cmd->add_option("-o,--output", common.output, "Output file (default stdout)");
  };

  std::function<int()> action;
  std::string file;
  auto leaf = [&](CLI::App* parent, const char* name, const char* help, bool takes_file) {
    CLI::App* cmd = parent->add_subcommand(name, help);
    if (takes_file) cmd->add_option("file", file, ".crn network file")->required()->check(CLI::ExistingFile);
    add_common(cmd);
    return cmd;
  };

  // net
  CLI::App* net = app.add_subcommand("net", "Structural checks on a .crn file");
  net->require_subcommand(1);
  leaf(net, "validate", "Parse and validate", true)->callback([&] { action = [&] { return net_validate(file, common); }; });
  leaf(net, "conservation", "Conservation laws, extreme rays, M-connectivity", true)->callback([&] {
    action = [&] { return net_conservation(file, common); };
  });
  leaf(net, "db-check", "Detailed balance certificate (exit 1 if it fails)", true)->callback([&] {
    action = [&] { return net_db_check(file, common); };
  });
  leaf(net, "cycles", "Cycle space and affinities", true)->callback([&] { action = [&] { return net_cycles(file, common); }; });

  // sim
  SignalArgs sig;
  auto add_signal = [&](CLI::App* cmd, SignalArgs& target) {
    cmd->add_option("--signal", target.signal, "Signal species (default: file annotation)");
    cmd->add_option("--f-inf", target.f_inf, "Limit value of the signal (default 2 f0)")->check(CLI::PositiveNumber);
    cmd->add_option("--r", target.r, "Signal rate")->check(CLI::PositiveNumber);
  };
  CLI::App* sim = app.add_subcommand("sim", "Simulations, CSV output");
  sim->require_subcommand(1);
  leaf(sim, "run", "Unforced mass-action run", true)->callback([&] { action = [&] { return sim_run(file, common); }; });
  CLI::App* signalling = leaf(sim, "signalling", "Run with the signal species clamped to f(t)", true);
  add_signal(signalling, sig);
  signalling->callback([&] { action = [&] { return sim_signalling(file, sig, common); }; });

  // response
  PairArgs pair;
  double delta = 0.05;
  auto add_pair = [&](CLI::App* cmd) {
    cmd->add_option("--signal", pair.signal, "Signal species (default: file annotation)");
    cmd->add_option("--p,--product", pair.product, "Product species (default: file annotation)");
  };
  CLI::App* response = app.add_subcommand("response", "Leading-order response of the product");
  response->require_subcommand(1);
  CLI::App* coeffs = leaf(response, "coeffs", "Layer hierarchy and response coefficients", true);
  add_pair(coeffs);
  coeffs->callback([&] { action = [&] { return response_coeffs(file, pair, common); }; });
  CLI::App* perturb = leaf(response, "perturb", "Nudge rates until the product responds; writes .crn", true);
  add_pair(perturb);
  perturb->add_option("--delta", delta, "Perturbation budget")->check(CLI::PositiveNumber);
  perturb->callback([&] { action = [&] { return response_perturb(file, pair, delta, common); }; });

  // adapt
  AdaptArgs adapt;
  std::size_t max_samples = 1000;
  auto add_adapt = [&](CLI::App* cmd) {
    add_signal(cmd, adapt.signal);
    cmd->add_option("--p,--product", adapt.product, "Product species (default: file annotation)");
  };
  CLI::App* adapt_cmd = app.add_subcommand("adapt", "Adaptation tests and audits");
  adapt_cmd->require_subcommand(1);
  CLI::App* test = leaf(adapt_cmd, "test", "Simulated adaptation properties (exit 1 if not adapting)", true);
  add_adapt(test);
  test->add_option("--draws", adapt.draws, "Evaluate this many random detailed-balance rate draws instead");
  test->add_option("--amplitude", adapt.amplitude, "f_inf / f0 for --draws")->check(CLI::PositiveNumber);
  test->callback([&] { action = [&] { return adapt_test(file, adapt, common); }; });
  CLI::App* aud = leaf(adapt_cmd, "audit", "Structural audit with simulation cross-check", true);
  add_adapt(aud);
  aud->callback([&] { action = [&] { return adapt_audit(file, adapt, common); }; });
  CLI::App* brk = leaf(adapt_cmd, "break", "Perturb energies until the pairing is nonzero; writes .crn", true);
  add_adapt(brk);
  brk->add_option("--delta", delta, "Relative perturbation radius")->check(CLI::PositiveNumber);
  brk->add_option("--max-samples", max_samples, "Sampling budget");
  brk->callback([&] { action = [&] { return adapt_break(file, adapt, delta, max_samples, common); }; });

  // models
  std::string model_id;
  RunArgs run;
  CLI::App* models = app.add_subcommand("models", "Builtin models");
  models->require_subcommand(1);
  leaf(models, "list", "List builtins and their parameters", false)->callback([&] {
    action = [&] { return models_list(common); };
  });
  CLI::App* exp_cmd = leaf(models, "export", "Write a builtin as .crn", false);
  exp_cmd->add_option("id", model_id, "Model id")->required();
  exp_cmd->add_option("--param", run.params, "name=value override (repeatable)");
  exp_cmd->callback([&] { action = [&] { return models_export(model_id, run.params, common); }; });
  CLI::App* mrun = leaf(models, "run", "Simulate a builtin (CSV), or run its report", false);
  mrun->add_option("id", model_id, "Model id")->required();
  mrun->add_option("--param", run.params, "name=value override (repeatable)");
  mrun->add_option("--f", run.f, "Input value for custom models and the QSS comparison");
  mrun->add_option("--f-inf", run.f_inf, "Limit of the signal; enables a signalling run");
  mrun->add_option("--r", run.r, "Signal rate")->check(CLI::PositiveNumber);
  mrun->add_flag("--qss", run.qss, "bl-mass-action: compare against the quasi-steady reduction (JSON)");
  mrun->add_flag("--verify-claims", run.verify, "gene-expression-completion: structural claims report (JSON)");
  mrun->add_option("--trials", run.trials, "Random rate draws for --verify-claims");
  mrun->callback([&] { action = [&] { return models_run(model_id, run, common); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    return action ? action() : kInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << file << ": " << e.what() << '\n';
    return kInput;
  } catch (const NoConvergence& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const StepSizeUnderflow& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const SingularD& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const SearchExhausted& e) {
    std::cerr << "search exhausted: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
}
