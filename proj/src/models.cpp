#include "crn/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "crn/conservation.hpp"
#include "crn/equilibrium.hpp"
#include "crn/error.hpp"

namespace crn {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes "lhs <-> rhs @ kf, kr" with kr fixed by detailed balance for energy E:
// kr = kf exp(sum_i R(i) E(i)) where R = rhs - lhs.
struct Text {
  std::ostringstream out;
  std::map<std::string, double> energy;

  double dE(const std::vector<std::string>& lhs, const std::vector<std::string>& rhs) const {
    double s = 0.0;
    for (const auto& x : rhs) s += energy.at(x);
    for (const auto& x : lhs) s -= energy.at(x);
    return s;
  }
  static std::string side(const std::vector<std::string>& v) {
    if (v.empty()) return "0";
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : " + ") + x;
    return s;
  }
  void pair(const std::vector<std::string>& lhs, const std::vector<std::string>& rhs, double kf, double kr) {
    out << side(lhs) << " <-> " << side(rhs) << " @ kf=" << num(kf) << ", kr=" << num(kr) << '\n';
  }
  void db_pair(const std::vector<std::string>& lhs, const std::vector<std::string>& rhs, double kf,
               double delta = 0.0) {
    pair(lhs, rhs, kf, kf * std::exp(dE(lhs, rhs) + delta));
  }
  void one_way(const std::vector<std::string>& lhs, const std::vector<std::string>& rhs, double k) {
    out << side(lhs) << " -> " << side(rhs) << " @ k=" << num(k) << '\n';
  }
  void init_from_energy(const std::vector<std::string>& species) {
    out << "init:";
    for (std::size_t i = 0; i < species.size(); ++i) {
      out << (i ? ", " : " ") << species[i] << '=' << num(std::exp(-energy.at(species[i])));
    }
    out << '\n';
  }
};

std::string species_line(const std::vector<std::string>& names) {
  std::string s = "species:";
  for (std::size_t i = 0; i < names.size(); ++i) s += (i ? ", " : " ") + names[i];
  return s + "\n";
}

struct Registry {
  std::string id;
  std::string description;
  std::vector<ParamSpec> params;
};

std::vector<ParamSpec> energies(std::initializer_list<std::pair<const char*, double>> list) {
  std::vector<ParamSpec> out;
  for (const auto& [name, value] : list) out.push_back({name, value, "free energy", false});
  return out;
}

std::vector<ParamSpec> concat(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const std::vector<Registry>& registry() {
  static const std::vector<Registry> models = {
      {"example-3.2", "s1<->s2, s1<->s3, s2<->s3+s4; unit rates, reverse rates into s1 equal alpha",
       {{"alpha", 1.0, "rate of s2->s1 and s3->s1"}, {"f0", 1.0, "initial signal concentration"}}},
      {"two-step", "s2+s3<->s1, s3+s4<->s2 with detailed-balance rates",
       concat({{"K1", 1.0, "rate of s2+s3->s1"}, {"K2", 1.0, "rate of s3+s4->s2"}},
              energies({{"E1", 0.0}, {"E2", 0.5}, {"E3", -0.25}, {"E4", 0.3}}))},
      {"m-disconnection", "s1+s3<->s2+s4, s1<->s2, s3<->s4 with detailed-balance rates",
       concat({{"k1", 1.0, "rate of s1+s3->s2+s4"}, {"k2", 1.0, "rate of s1->s2"}, {"k3", 1.0, "rate of s3->s4"}},
              energies({{"E1", 0.0}, {"E2", 0.4}, {"E3", -0.3}, {"E4", 0.2}}))},
      {"segel-goldbeter", "receptor/ligand network over R, D, X=[LR], Y=[LD], L",
       {{"kr", 2.0, "L+R->X"},
        {"kmr", 1.0, "X->L+R"},
        {"kd", 1.0, "L+D->Y"},
        {"kmd", 2.0, "Y->L+D"},
        {"k1", 1.0, "R->D"},
        {"km1", 1.0, "D->R"},
        {"k2", 1.0, "X->Y"},
        {"km2", 4.0, "Y->X"}}},
      {"gene-expression", "s1+s2<->s3, s2<->0, s3<->s4, s4+s5<->s6, s5<->0, s2<->s5; delta measures lack of balance",
       concat(concat({{"k1", 1.0, ""}, {"k2", 1.0, ""}, {"k3", 1.0, ""}, {"k4", 1.0, ""}, {"k5", 1.0, ""}, {"k6", 1.0, ""}},
                     energies({{"E1", 0.0}, {"E2", 0.0}, {"E3", 0.0}, {"E4", 0.0}, {"E5", 0.0}, {"E6", 0.0}})),
              {{"delta", 0.0, "log(K(-R)/K(R)) - sum R E, same for every reaction", false}})},
      {"gene-expression-completion", "gene-expression network with sources and sinks replaced by s7..s10",
       concat({{"k1", 1.0, ""}, {"k2", 1.0, ""}, {"k3", 1.0, ""}, {"k4", 1.0, ""}, {"k5", 1.0, ""}, {"k6", 1.0, ""}},
              energies({{"E1", 0.0}, {"E2", 0.1}, {"E3", -0.2}, {"E4", 0.3}, {"E5", 0.0}, {"E6", -0.1},
                        {"E7", 0.2}, {"E8", 0.0}, {"E9", -0.3}, {"E10", 0.1}}))},
      {"open-exchange", "s1<->s2, s2+s3<->s4, s3<->0; product s3 is outside every conservation law",
       concat({{"k1", 1.0, ""}, {"k2", 1.0, ""}, {"k3", 1.0, ""}},
              energies({{"E1", 0.0}, {"E2", 0.2}, {"E3", 0.0}, {"E4", -0.1}}))},
      {"pairing-balance", "S<->X+A, P<->X+B, X<->A+B; default energies make the S/P pairing vanish",
       concat({{"k1", 1.0, ""}, {"k2", 1.0, ""}, {"k3", 1.0, ""}},
              energies({{"ES", 0.0}, {"EP", 0.0}, {"EX", -std::log(4.0)}, {"EA", 0.0}, {"EB", 0.0}}))},
      {"bl-linear", "dX/dt = Y - (1-c) X + f, dY/dt = 1 - c X", {{"c", 0.5, "feedback strength"}}},
      {"bl-mass-action", "enzymatic network behind the linear receptor model",
       {{"k1", 1e5, "E+Y->yE"},
        {"km1", 100.0, "yE->E+Y"},
        {"k2", 100.0, "yE+X->xyE"},
        {"km2", 1e5, "xyE->yE+X"},
        {"lambda", 1e3, "xyE->E+P"},
        {"C0", 1.0, "enzyme total"},
        {"X0", 1.0, "initial X"},
        {"Y0", 1.0, "initial Y"}}},
  };
  return models;
}

const Registry& lookup(const std::string& id) {
  for (const auto& m : registry()) {
    if (m.id == id) return m;
  }
  throw UnknownModel("unknown model '" + id + "'");
}

std::vector<ParamSpec> resolve(const Registry& reg, const ParamMap& params) {
  std::vector<ParamSpec> out = reg.params;
  for (const auto& [name, value] : params) {
    auto it = std::find_if(out.begin(), out.end(), [&](const ParamSpec& p) { return p.name == name; });
    if (it == out.end()) throw InvalidParams("model '" + reg.id + "' has no parameter '" + name + "'");
    if (!std::isfinite(value) || (it->positive && !(value > 0.0))) {
      throw InvalidParams("parameter '" + name + "' must be " + (it->positive ? "positive" : "finite"));
    }
    it->value = value;
  }
  return out;
}

double get(const std::vector<ParamSpec>& ps, const std::string& name) {
  for (const auto& p : ps) {
    if (p.name == name) return p.value;
  }
  throw InvalidParams("missing parameter '" + name + "'");
}

NetworkDocument build_document(const std::string& id, const std::vector<ParamSpec>& ps) {
  Text t;
  auto P = [&](const char* n) { return get(ps, n); };
  if (id == "example-3.2") {
    const double a = P("alpha"), f0 = P("f0");
    t.out << species_line({"s1", "s2", "s3", "s4"});
    t.pair({"s1"}, {"s2"}, 1.0, a);
    t.pair({"s1"}, {"s3"}, 1.0, a);
    t.pair({"s2"}, {"s3", "s4"}, 1.0, 1.0);
    t.out << "signal: s1\nproduct: s4\n";
    t.out << "init: s1=" << num(f0) << ", s2=" << num(f0 / a) << ", s3=" << num(f0 / a) << ", s4=1\n";
  } else if (id == "two-step") {
    const std::vector<std::string> sp{"s1", "s2", "s3", "s4"};
    for (int i = 0; i < 4; ++i) t.energy[sp[i]] = P(("E" + std::to_string(i + 1)).c_str());
    t.out << species_line(sp);
    t.db_pair({"s2", "s3"}, {"s1"}, P("K1"));
    t.db_pair({"s3", "s4"}, {"s2"}, P("K2"));
    t.out << "signal: s1\nproduct: s4\n";
    t.init_from_energy(sp);
  } else if (id == "m-disconnection") {
    const std::vector<std::string> sp{"s1", "s2", "s3", "s4"};
    for (int i = 0; i < 4; ++i) t.energy[sp[i]] = P(("E" + std::to_string(i + 1)).c_str());
    t.out << species_line(sp);
    t.db_pair({"s1", "s3"}, {"s2", "s4"}, P("k1"));
    t.db_pair({"s1"}, {"s2"}, P("k2"));
    t.db_pair({"s3"}, {"s4"}, P("k3"));
    t.out << "signal: s1\nproduct: s4\n";
    t.init_from_energy(sp);
  } else if (id == "segel-goldbeter") {
    t.out << species_line({"R", "D", "X", "Y", "L"});
    t.pair({"L", "R"}, {"X"}, P("kr"), P("kmr"));
    t.pair({"L", "D"}, {"Y"}, P("kd"), P("kmd"));
    t.pair({"R"}, {"D"}, P("k1"), P("km1"));
    t.pair({"X"}, {"Y"}, P("k2"), P("km2"));
    t.out << "signal: L\nproduct: X\n";
    auto doc = parse_network(t.out.str());
    auto cert = check_detailed_balance(doc.system);
    if (cert.holds) {
      Vector z = equilibrium_state(*cert.energy);
      doc.initial_state = std::vector<double>(z.data(), z.data() + z.size());
    }
    return doc;
  } else if (id == "gene-expression") {
    const std::vector<std::string> sp{"s1", "s2", "s3", "s4", "s5", "s6"};
    for (int i = 0; i < 6; ++i) t.energy[sp[i]] = P(("E" + std::to_string(i + 1)).c_str());
    const double d = P("delta");
    t.out << species_line(sp);
    t.db_pair({"s1", "s2"}, {"s3"}, P("k1"), d);
    t.db_pair({"s2"}, {}, P("k2"), d);
    t.db_pair({"s3"}, {"s4"}, P("k3"), d);
    t.db_pair({"s4", "s5"}, {"s6"}, P("k4"), d);
    t.db_pair({"s5"}, {}, P("k5"), d);
    t.db_pair({"s2"}, {"s5"}, P("k6"), d);
    t.out << "signal: s1\nproduct: s4\n";
    t.init_from_energy(sp);
  } else if (id == "gene-expression-completion") {
    std::vector<std::string> sp;
    for (int i = 1; i <= 10; ++i) sp.push_back("s" + std::to_string(i));
    for (int i = 0; i < 10; ++i) t.energy[sp[i]] = P(("E" + std::to_string(i + 1)).c_str());
    t.out << species_line(sp);
    t.db_pair({"s1", "s2"}, {"s3"}, P("k1"));
    t.db_pair({"s2", "s7"}, {"s8"}, P("k2"));
    t.db_pair({"s3"}, {"s4"}, P("k3"));
    t.db_pair({"s4", "s5"}, {"s6"}, P("k4"));
    t.db_pair({"s5", "s9"}, {"s10"}, P("k5"));
    t.db_pair({"s2"}, {"s5"}, P("k6"));
    t.out << "signal: s1\nproduct: s4\n";
    t.init_from_energy(sp);
  } else if (id == "open-exchange") {
    const std::vector<std::string> sp{"s1", "s2", "s3", "s4"};
    for (int i = 0; i < 4; ++i) t.energy[sp[i]] = P(("E" + std::to_string(i + 1)).c_str());
    t.out << species_line(sp);
    t.db_pair({"s1"}, {"s2"}, P("k1"));
    t.db_pair({"s2", "s3"}, {"s4"}, P("k2"));
    t.db_pair({"s3"}, {}, P("k3"));
    t.out << "signal: s1\nproduct: s3\n";
    t.init_from_energy(sp);
  } else if (id == "pairing-balance") {
    const std::vector<std::string> sp{"S", "P", "X", "A", "B"};
    for (const auto& s : sp) t.energy[s] = P(("E" + s).c_str());
    t.out << species_line(sp);
    t.db_pair({"S"}, {"X", "A"}, P("k1"));
    t.db_pair({"P"}, {"X", "B"}, P("k2"));
    t.db_pair({"X"}, {"A", "B"}, P("k3"));
    t.out << "signal: S\nproduct: P\n";
    t.init_from_energy(sp);
  } else if (id == "bl-mass-action") {
    BlParams bp{P("k1"), P("km1"), P("k2"), P("km2"), P("lambda"), P("C0")};
    return bl_mass_action(bp, P("X0"), P("Y0"));
  } else {
    throw UnknownModel("model '" + id + "' has no network document");
  }
  return parse_network(t.out.str());
}

}  // namespace

double BuiltinModel::param(const std::string& name) const { return get(params, name); }

std::vector<std::string> builtin_ids() {
  std::vector<std::string> out;
  for (const auto& m : registry()) out.push_back(m.id);
  return out;
}

std::vector<ParamSpec> builtin_params(const std::string& id) { return lookup(id).params; }

BuiltinModel builtin(const std::string& id, const ParamMap& params) {
  const auto& reg = lookup(id);
  BuiltinModel m;
  m.id = reg.id;
  m.description = reg.description;
  m.params = resolve(reg, params);
  if (id == "bl-linear") {
    m.custom = bl_linear(get(m.params, "c"));
  } else {
    m.document = build_document(id, m.params);
  }
  return m;
}

CustomRhsModel bl_linear(double c) {
  if (!(c > 0.0)) throw InvalidParams("c must be positive");
  CustomRhsModel m;
  m.state_names = {"X", "Y"};
  m.rhs = [c](double, const Vector& y, double f, Vector& dy) {
    dy.resize(2);
    dy(0) = y(1) - (1.0 - c) * y(0) + f;
    dy(1) = 1.0 - c * y(0);
  };
  m.initial_state = Vector::Zero(2);
  return m;
}

NetworkDocument bl_mass_action(const BlParams& p, double x0, double y0) {
  for (double v : {p.k1, p.km1, p.k2, p.km2, p.lambda, p.c0}) {
    if (!(v > 0.0)) throw InvalidParams("bl_mass_action parameters must be positive");
  }
  Text t;
  t.out << species_line({"X", "Y", "S", "E", "yE", "xyE", "P"});
  t.one_way({"X"}, {}, 1.0);
  t.one_way({"Y"}, {"X"}, 1.0);
  t.one_way({"S"}, {"X"}, 1.0);
  t.one_way({}, {"Y"}, 1.0);
  t.pair({"E", "Y"}, {"yE"}, p.k1, p.km1);
  t.pair({"yE", "X"}, {"xyE"}, p.k2, p.km2);
  t.one_way({"xyE"}, {"E", "P"}, p.lambda);
  t.out << "signal: S\nproduct: P\n";
  // Enzyme distribution at the fast-reaction equilibrium for (x0, y0).
  const double a1 = p.k1 / p.km1, a2 = p.k2 / p.km2;
  const double e = p.c0 / (1.0 + a1 * y0 + a1 * a2 * x0 * y0);
  t.out << "init: X=" << num(x0) << ", Y=" << num(y0) << ", S=1, E=" << num(e) << ", yE=" << num(a1 * e * y0)
        << ", xyE=" << num(a1 * a2 * e * x0 * y0) << ", P=0\n";
  return parse_network(t.out.str());
}

CustomTrajectory simulate_custom(const CustomRhsModel& model, const Vector& y0, const std::function<double(double)>& f,
                                 const SimulationConfig& config) {
  OdeProblem problem;
  problem.rhs = [&](double t, const Vector& y, Vector& dy) { model.rhs(t, y, f(t), dy); };
  problem.nonnegative.assign(static_cast<std::size_t>(y0.size()), false);
  OdeSolution sol = integrate(problem, 0.0, y0, config);
  return {sol.t, sol.y, sol.steady};
}

namespace {

double sample(const std::vector<double>& t, const std::vector<double>& v, double at) {
  auto it = std::lower_bound(t.begin(), t.end(), at);
  if (it == t.begin()) return v.front();
  if (it == t.end()) return v.back();
  std::size_t k = static_cast<std::size_t>(it - t.begin());
  double w = (at - t[k - 1]) / (t[k] - t[k - 1]);
  return v[k - 1] + w * (v[k] - v[k - 1]);
}

}  // namespace

QssReport qss_reduce_bl(const BlParams& p, double f, double horizon) {
  QssReport rep;
  rep.horizon = horizon;
  const double a1 = p.k1 / p.km1, a2 = p.k2 / p.km2;
  rep.c = p.lambda * a2 * p.c0;
  if (a1 < 100.0) rep.warnings.push_back("k1/km1 is not large: E + Y <-> yE is not saturated");
  if (a2 > 1e-2) rep.warnings.push_back("k2/km2 is not small");
  if (rep.c < 0.1 || rep.c > 10.0) rep.warnings.push_back("lambda * k2/km2 * C0 is far from 1");
  if (p.k1 < 1e3 * p.lambda * a2 || p.km2 < 1e3) rep.warnings.push_back("enzyme binding is not fast");

  const double c = rep.c;
  rep.reduced.state_names = {"X", "Y", "P"};
  rep.reduced.rhs = [c](double, const Vector& y, double in, Vector& dy) {
    dy.resize(3);
    dy(0) = y(1) - (1.0 + c) * y(0) + in;
    dy(1) = 1.0 - y(1) - c * y(0);
    dy(2) = c * y(0);
  };
  rep.reduced.initial_state = Vector::Ones(3);
  rep.reduced.initial_state(2) = 0.0;

  const NetworkDocument doc = bl_mass_action(p, 1.0, 1.0);
  const auto& init = *doc.initial_state;
  Vector n0 = Eigen::Map<const Vector>(init.data(), static_cast<Eigen::Index>(init.size()));
  n0(2) = f;

  SimulationConfig cfg;
  cfg.t_max = horizon;
  cfg.detect_steady = false;
  cfg.method = Method::implicit_euler;
  cfg.rel_tol = 1e-7;
  cfg.abs_tol = 1e-12;
  Trajectory full = simulate_signalling(doc.system, n0, 2, Signal{f, f, 1.0}, cfg);

  SimulationConfig rcfg;
  rcfg.t_max = horizon;
  rcfg.detect_steady = false;
  CustomTrajectory red = simulate_custom(rep.reduced, rep.reduced.initial_state, [f](double) { return f; }, rcfg);

  std::vector<double> pf, pr;
  for (const auto& s : full.states) pf.push_back(s(6));
  for (const auto& s : red.states) pr.push_back(s(2));
  double pmax = 0.0, diff = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    double at = horizon * k / 1000.0;
    double a = sample(full.times, pf, at), b = sample(red.times, pr, at);
    pmax = std::max(pmax, std::abs(a));
    diff = std::max(diff, std::abs(a - b));
  }
  rep.p_rel_error = pmax > 0.0 ? diff / pmax : diff;

  for (std::size_t k = 0; k < full.size(); ++k) {
    const Vector& s = full.states[k];
    rep.enzyme_drift = std::max(rep.enzyme_drift, std::abs(s(3) + s(4) + s(5) - p.c0));
    if (full.times[k] >= 5.0) {
      double qss = a1 * s(3) * s(1);
      rep.yE_rel_error = std::max(rep.yE_rel_error, std::abs(s(4) - qss) / qss);
    }
  }
  return rep;
}

CompletionReport verify_completion_claims(std::uint64_t seed, std::size_t trials) {
  CompletionReport rep;
  const auto model = builtin("gene-expression-completion");
  const auto& sys = model.document->system;
  const auto& net = sys.network();
  rep.species = net.num_species();
  rep.cycle_dim = cycle_space(net).size();
  rep.conservation_basis = conservation_space(net);
  rep.conservation_dim = rep.conservation_basis.size();
  rep.conservative = is_conservative(net);
  rep.claimed = {1, 3, 2, 2, 3, 5, 4, 1, 4};
  rep.length_mismatch = rep.claimed.size() != rep.species;

  if (rep.claimed.size() + 1 == rep.species) {
    for (std::size_t k = 0; k < rep.species; ++k) {
      std::vector<Rational> v;
      for (std::size_t i = 0, j = 0; i < rep.species; ++i) v.push_back(i == k ? Rational(0) : Rational(rep.claimed[j++]));
      std::optional<Rational> x;
      bool ok = true;
      for (const auto& R : net.reactions()) {
        Rational a = 0;
        for (std::size_t i = 0; i < rep.species; ++i) a += v[i] * R[i];
        if (R[k] == 0) {
          if (a != 0) ok = false;
        } else {
          Rational needed = -a / R[k];
          if (x && *x != needed) ok = false;
          x = needed;
        }
        if (!ok) break;
      }
      if (ok) rep.consistent_insertions.emplace_back(k, x.value_or(Rational(0)));
    }
  } else if (rep.claimed.size() == rep.species) {
    if (in_span(rep.conservation_basis, to_rational(rep.claimed))) rep.consistent_insertions.emplace_back(rep.species, 0);
  }

  Rng rng(seed);
  for (std::size_t k = 0; k < trials; ++k) {
    KineticSystem s = sys.with_rates(random_rates(net, rng, 1.0));
    ++rep.db_trials;
    if (check_detailed_balance(s).holds) ++rep.db_passed;
  }

  std::ostringstream msg;
  msg << "cycle space dimension " << rep.cycle_dim << "; conservation space dimension " << rep.conservation_dim
      << "; claimed vector has " << rep.claimed.size() << " entries for " << rep.species << " species";
  if (rep.consistent_insertions.empty()) {
    msg << "; no single missing entry makes it a conservation law";
  } else {
    msg << "; consistent after inserting";
    for (const auto& [k, x] : rep.consistent_insertions) msg << " " << x.get_str() << " at position " << k + 1;
  }
  msg << "; detailed balance held for " << rep.db_passed << "/" << rep.db_trials << " random rate draws";
  rep.summary = msg.str();
  return rep;
}

RandomDb random_db_rates(const ReactionNetwork& network, Rng& rng, double energy_spread, double log_spread) {
  RandomDb out;
  out.energy.resize(static_cast<Eigen::Index>(network.num_species()));
  for (Eigen::Index i = 0; i < out.energy.size(); ++i) out.energy(i) = uniform(rng, -energy_spread, energy_spread);
  std::vector<double> forward;
  for (std::size_t k = 0; k < canonical_half(network).size(); ++k) {
    forward.push_back(std::pow(10.0, uniform(rng, -log_spread, log_spread)));
  }
  out.rates = make_db_rates(network, out.energy, forward);
  return out;
}

RateFunction random_rates(const ReactionNetwork& network, Rng& rng, double log_spread) {
  RateFunction r(network.num_reactions());
  for (auto& k : r) k = std::pow(10.0, uniform(rng, -log_spread, log_spread));
  return r;
}

ReactionNetwork random_connected_network(Rng& rng, std::size_t n) {
  if (n < 2) throw InvalidParams("random networks need at least two species");
  auto pick = [&](std::size_t bound) { return static_cast<std::size_t>(rng() % bound); };
  std::set<Stoich> seen;
  std::vector<Reaction> out;
  auto add = [&](const std::vector<std::size_t>& lhs, const std::vector<std::size_t>& rhs) {
    Stoich s(n, 0);
    for (std::size_t i : lhs) s[i] -= 1;
    for (std::size_t i : rhs) {
      for (std::size_t j : lhs) {
        if (i == j) return false;
      }
      s[i] += 1;
    }
    Stoich neg(n);
    std::transform(s.begin(), s.end(), neg.begin(), [](int v) { return -v; });
    if (std::all_of(s.begin(), s.end(), [](int v) { return v == 0; })) return false;
    if (seen.count(s) || seen.count(neg)) return false;
    seen.insert(s);
    seen.insert(neg);
    out.emplace_back(s);
    out.emplace_back(neg);
    return true;
  };

  for (std::size_t k = 1; k < n; ++k) {
    for (int attempt = 0;; ++attempt) {
      std::size_t p = pick(k);
      std::size_t q = pick(n);
      bool ok = false;
      switch (attempt < 20 ? pick(3) : 0) {
        case 0: ok = add({p}, {k}); break;
        case 1: ok = q != k && add({p, q}, {k}); break;
        default: ok = q != p && add({p}, {k, q}); break;
      }
      if (ok) break;
    }
  }
  std::size_t extra = pick(3);
  for (std::size_t e = 0, tries = 0; e < extra && tries < 50; ++tries) {
    std::vector<std::size_t> lhs{pick(n)}, rhs{pick(n)};
    if (pick(2)) lhs.push_back(pick(n));
    if (pick(2)) rhs.push_back(pick(n));
    if (add(lhs, rhs)) ++e;
  }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("s" + std::to_string(i + 1));
  return ReactionNetwork(std::move(names), std::move(out));
}

}  // namespace crn
