#include "crn/dynamics.hpp"

#include <cmath>

#include "crn/error.hpp"

namespace crn {

namespace {

double monomial(const Reaction& R, const Vector& n, int sign) {
  double p = 1.0;
  for (std::size_t i = 0; i < R.size(); ++i) {
    int a = sign * R[i];
    for (int k = 0; k < a; ++k) p *= n(static_cast<Eigen::Index>(i));
  }
  return p;
}

void require_length(const KineticSystem& system, const Vector& n) {
  if (static_cast<std::size_t>(n.size()) != system.num_species()) {
    throw InvalidParams("state length does not match species count");
  }
}

}  // namespace

double propensity(const KineticSystem& system, std::size_t r, const Vector& n) {
  return system.rate(r) * monomial(system.network().reaction(r), n, -1);
}

double reaction_flux(const KineticSystem& system, std::size_t r, const Vector& n) {
  double j = propensity(system, r, n);
  if (auto rev = system.network().reverse_of(r)) j -= propensity(system, *rev, n);
  return j;
}

Vector rhs(const KineticSystem& system, const Vector& n) {
  require_length(system, n);
  const auto& net = system.network();
  Vector dn = Vector::Zero(n.size());
  for (std::size_t r = 0; r < net.num_reactions(); ++r) {
    const auto& R = net.reaction(r);
    double k = propensity(system, r, n);
    for (std::size_t i = 0; i < R.size(); ++i) {
      if (R[i] != 0) dn(static_cast<Eigen::Index>(i)) += R[i] * k;
    }
  }
  return dn;
}

Vector rhs_flux_form(const KineticSystem& system, const Vector& n) {
  require_length(system, n);
  const auto& net = system.network();
  if (!is_bidirectional(net)) throw NotBidirectional("flux form needs a bidirectional system");
  Vector dn = Vector::Zero(n.size());
  for (std::size_t r : canonical_half(net)) {
    const auto& R = net.reaction(r);
    double j = reaction_flux(system, r, n);
    for (std::size_t i = 0; i < R.size(); ++i) {
      if (R[i] != 0) dn(static_cast<Eigen::Index>(i)) += R[i] * j;
    }
  }
  return dn;
}

Matrix rhs_jacobian(const KineticSystem& system, const Vector& n) {
  require_length(system, n);
  const auto& net = system.network();
  const Eigen::Index N = n.size();
  Matrix jac = Matrix::Zero(N, N);
  for (std::size_t r = 0; r < net.num_reactions(); ++r) {
    const auto& R = net.reaction(r);
    for (std::size_t j : R.initial()) {
      // d/dn_j of n_j^a times the remaining factors
      double d = system.rate(r) * (-R[j]);
      for (std::size_t i = 0; i < R.size(); ++i) {
        int a = -R[i];
        if (a <= 0) continue;
        if (i == j) a -= 1;
        for (int k = 0; k < a; ++k) d *= n(static_cast<Eigen::Index>(i));
      }
      for (std::size_t i = 0; i < R.size(); ++i) {
        if (R[i] != 0) jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += R[i] * d;
      }
    }
  }
  return jac;
}

double Signal::value(double t) const { return f_inf - (f_inf - f0) * std::exp(-r * t); }

double Signal::derivative(double t) const { return r * (f_inf - f0) * std::exp(-r * t); }

Signal make_admissible_signal(double f0, double f_inf, double r, bool* warning) {
  if (!(f0 > 0.0) || !(f_inf > 0.0) || !(r > 0.0)) throw InvalidParams("signal parameters must be positive");
  Signal s{f0, f_inf, r};
  // |f'/f| = r|f_inf - f0| e^{-rt} / f(t) and f(t) >= min(f0, f_inf).
  if (warning) *warning = !(r * std::abs(f_inf - f0) < std::min(f0, f_inf));
  return s;
}

SignalCheck validate_signal(const Signal& signal, double horizon) {
  if (!(horizon > 0.0)) throw InvalidParams("horizon must be positive");
  SignalCheck out;
  out.admissible = signal.f0 > 0.0 && signal.f_inf > 0.0 && signal.r > 0.0;
  const int samples = 4000;
  for (int k = 0; k <= samples && out.admissible; ++k) {
    double t = horizon * k / samples;
    double lhs = std::abs(signal.derivative(t) / signal.value(t));
    if (!(lhs < std::exp(-signal.r * t)) && lhs != 0.0) out.admissible = false;
  }
  if (!signal.constant()) {
    double t0 = 1e-6 / signal.r;
    double s1 = (signal.value(t0) - signal.f0) / t0;
    double s2 = (signal.value(t0 / 10) - signal.f0) / (t0 / 10);
    double slope = signal.r * (signal.f_inf - signal.f0);
    out.linear_at_zero = std::isfinite(s1) && s1 != 0.0 && std::abs(s1 / s2 - 1.0) < 1e-3 &&
                         std::abs(s2 / slope - 1.0) < 1e-3;
  }
  return out;
}

namespace {

Trajectory from_solution(const OdeSolution& sol) {
  Trajectory tr;
  tr.times = sol.t;
  tr.states = sol.y;
  tr.ext_flux.assign(sol.t.size(), 0.0);
  tr.cumulative_flux.assign(sol.t.size(), 0.0);
  tr.steady = sol.steady;
  tr.used_implicit = sol.used_implicit;
  return tr;
}

}  // namespace

Trajectory simulate_kinetic(const KineticSystem& system, const Vector& n0, const SimulationConfig& config) {
  require_length(system, n0);
  if ((n0.array() < 0.0).any()) throw InvalidParams("initial state must be nonnegative");
  OdeProblem problem;
  problem.rhs = [&system](double, const Vector& y, Vector& dy) { dy = rhs(system, y); };
  problem.jacobian = [&system](double, const Vector& y, Matrix& j) { j = rhs_jacobian(system, y); };
  return from_solution(integrate(problem, 0.0, n0, config));
}

Trajectory simulate_signalling(const KineticSystem& system, const Vector& n0, std::size_t signal,
                               const Signal& f, const SimulationConfig& config) {
  require_length(system, n0);
  const Eigen::Index N = n0.size();
  const auto s = static_cast<Eigen::Index>(signal);
  if (s >= N) throw InvalidParams("signal index out of range");
  if ((n0.array() < 0.0).any()) throw InvalidParams("initial state must be nonnegative");
  if (std::abs(n0(s) - f.f0) > 1e-12 * std::max(1.0, f.f0)) {
    throw InvalidParams("initial signal concentration must equal f(0)");
  }

  // y = (n without the signal species, -int_0^t (dn/dt)_signal); the f(t) - f0
  // part of the cumulative flux is added analytically.
  auto expand = [=](double t, const Vector& y) {
    Vector n(N);
    for (Eigen::Index i = 0, k = 0; i < N; ++i) n(i) = (i == s) ? f.value(t) : y(k++);
    return n;
  };
  Vector y0(N);
  for (Eigen::Index i = 0, k = 0; i < N; ++i) {
    if (i != s) y0(k++) = n0(i);
  }
  y0(N - 1) = 0.0;

  OdeProblem problem;
  problem.rhs = [&, expand](double t, const Vector& y, Vector& dy) {
    Vector dn = rhs(system, expand(t, y));
    dy.resize(N);
    for (Eigen::Index i = 0, k = 0; i < N; ++i) {
      if (i != s) dy(k++) = dn(i);
    }
    dy(N - 1) = -dn(s);
  };
  problem.jacobian = [&, expand](double t, const Vector& y, Matrix& jac) {
    Matrix full = rhs_jacobian(system, expand(t, y));
    jac = Matrix::Zero(N, N);
    for (Eigen::Index i = 0, a = 0; i < N; ++i) {
      if (i == s) continue;
      for (Eigen::Index j = 0, b = 0; j < N; ++j) {
        if (j == s) continue;
        jac(a, b) = full(i, j);
        jac(N - 1, b) = -full(s, j);
        ++b;
      }
      ++a;
    }
  };
  problem.steady = [&f](double t, const Vector&, const Vector& dy) {
    return std::max(dy.lpNorm<Eigen::Infinity>(), std::abs(f.derivative(t)));
  };
  problem.nonnegative.assign(static_cast<std::size_t>(N), true);
  problem.nonnegative.back() = false;

  OdeSolution sol = integrate(problem, 0.0, y0, config);
  Trajectory tr;
  tr.signal = signal;
  tr.steady = sol.steady;
  tr.used_implicit = sol.used_implicit;
  for (std::size_t k = 0; k < sol.t.size(); ++k) {
    const double t = sol.t[k];
    Vector n = expand(t, sol.y[k]);
    tr.times.push_back(t);
    tr.ext_flux.push_back(f.derivative(t) - rhs(system, n)(s));
    tr.cumulative_flux.push_back(f.value(t) - f.f0 + sol.y[k](N - 1));
    tr.states.push_back(std::move(n));
  }
  return tr;
}

double relative_entropy(const Vector& n, const Vector& n_ref, std::optional<std::size_t> skip) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n.size(); ++j) {
    if (skip && static_cast<std::size_t>(j) == *skip) continue;
    double v = n(j);
    acc += v > 0.0 ? v * (std::log(v / n_ref(j)) - 1.0) : 0.0;
  }
  return acc;
}

double dissipation(const KineticSystem& system, const Vector& n, const Vector& n_ref) {
  const auto& net = system.network();
  double acc = 0.0;
  for (std::size_t r : canonical_half(net)) {
    const auto& R = net.reaction(r);
    double log_q = 0.0;
    for (std::size_t j = 0; j < R.size(); ++j) {
      if (R[j] == 0) continue;
      auto i = static_cast<Eigen::Index>(j);
      log_q += R[j] * (std::log(n(i)) - std::log(n_ref(i)));
    }
    acc += reaction_flux(system, r, n) * log_q;
  }
  return acc;
}

Vector reference_energy(const Vector& e0, const Vector& law, std::size_t signal, double value) {
  const auto s = static_cast<Eigen::Index>(signal);
  if (law(s) == 0.0) throw PreconditionFailed("conservation law does not touch the signal species");
  return e0 + law * ((-e0(s) - std::log(value)) / law(s));
}

LimitPrediction predict_limit(const KineticSystem& system, const Vector& n0, std::size_t signal, double f_inf,
                              const NewtonOptions& options) {
  require_length(system, n0);
  if (!(f_inf > 0.0)) throw InvalidParams("f_inf must be positive");
  const auto cert = check_detailed_balance(system);
  if (!cert.holds) throw PreconditionFailed("predict_limit needs a detailed-balance system");
  const Vector& e0 = *cert.energy;
  const Matrix M = conservation_matrix(system.network());
  const auto s = static_cast<Eigen::Index>(signal);
  const Eigen::Index K = M.rows();
  if (K == 0 || (M.col(s).array() == 0.0).all()) {
    throw PreconditionFailed("no conservation law touches the signal species");
  }
  const Vector totals0 = M * n0;

  // x = (eta, Jbar)
  auto residual = [&](const Vector& x) {
    Vector e = e0 + M.transpose() * x.head(K);
    Vector z = equilibrium_state(e);
    Vector g(K + 1);
    g.head(K) = M * z - totals0 - M.col(s) * x(K);
    g(K) = e(s) + std::log(f_inf);
    return g;
  };

  Vector x = Vector::Zero(K + 1);
  Vector g = residual(x);
  const double tol = options.tol * (1.0 + totals0.lpNorm<Eigen::Infinity>() + std::abs(std::log(f_inf)));
  for (std::size_t it = 0; it < options.max_iterations && g.lpNorm<Eigen::Infinity>() > tol; ++it) {
    Vector z = equilibrium_state(e0 + M.transpose() * x.head(K));
    Matrix jac = Matrix::Zero(K + 1, K + 1);
    jac.topLeftCorner(K, K) = -(M * z.asDiagonal() * M.transpose());
    jac.topRightCorner(K, 1) = -M.col(s);
    jac.bottomLeftCorner(1, K) = M.col(s).transpose();
    Vector step = jac.fullPivLu().solve(-g);
    double norm = g.lpNorm<Eigen::Infinity>();
    double scale = 1.0;
    bool improved = false;
    for (std::size_t h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
      Vector trial = x + scale * step;
      Vector gt = residual(trial);
      if (gt.allFinite() && gt.lpNorm<Eigen::Infinity>() < norm) {
        x = std::move(trial);
        g = std::move(gt);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (!(g.lpNorm<Eigen::Infinity>() <= tol)) throw NoConvergence("predict_limit: Newton iteration did not converge");

  LimitPrediction out;
  out.energy = e0 + M.transpose() * x.head(K);
  out.state = equilibrium_state(out.energy);
  out.cumulative_flux = x(K);
  return out;
}

}  // namespace crn
