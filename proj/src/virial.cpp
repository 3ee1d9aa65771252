#include "ibnls/virial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ibnls/error.hpp"

namespace ibnls {

namespace {

double binom(int n, int m) {
  double c = 1.0;
  for (int i = 0; i < m; ++i) c = c * (n - i) / (i + 1);
  return c;
}

struct RadialData {
  double a_phi, c_phi, a_lap, c_lap, lap, lap2, lap3;
};

// Radial Laplacian jets of phi_R at r > R.
RadialData radial_data(const CutoffSpec& spec, int N, double r) {
  const auto p = spec.phi_jet(r);
  std::array<double, 5> inv{};
  double f = 1.0 / r;
  for (int n = 0; n < 5; ++n) {
    inv[n] = f;
    f *= -(n + 1) / r;
  }
  std::array<double, 5> g{}, L1{};
  for (int n = 0; n <= 4; ++n) {
    for (int m = 0; m <= n; ++m) g[n] += binom(n, m) * p[1 + m] * inv[n - m];
    L1[n] = (n + 2 <= 6 ? p[2 + n] : 0.0) + (N - 1) * g[n];
  }
  std::array<double, 3> h{}, L2{};
  for (int n = 0; n <= 2; ++n) {
    for (int m = 0; m <= n; ++m) h[n] += binom(n, m) * L1[1 + m] * inv[n - m];
    L2[n] = L1[2 + n] + (N - 1) * h[n];
  }
  RadialData d;
  d.a_phi = g[0];
  d.c_phi = (p[2] - g[0]) / (r * r);
  d.a_lap = h[0];
  d.c_lap = (L1[2] - h[0]) / (r * r);
  d.lap = L1[0];
  d.lap2 = L2[0];
  d.lap3 = L2[2] + (N - 1) * L2[1] / r;
  return d;
}

}  // namespace

CartesianCutoff CartesianCutoff::build(GridPtr grid, const CutoffSpec& spec,
                                       const ModelParams& params, int oversample) {
  if (oversample < 1) throw Error(ErrorKind::ConfigInvalid, "oversample must be >= 1");
  CartesianCutoff c;
  c.grid = grid;
  c.oversample = oversample;
  c.R = spec.R;
  const int N = grid->dimension();
  if (oversample == 1) {
    c.quad = grid;
  } else {
    GridSpec fs = grid->spec();
    fs.points *= oversample;
    c.quad = Grid::build(fs);
  }

  const std::size_t nq = c.quad->size();
  c.a_phi.assign(nq, 2.0);
  c.c_phi.assign(nq, 0.0);
  ComplexField phi(c.quad);
  const auto rq = c.quad->radius();
  for (std::size_t i = 0; i < nq; ++i) {
    phi[i] = spec.phi_jet(rq[i])[0];
    if (rq[i] <= spec.R) continue;
    const auto d = radial_data(spec, N, rq[i]);
    c.a_phi[i] = d.a_phi;
    c.c_phi[i] = d.c_phi;
  }
  phi.to_spectral();
  c.phi_hat.assign(phi.values().begin(), phi.values().end());

  const std::size_t n = grid->size();
  c.lap.assign(n, 2.0 * N);
  c.phi2.assign(n, 0.0);
  c.grad_dot_weight.assign(n, 0.0);
  const auto r = grid->radius();
  const double eps2 = params.epsilon * params.epsilon;
  const auto w = singular_weight(*grid, params);
  for (std::size_t i = 0; i < n; ++i) {
    double a = 2.0;
    if (r[i] > spec.R) {
      const auto d = radial_data(spec, N, r[i]);
      a = d.a_phi;
      c.lap[i] = d.lap;
      c.phi2[i] = Phi2(spec, N, params.b, r[i]);
    }
    const double r2 = r[i] * r[i];
    c.grad_dot_weight[i] = -params.b * w[i] * a * r2 / (r2 + eps2);
  }
  return c;
}

std::string VirialVariant::label() const {
  std::string s = "factor=" + format_double(factor);
  s += nu_term_sign < 0 ? ",nu_term=-" : ",nu_term=+";
  s += printed_last_exponent ? ",last_exp=printed" : ",last_exp=(8-2b)/N+2";
  return s;
}

std::vector<VirialVariant> virial_candidates() {
  std::vector<VirialVariant> out;
  for (double f : {2.0, 1.0})
    for (double s : {-1.0, 1.0})
      for (bool p : {false, true}) out.push_back({f, s, p});
  return out;
}

namespace {

struct Derivs {
  ComplexField u;
  std::vector<ComplexField> grad;
  std::vector<ComplexField> hess;  // row-major N x N, symmetric entries shared
  ComplexField lap;
};

// u and its derivatives up to order 2 on the quadrature grid.
Derivs derivatives(const ComplexField& u, const GridPtr& quad, bool with_hessian) {
  const int N = u.grid().dimension();
  const ComplexField uh = forward_transform(u);
  const bool same = quad.get() == &u.grid();
  auto place = [&](const ComplexField& spectral) {
    return same ? inverse_transform(spectral) : resample(spectral, quad);
  };
  Derivs d{place(uh), {}, {}, ComplexField(quad)};
  for (int j = 0; j < N; ++j) {
    MultiIndex o{0, 0, 0};
    o[j] = 1;
    d.grad.push_back(place(apply_derivative(uh, o)));
  }
  if (!with_hessian) return d;
  d.hess.assign(N * N, ComplexField(quad));
  for (int j = 0; j < N; ++j)
    for (int k = j; k < N; ++k) {
      MultiIndex o{0, 0, 0};
      o[j] += 1;
      o[k] += 1;
      d.hess[j * N + k] = place(apply_derivative(uh, o));
      if (k != j) d.hess[k * N + j] = d.hess[j * N + k];
    }
  for (int j = 0; j < N; ++j) d.lap += d.hess[j * N + j];
  return d;
}

// <phi, F> = int phi F dx with F given by its spectrum on the quad grid.
double pair_with_phi(const CartesianCutoff& cut, const std::vector<cplx>& f_hat) {
  const Grid& g = *cut.quad;
  cplx acc = 0.0;
  for (std::size_t i = 0; i < f_hat.size(); ++i) acc += std::conj(cut.phi_hat[i]) * f_hat[i];
  return std::real(acc) * g.cell_volume() / static_cast<double>(g.size());
}

std::vector<cplx> spectrum(const Grid& g, std::vector<cplx> values) {
  g.forward(values);
  return values;
}

double z_integral(const Derivs& d, const CartesianCutoff& cut) {
  // int grad phi . Im(conj(u) grad u) = -int phi div Im(conj(u) grad u)
  const Grid& g = *cut.quad;
  const int N = g.dimension();
  const auto xi = g.axis_frequencies();
  std::vector<cplx> div(g.size(), 0.0);
  for (int j = 0; j < N; ++j) {
    std::vector<cplx> J(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) J[i] = std::imag(std::conj(d.u[i]) * d.grad[j][i]);
    J = spectrum(g, std::move(J));
    for (std::size_t i = 0; i < g.size(); ++i) div[i] += cplx(0.0, xi[g.unravel(i)[j]]) * J[i];
  }
  return -pair_with_phi(cut, div);
}

}  // namespace

double virial_Z(const ComplexField& u, const CartesianCutoff& cut, double factor) {
  return factor * z_integral(derivatives(u, cut.quad, false), cut);
}

VirialReport virial_rhs(const ComplexField& u, const CartesianCutoff& cut,
                        const ModelParams& params, const VirialVariant& variant) {
  const int N = u.grid().dimension();
  const double b = params.b;
  const double q = params.exponent();
  const double p_last = variant.printed_last_exponent ? (8.0 - 2.0 * N) / N + 2.0 : q + 2.0;
  const Derivs d = derivatives(u, cut.quad, true);
  const Grid& g = *cut.quad;
  const std::size_t n = g.size();
  const auto xs = g.axis_coordinates();
  const auto xi = g.axis_frequencies();
  const auto xi2 = g.xi_sq();

  // Quadratic densities; on quad they are exact trigonometric polynomials.
  std::vector<cplx> rho(n), gsq(n), ds(n, 0.0), dq(n, 0.0);
  double r1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = std::norm(d.u[i]);
    double gu2 = 0.0, hh = 0.0, hx = 0.0;
    cplx xgu = 0.0;
    const auto idx = g.unravel(i);
    for (int j = 0; j < N; ++j) {
      gu2 += std::norm(d.grad[j][i]);
      xgu += xs[idx[j]] * d.grad[j][i];
    }
    for (int a = 0; a < N; ++a) {
      cplx xh = 0.0;
      for (int k = 0; k < N; ++k) {
        const cplx v = d.hess[a * N + k][i];
        hh += std::norm(v);
        xh += xs[idx[k]] * v;
      }
      hx += std::norm(xh);
    }
    gsq[i] = gu2;
    r1 += 8.0 * ((cut.a_phi[i] - 2.0) * hh + cut.c_phi[i] * hx) +
          4.0 * params.nu * ((cut.a_phi[i] - 2.0) * gu2 + cut.c_phi[i] * std::norm(xgu));
  }
  // sum_jk d_j d_k S_jk with S_jk = Re(d_j u conj d_k u), and the same for
  // Q_jk = sum_i Re(d_ik u conj d_ij u).
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < N; ++k) {
      std::vector<cplx> S(n), Q(n);
      for (std::size_t i = 0; i < n; ++i) {
        S[i] = std::real(d.grad[j][i] * std::conj(d.grad[k][i]));
        double acc = 0.0;
        for (int a = 0; a < N; ++a)
          acc += std::real(d.hess[a * N + k][i] * std::conj(d.hess[a * N + j][i]));
        Q[i] = acc;
      }
      S = spectrum(g, std::move(S));
      Q = spectrum(g, std::move(Q));
      for (std::size_t i = 0; i < n; ++i) {
        const auto idx = g.unravel(i);
        const double m = -xi[idx[j]] * xi[idx[k]];
        ds[i] += m * S[i];
        dq[i] += m * Q[i];
      }
    }
  rho = spectrum(g, std::move(rho));
  gsq = spectrum(g, std::move(gsq));

  std::vector<cplx> t1(n), t2(n), t4(n), t5(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k2 = xi2[i];
    t1[i] = -k2 * ds[i];
    t2[i] = -k2 * k2 * k2 * rho[i];
    t4[i] = k2 * k2 * gsq[i];
    t5[i] = k2 * k2 * rho[i];
  }

  std::array<double, 2> nlacc{};
  double r2 = 0.0;
  const auto w = singular_weight(u.grid(), params);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double amod = std::abs(u[i]);
    if (amod == 0.0) continue;
    const double pq = std::pow(amod, q + 2.0);
    nlacc[0] += cut.lap[i] * w[i] * pq;
    nlacc[1] += cut.grad_dot_weight[i] * std::pow(amod, p_last);
    r2 += cut.phi2[i] * w[i] * pq;
  }
  const double hc = u.grid().cell_volume();

  const double nl = (params.focusing ? 1.0 : -1.0) * params.coupling;
  VirialReport rep;
  rep.terms[0] = -4.0 * pair_with_phi(cut, t1);
  rep.terms[1] = pair_with_phi(cut, t2);
  rep.terms[2] = 8.0 * pair_with_phi(cut, dq);
  rep.terms[3] = -2.0 * pair_with_phi(cut, t4);
  rep.terms[4] = variant.nu_term_sign * params.nu * pair_with_phi(cut, t5);
  rep.terms[5] = 4.0 * params.nu * pair_with_phi(cut, ds);
  rep.terms[6] = -nl * (8.0 - 2.0 * b) / (N + 4.0 - b) * nlacc[0] * hc;
  rep.terms[7] = nl * 2.0 * N / (N + 4.0 - b) * nlacc[1] * hc;
  for (double t : rep.terms) rep.sum += t;
  rep.R1nu = r1 * g.cell_volume();
  rep.R2 = nl * r2 * hc;
  rep.Z = variant.factor * z_integral(d, cut);
  return rep;
}

VirialReport virial_residual(const ComplexField& u_minus, const ComplexField& u_mid,
                             const ComplexField& u_plus, double delta,
                             const CartesianCutoff& cut, const ModelParams& params,
                             const VirialVariant& variant) {
  if (!(delta > 0.0)) throw Error(ErrorKind::NonPositiveInput, "delta must be > 0");
  VirialReport rep = virial_rhs(u_mid, cut, params, variant);
  const double fd =
      (virial_Z(u_plus, cut, variant.factor) - virial_Z(u_minus, cut, variant.factor)) /
      (2.0 * delta);
  rep.fd = fd;
  rep.residual = std::abs(fd - rep.sum) / std::max(1.0, std::abs(rep.sum));
  return rep;
}

namespace {

std::pair<ComplexField, ComplexField> neighbours(const ComplexField& u, double delta,
                                                 const ModelParams& params) {
  const Integrator integ(u.grid_ptr(), params);
  ComplexField plus = u, minus = u;
  integ.strang_step(plus, delta);
  integ.strang_step(minus, -delta);
  return {std::move(minus), std::move(plus)};
}

}  // namespace

VirialReport virial_residual_at(const ComplexField& u, double t, double delta,
                                const CartesianCutoff& cut, const ModelParams& params,
                                const VirialVariant& variant) {
  const auto [minus, plus] = neighbours(u, delta, params);
  VirialReport rep = virial_residual(minus, u, plus, delta, cut, params, variant);
  rep.t = t;
  return rep;
}

CalibrationResult calibrate_virial(const std::vector<std::pair<double, ComplexField>>& states,
                                   double delta, const CartesianCutoff& cut,
                                   const ModelParams& params) {
  if (states.empty()) throw Error(ErrorKind::InsufficientData, "calibration needs states");
  if (!(delta > 0.0)) throw Error(ErrorKind::NonPositiveInput, "delta must be > 0");
  const auto cands = virial_candidates();
  std::vector<double> worst(cands.size(), 0.0);
  for (const auto& [t, u] : states) {
    const auto [minus, plus] = neighbours(u, delta, params);
    // Candidates differ only in the Z factor, the sign of one term and the
    // exponent of the last one.
    const double dz = (virial_Z(plus, cut, 1.0) - virial_Z(minus, cut, 1.0)) / (2.0 * delta);
    VirialVariant printed;
    printed.printed_last_exponent = true;
    const auto base = virial_rhs(u, cut, params);
    const double last_printed = virial_rhs(u, cut, params, printed).terms[7];
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const auto& v = cands[c];
      double sum = base.sum;
      if (v.nu_term_sign > 0) sum -= 2.0 * base.terms[4];
      if (v.printed_last_exponent) sum += last_printed - base.terms[7];
      const double res = std::abs(v.factor * dz - sum) / std::max(1.0, std::abs(sum));
      worst[c] = std::max(worst[c], res);
    }
  }
  CalibrationResult res;
  std::size_t best = 0;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    res.scores.emplace_back(cands[c], worst[c]);
    if (worst[c] < worst[best]) best = c;
  }
  res.best = cands[best];
  return res;
}

AuditReport morawetz_decay_report(const std::vector<MorawetzSample>& samples, double E0,
                                  double nu, double tol) {
  AuditReport rep("morawetz_decay");
  rep.add("E0", E0);
  rep.add("nu", nu);
  rep.add("samples", static_cast<double>(samples.size()));
  double max_r1 = -std::numeric_limits<double>::infinity();
  double min_r2 = std::numeric_limits<double>::infinity();
  double max_decay = -std::numeric_limits<double>::infinity();
  double max_excess = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    max_r1 = std::max(max_r1, s.R1nu);
    min_r2 = std::min(min_r2, s.R2);
    max_decay = std::max(max_decay, s.decay_test);
    max_excess = std::max(max_excess, s.dZdt - 8.0 * E0);
  }
  if (samples.empty()) {
    rep.check("samples.nonempty", false);
    return rep;
  }
  rep.add("R1nu.max", max_r1);
  rep.add("R2.min", min_r2);
  rep.add("decay_test.max", max_decay);
  rep.check("R1nu.nonpositive", max_r1 <= 1e-10);

  if (E0 < 0.0) {
    // Walk back from the end while Z stays negative and decreasing.
    std::size_t t1 = samples.size() - 1;
    if (samples[t1].Z < 0.0) {
      while (t1 > 0 && samples[t1 - 1].Z < 0.0 && samples[t1 - 1].Z > samples[t1].Z) --t1;
      rep.add("Z.negative_decreasing_from_t", samples[t1].t);
      rep.check("Z.eventually_negative_decreasing", t1 + 1 < samples.size());
    } else {
      rep.add("Z.final", samples.back().Z);
      rep.check("Z.eventually_negative_decreasing", false);
    }
  }
  if (nu == 0.0) {
    rep.add("dZdt_minus_8E0.max", max_excess);
    rep.check("dZdt_le_8E0", max_excess <= tol * std::max(1.0, std::abs(E0)));
  }
  return rep;
}

}  // namespace ibnls
