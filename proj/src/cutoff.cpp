#include "ibnls/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ibnls/error.hpp"

namespace ibnls {

namespace {

// k (k-1) ... (k-j+1)
double falling(int k, int j) {
  double f = 1.0;
  for (int i = 0; i < j; ++i) f *= (k - i);
  return f;
}

double poly3_derivative(const std::array<double, 4>& c, int j, double t) {
  double acc = 0.0;
  for (int i = 3; i >= j; --i) acc = acc * t + c[i] * falling(i, j);
  return acc;
}

double binom(int n, int j) { return falling(n, j) / falling(j, j); }

std::string rkey(double R) {
  std::ostringstream os;
  os << "R" << R;
  return os.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ChiProfile ChiProfile::build(int k, double b) { return build(k, b, 2.0 / (4.0 - b)); }

ChiProfile ChiProfile::build(int k, double b, double alpha) {
  if (!(b > 0.0 && b < 4.0)) throw Error(ErrorKind::ConfigInvalid, "b must lie in (0, 4)");
  if (!(alpha > 0.0)) throw Error(ErrorKind::ConfigInvalid, "alpha must be positive");
  if (k < 4 || !(k > 2.0 + 1.0 / alpha)) {
    std::ostringstream os;
    os << "k = " << k << " needs k >= 4 and k > 2 + 1/alpha = " << 2.0 + 1.0 / alpha;
    throw Error(ErrorKind::KTooSmall, os.str());
  }

  ChiProfile p;
  p.k_ = k;
  p.alpha_ = alpha;
  const double e = std::pow(static_cast<double>(k), 1.0 / (1.0 - k));
  p.a_ = 1.0 + e;
  const double H = 2.0 - p.a_;

  // C^3 data of 2s - 2(s-1)^k at s = a, rescaled to tau = (s - a)/H.
  const double d0 = 2.0 * p.a_ - 2.0 * std::pow(e, k);
  const double d1 = (2.0 - 2.0 * k * std::pow(e, k - 1)) * H;
  const double d2 = (-2.0 * falling(k, 2) * std::pow(e, k - 2)) * H * H / 2.0;
  const double d3 = (-2.0 * falling(k, 3) * std::pow(e, k - 3)) * H * H * H / 6.0;
  // Bridge = (1 - tau)^4 Q(tau): the fourfold zero at s = 2 is built in and
  // Q follows from matching Taylor coefficients at tau = 0.
  p.H_ = H;
  p.q_[0] = d0;
  p.q_[1] = d1 + 4.0 * p.q_[0];
  p.q_[2] = d2 + 4.0 * p.q_[1] - 6.0 * p.q_[0];
  p.q_[3] = d3 + 4.0 * p.q_[2] - 6.0 * p.q_[1] + 4.0 * p.q_[0];
  const std::array<double, 5> quartic{1.0, -4.0, 6.0, -4.0, 1.0};
  std::array<double, 8> d{};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) d[i + j] += quartic[i] * p.q_[j];
  for (int i = 0; i < 8; ++i) p.bridge_[i] = d[i] / std::pow(H, i);

  p.phi_at_a_ = p.a_ * p.a_ - 2.0 * std::pow(e, k + 1) / (k + 1);
  double integral = 0.0;
  for (int i = 0; i < 8; ++i) integral += p.bridge_[i] * std::pow(H, i + 1) / (i + 1);
  p.phi_at_2_ = p.phi_at_a_ + integral;

  constexpr int kSamples = 10000;
  for (int i = 1; i <= kSamples; ++i) {
    const double t = H * i / (kSamples + 1.0);
    const auto jet = p.chi_jet(p.a_ + t);
    const double slope = jet[1];
    const double value = jet[0];
    if (!(slope < 0.0) || value < 0.0) {
      std::ostringstream os;
      os << "chi' = " << slope << ", chi = " << value << " at s = " << p.a_ + t;
      throw Error(ErrorKind::BridgeMonotonicityFailed, os.str());
    }
  }
  return p;
}

ChiProfile::Region ChiProfile::region(double s) const {
  if (s <= 1.0) return Region::Inner;
  if (s <= a_) return Region::Power;
  if (s < 2.0) return Region::Bridge;
  return Region::Outer;
}

std::array<double, 6> ChiProfile::chi_jet(double s) const {
  std::array<double, 6> out{};
  switch (region(s)) {
    case Region::Inner:
      out[0] = 2.0 * s;
      out[1] = 2.0;
      break;
    case Region::Power: {
      const double e = s - 1.0;
      for (int j = 0; j < 6; ++j) {
        const double lin = j == 0 ? 2.0 * s : (j == 1 ? 2.0 : 0.0);
        const double pw = j <= k_ ? 2.0 * falling(k_, j) * std::pow(e, k_ - j) : 0.0;
        out[j] = lin - pw;
      }
      break;
    }
    case Region::Bridge: {
      const double tau = (s - a_) / H_;
      const double w = 1.0 - tau;
      std::array<double, 6> A{}, Q{};
      for (int i = 0; i <= 4; ++i)
        A[i] = (i % 2 ? -1.0 : 1.0) * falling(4, i) * std::pow(w, 4 - i);
      for (int i = 0; i < 4; ++i) Q[i] = poly3_derivative(q_, i, tau);
      double scale = 1.0;
      for (int j = 0; j < 6; ++j) {
        double acc = 0.0;
        for (int i = 0; i <= j; ++i) acc += binom(j, i) * A[i] * Q[j - i];
        out[j] = acc / scale;
        scale *= H_;
      }
      break;
    }
    case Region::Outer:
      break;
  }
  return out;
}

std::array<double, 7> ChiProfile::phi_jet(double s) const {
  std::array<double, 7> out{};
  const auto chi = chi_jet(s);
  for (int j = 0; j < 6; ++j) out[j + 1] = chi[j];
  switch (region(s)) {
    case Region::Inner:
      out[0] = s * s;
      break;
    case Region::Power:
      out[0] = s * s - 2.0 * std::pow(s - 1.0, k_ + 1) / (k_ + 1);
      break;
    case Region::Bridge: {
      const double t = s - a_;
      double acc = 0.0;
      for (int i = 7; i >= 0; --i) acc = acc * t + bridge_[i] / (i + 1);
      out[0] = phi_at_a_ + acc * t;
      break;
    }
    case Region::Outer:
      out[0] = phi_at_2_;
      break;
  }
  return out;
}

ChiProfile::Defects ChiProfile::defects(double s) const {
  Defects d;
  switch (region(s)) {
    case Region::Inner:
      break;
    case Region::Power: {
      const double e = s - 1.0;
      const double k = k_;
      const double ek = std::pow(e, k_), ek1 = std::pow(e, k_ - 1), ek2 = std::pow(e, k_ - 2);
      d.d1[0] = 2.0 * ek / s;
      d.d1[1] = 2.0 * k * ek1 / s - 2.0 * ek / (s * s);
      d.d1[2] = 2.0 * k * (k - 1) * ek2 / s - 4.0 * k * ek1 / (s * s) + 4.0 * ek / (s * s * s);
      d.d2[0] = 2.0 * k * ek1;
      d.d2[1] = 2.0 * k * (k - 1) * ek2;
      d.d2[2] = 2.0 * falling(k_, 3) * std::pow(e, k_ - 3);
      break;
    }
    case Region::Bridge: {
      const auto c = chi_jet(s);
      d.d1[0] = 2.0 - c[0] / s;
      d.d1[1] = -(c[1] / s - c[0] / (s * s));
      d.d1[2] = -(c[2] / s - 2.0 * c[1] / (s * s) + 2.0 * c[0] / (s * s * s));
      d.d2[0] = 2.0 - c[1];
      d.d2[1] = -c[2];
      d.d2[2] = -c[3];
      break;
    }
    case Region::Outer:
      d.d1[0] = 2.0;
      d.d2[0] = 2.0;
      break;
  }
  return d;
}

std::array<double, 7> CutoffSpec::phi_jet(double r) const {
  auto jet = profile.phi_jet(r / R);
  double scale = R * R;
  for (auto& v : jet) {
    v *= scale;
    scale /= R;
  }
  return jet;
}

double CutoffSpec::radial_quotient(double r) const {
  return 2.0 - profile.defects(r / R).d1[0];
}

Phi2Coefficients Phi2Coefficients::make(int dimension, double b) {
  const double denom = dimension + 4.0 - b;
  return {2.0 * (4.0 - b) / denom, 2.0 * (4.0 * dimension - 4.0 + b) / denom};
}

double Phi1(const CutoffSpec& spec, double r) {
  return 8.0 * spec.profile.defects(r / spec.R).d1[0];
}

double Phi2(const CutoffSpec& spec, int dimension, double b, double r) {
  const auto c = Phi2Coefficients::make(dimension, b);
  const auto d = spec.profile.defects(r / spec.R);
  return c.c_lap * d.d2[0] + c.c_quot * d.d1[0];
}

std::array<double, 3> phi2_power_jet(const CutoffSpec& spec, int dimension, double b,
                                     double alpha, double r) {
  const ChiProfile& p = spec.profile;
  const double m = alpha * (p.k() - 1);
  if (m < 2.0) {
    std::ostringstream os;
    os << "alpha (k - 1) = " << m << " < 2";
    throw Error(ErrorKind::KTooSmall, os.str());
  }
  const auto c = Phi2Coefficients::make(dimension, b);
  const double s = r / spec.R;
  const double R = spec.R;
  std::array<double, 3> g{};
  switch (p.region(s)) {
    case ChiProfile::Region::Inner:
      break;
    case ChiProfile::Region::Outer:
      g[0] = std::pow(2.0 * (c.c_lap + c.c_quot), alpha);
      break;
    case ChiProfile::Region::Power: {
      // Phi_2 = e^(k-1) B(s) with B = 2k c_lap + 2 c_quot e/s.
      const double e = s - 1.0;
      const double B = 2.0 * p.k() * c.c_lap + 2.0 * c.c_quot * e / s;
      const double B1 = 2.0 * c.c_quot / (s * s);
      const double B2 = -4.0 * c.c_quot / (s * s * s);
      const double Q = m * B + alpha * e * B1;
      g[0] = std::pow(e, m) * std::pow(B, alpha);
      g[1] = std::pow(e, m - 1.0) * std::pow(B, alpha - 1.0) * Q;
      g[2] = std::pow(e, m - 2.0) * std::pow(B, alpha - 2.0) *
                 ((m - 1.0) * B + (alpha - 1.0) * e * B1) * Q +
             std::pow(e, m - 1.0) * std::pow(B, alpha - 1.0) *
                 ((m + alpha) * B1 + alpha * e * B2);
      g[1] /= R;
      g[2] /= R * R;
      break;
    }
    case ChiProfile::Region::Bridge: {
      const auto d = p.defects(s);
      const double F = c.c_lap * d.d2[0] + c.c_quot * d.d1[0];
      const double F1 = c.c_lap * d.d2[1] + c.c_quot * d.d1[1];
      const double F2 = c.c_lap * d.d2[2] + c.c_quot * d.d1[2];
      g[0] = std::pow(F, alpha);
      g[1] = alpha * std::pow(F, alpha - 1.0) * F1 / R;
      g[2] = (alpha * (alpha - 1.0) * std::pow(F, alpha - 2.0) * F1 * F1 +
              alpha * std::pow(F, alpha - 1.0) * F2) /
             (R * R);
      break;
    }
  }
  return g;
}

CutoffEvaluation eval_phi_family(const CutoffSpec& spec, int dimension, double b,
                                 std::span<const double> radii) {
  CutoffEvaluation ev;
  ev.radii.assign(radii.begin(), radii.end());
  for (auto& d : ev.derivatives) d.resize(radii.size());
  ev.phi1.resize(radii.size());
  ev.phi2.resize(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto jet = spec.phi_jet(radii[i]);
    for (int j = 0; j < 7; ++j) ev.derivatives[j][i] = jet[j];
    ev.phi1[i] = Phi1(spec, radii[i]);
    ev.phi2[i] = Phi2(spec, dimension, b, radii[i]);
  }
  return ev;
}

AuditReport verify_cutoff_properties(const ChiProfile& profile, std::span<const double> R_list,
                                     int samples_per_R) {
  AuditReport rep("cutoff_properties");
  rep.add("k", static_cast<double>(profile.k()));
  rep.add("bridge_start", profile.bridge_start());
  constexpr double kTol = 1e-12;
  std::array<std::vector<double>, 7> normalized;

  for (const double R : R_list) {
    const CutoffSpec spec{profile, R};
    const std::string key = rkey(R);
    const double dr = 3.0 * R / samples_per_R;
    double inner_dev = 0.0, v_quot = 0.0, v_grad = 0.0, v_second = 0.0;
    double w_quot = 0.0, w_grad = 0.0, w_second = 0.0;
    std::array<double, 7> sup{};
    std::array<double, 7> lo, hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());

    for (int i = 0; i <= samples_per_R; ++i) {
      const double r = dr * i;
      const auto jet = spec.phi_jet(r);
      if (r <= R) {
        const double dev = std::max(std::abs(jet[1] - 2.0 * r), std::abs(jet[2] - 2.0)) /
                           std::max(1.0, r);
        inner_dev = std::max(inner_dev, dev);
      }
      const double q = -(jet[1] - r * jet[2]);
      if (q > v_quot) { v_quot = q; w_quot = r; }
      const double g = jet[1] - 2.0 * r;
      if (g > v_grad) { v_grad = g; w_grad = r; }
      const double s2 = jet[2] - 2.0;
      if (s2 > v_second) { v_second = s2; w_second = r; }
      for (int j = 0; j < 7; ++j) {
        sup[j] = std::max(sup[j], std::abs(jet[j]));
        if (j >= 1 && jet[j] != 0.0) {
          lo[j] = std::min(lo[j], r);
          hi[j] = std::max(hi[j], r);
        }
      }
    }

    rep.add(key + ".inner_exact.max_dev", inner_dev);
    rep.check(key + ".inner_exact", inner_dev <= kTol);
    rep.add(key + ".quotient_monotone.max_violation", v_quot);
    rep.add(key + ".gradient_below_2r.max_violation", v_grad);
    rep.add(key + ".second_below_2.max_violation", v_second);
    if (v_quot > kTol) rep.fail_with(ErrorKind::PropertyViolated, key + ".quotient_monotone", w_quot);
    if (v_grad > kTol) rep.fail_with(ErrorKind::PropertyViolated, key + ".gradient_below_2r", w_grad);
    if (v_second > kTol) rep.fail_with(ErrorKind::PropertyViolated, key + ".second_below_2", w_second);

    for (int j = 0; j < 7; ++j) {
      const double norm = sup[j] * std::pow(R, j - 2);
      normalized[j].push_back(norm);
      rep.add(key + ".sup_d" + std::to_string(j), sup[j]);
      rep.add(key + ".normalized_sup_d" + std::to_string(j), norm);
    }
    for (int j = 1; j < 7; ++j) {
      const std::string sk = key + ".support_d" + std::to_string(j);
      rep.add(sk + ".lo", lo[j]);
      rep.add(sk + ".hi", hi[j]);
      const bool upper_ok = hi[j] <= 2.0 * R + dr;
      const bool lower_ok = j <= 2 || lo[j] >= R - dr;
      rep.check(sk, upper_ok && lower_ok);
    }
  }

  for (int j = 0; j < 7; ++j) {
    const auto [mn, mx] = std::minmax_element(normalized[j].begin(), normalized[j].end());
    const double spread = *mn > 0.0 ? *mx / *mn : std::numeric_limits<double>::infinity();
    rep.add("normalized_sup_d" + std::to_string(j) + ".spread", spread);
    rep.check("normalized_sup_d" + std::to_string(j) + ".within_5pct", spread <= 1.05);
  }
  return rep;
}

AuditReport verify_Phi2_scaling(const ChiProfile& profile, int dimension, double b,
                                double alpha, std::span<const double> R_list,
                                int samples_per_R) {
  AuditReport rep("phi2_power_scaling");
  const double margin = alpha * (profile.k() - 1) - 2.0;
  rep.add("alpha", alpha);
  rep.add("vanishing_order_margin", margin);
  if (margin < 0.0) {
    std::ostringstream os;
    os << "alpha (k - 1) - 2 = " << margin << " < 0; need k > 2 + 1/alpha";
    throw Error(ErrorKind::KTooSmall, os.str());
  }

  std::vector<double> grad_seq, lap_seq;
  for (const double R : R_list) {
    const CutoffSpec spec{profile, R};
    double s1 = 0.0, s2 = 0.0;
    // Phi_2^alpha is constant on r <= R and r >= 2R; sample the open shell.
    for (int i = 1; i < samples_per_R; ++i) {
      const double r = R + R * i / static_cast<double>(samples_per_R);
      const auto g = phi2_power_jet(spec, dimension, b, alpha, r);
      s1 = std::max(s1, std::abs(g[1]));
      s2 = std::max(s2, std::abs(g[2] + (dimension - 1) / r * g[1]));
    }
    grad_seq.push_back(R * s1);
    lap_seq.push_back(R * R * s2);
    rep.add(rkey(R) + ".R_sup_grad", R * s1);
    rep.add(rkey(R) + ".R2_sup_lap", R * R * s2);
  }

  auto band = [](const std::vector<double>& v) {
    const double med = median(v);
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x - med) / med);
    return worst;
  };
  const double bg = band(grad_seq), bl = band(lap_seq);
  rep.add("grad.max_rel_dev_from_median", bg);
  rep.add("lap.max_rel_dev_from_median", bl);
  rep.check("grad.bounded_by_1_over_R", bg < 0.5);
  rep.check("lap.bounded_by_1_over_R2", bl < 0.5);

  // Closed forms of Phi_2^alpha on the power region, as displayed in two
  // places with different bracket constants, against the exact evaluation.
  if (!R_list.empty()) {
    const CutoffSpec spec{profile, R_list.front()};
    const double k = profile.k();
    const double nb = dimension + 4.0 - b;
    double dev_a = 0.0, dev_b = 0.0;
    for (int i = 1; i <= 200; ++i) {
      const double s = 1.0 + (profile.bridge_start() - 1.0) * i / 200.0;
      const double exact = phi2_power_jet(spec, dimension, b, alpha, s * spec.R)[0];
      const double lead = std::pow(s - 1.0, alpha * (k - 1));
      const double form_a =
          lead * std::pow(4.0 / nb * (k * (4.0 - b) + (4.0 * dimension - 4.0 + b) * (1.0 - 1.0 / s)), alpha);
      const double form_b =
          lead * std::pow(8.0 / nb * (k * (4.0 - b) + (4.0 * dimension - 2.0 + b) * (1.0 - 1.0 / s)), alpha);
      dev_a = std::max(dev_a, std::abs(form_a - exact) / exact);
      dev_b = std::max(dev_b, std::abs(form_b - exact) / exact);
    }
    rep.add("closed_form_4N-4+b.max_rel_dev", dev_a);
    rep.add("closed_form_8_4N-2+b.max_rel_dev", dev_b);
  }
  return rep;
}

AuditReport phi_comparison_audit(const ChiProfile& profile, int dimension, double b,
                                 std::span<const double> R_list, int samples_per_R) {
  AuditReport rep("phi_comparison");
  const double beta = 4.0 / (4.0 - b);
  const double k = profile.k();
  const auto c = Phi2Coefficients::make(dimension, b);
  // Phi_2^beta / Phi_1 ~ (s-1)^(beta (k-1) - k) near s = 1+.
  const double order_margin = beta * (k - 1.0) - k;
  rep.add("beta", beta);
  rep.add("vanishing_order_margin", order_margin);
  rep.check("vanishing_order.k_at_least_4_over_b", order_margin >= -1e-12);

  const double far_expected = std::pow(16.0 * dimension / (dimension + 4.0 - b), beta) / 16.0;
  const double kpow = std::pow(k, 1.0 / (1.0 - k));
  const double phi1_floor = 16.0 * std::pow(k, k / (1.0 - k)) / (1.0 + kpow);
  rep.add("bridge.phi1_lower_bound", phi1_floor);

  std::vector<double> radii(R_list.begin(), R_list.end());
  std::sort(radii.begin(), radii.end());
  std::vector<double> scaled;
  for (const double R : radii) {
    const CutoffSpec spec{profile, R};
    const std::string key = rkey(R);
    double rho = 0.0, witness = R;
    double min_phi1_bridge = std::numeric_limits<double>::infinity();
    double min_phi2_bridge = std::numeric_limits<double>::infinity();
    double far_dev = 0.0;
    for (int i = 1; i <= samples_per_R; ++i) {
      const double r = R + 3.0 * R * i / samples_per_R;
      const double s = r / R;
      const auto region = profile.region(s);
      double ratio;
      if (region == ChiProfile::Region::Power) {
        const double e = s - 1.0;
        const double B = 2.0 * k * c.c_lap + 2.0 * c.c_quot * e / s;
        ratio = std::pow(e, order_margin) * std::pow(B, beta) * s / 16.0;
      } else {
        const double p1 = Phi1(spec, r);
        if (!(p1 > 0.0)) continue;
        ratio = std::pow(Phi2(spec, dimension, b, r), beta) / p1;
      }
      if (!std::isfinite(ratio) || ratio > rho) {
        rho = ratio;
        witness = r;
      }
      if (region == ChiProfile::Region::Bridge) {
        min_phi1_bridge = std::min(min_phi1_bridge, Phi1(spec, r));
        min_phi2_bridge = std::min(min_phi2_bridge, Phi2(spec, dimension, b, r));
      }
      if (region == ChiProfile::Region::Outer)
        far_dev = std::max(far_dev, std::abs(ratio - far_expected) / far_expected);
    }
    if (order_margin < 0.0) {
      rho = std::numeric_limits<double>::infinity();
      witness = R;
    }
    rep.add(key + ".rho", rho);
    const double sc = std::pow(R, -2.0 * b / (4.0 - b)) * rho;
    scaled.push_back(sc);
    rep.add(key + ".rho_scaled", sc);
    rep.add(key + ".bridge.min_phi1", min_phi1_bridge);
    rep.add(key + ".bridge.min_phi2", min_phi2_bridge);
    rep.add(key + ".outer.ratio_rel_dev", far_dev);
    rep.check(key + ".bridge.phi1_bound", min_phi1_bridge >= phi1_floor - 1e-12);
    rep.check(key + ".bridge.phi2_bounded_below", min_phi2_bridge > 0.0);
    rep.check(key + ".outer.ratio_constant", far_dev <= 1e-12);
    if (!std::isfinite(rho)) rep.fail_with(ErrorKind::DominanceFailed, key + ".rho_finite", witness);
  }
  bool non_increasing = true;
  for (std::size_t i = 1; i < scaled.size(); ++i)
    if (!(scaled[i] <= scaled[i - 1])) non_increasing = false;
  rep.check("rho_scaled.non_increasing", non_increasing);
  if (!non_increasing && !radii.empty())
    rep.fail_with(ErrorKind::DominanceFailed, "rho_scaled.non_increasing", radii.back());
  return rep;
}

}  // namespace ibnls
