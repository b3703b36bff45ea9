#ifndef DYNRAYS_ESTIMATES_HPP
#define DYNRAYS_ESTIMATES_HPP

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dynrays/error.hpp"
#include "dynrays/growth.hpp"
#include "dynrays/maps.hpp"
#include "dynrays/rays.hpp"
#include "dynrays/symbolic.hpp"

namespace dynrays {

/// Constants for the logarithm-branch estimates along a ray of bounded
/// address. T = 0 picks C + |c| + eps, which puts Re L_0^m(z) above C.
struct PullbackEstimateConfig {
  double C = 0.0;  // 0 = the smallest admissible value
  double eps = 0.1;
  double T = 0.0;

  static double lower_bound(const MapSpec& m, double eps) {
    return std::max({2.0, m.c.real() + 4.0, 8.0 * kPi * kPi / eps});
  }
  double C_for(const MapSpec& m) const { return C > 0 ? C : lower_bound(m, eps); }
  double T_for(const MapSpec& m) const { return T > 0 ? T : C_for(m) + std::abs(m.c) + eps; }
};

/// C' = 2 sum_j 1 / (C^{2^j} - Re c); terms vanish after a few j.
inline double pullback_derivative_constant(double C, double re_c) {
  double sum = 0.0, p = C;
  for (int j = 0; j < 64 && std::isfinite(p); ++j, p *= p) sum += 1.0 / (p - re_c);
  return 2.0 * sum;
}

/// One level k of the comparison between the prefixed orbit
/// w_k = L_{a_k} o ... o L_{a_1}(z) and the reference orbit v_k = L_0^k(z).
struct PullbackLevel {
  int k = 0;
  double potential = 0.0;  // F^{m-k}(tau), +inf when not representable
  bool represented = false;
  complex w, v;             // valid when represented
  double delta_re = 0.0;    // Re w_k - Re v_k
};

struct PullbackEstimateReport {
  int m = 0;
  double C = 0.0, eps = 0.0, C_prime = 0.0, tau = 0.0;
  std::vector<PullbackLevel> levels;
  // Comparison with the reference orbit: Re w_m - Re v_m + eps/2 >= 0, and
  // Re v_m - Re c - eps/2 - C > 0.
  double margin_compare = 0.0, margin_floor = 0.0;
  // Distance to c: |w_m - c| - |v_m - c| + eps >= 0.
  double margin_distance = 0.0;
  // Derivative bound in log form: eps C' - log(|(L_a)'(z)| / |(L_0^m)'(z)|).
  double margin_derivative = 0.0;
  // Real-part growth Re f(w) >= (Re w)^2, worst case over the representable
  // orbit points with f(w) in S_0.
  double margin_real_part = std::numeric_limits<double>::infinity();
  int real_part_checks = 0;
  bool pass() const {
    return margin_compare >= 0 && margin_floor > 0 && margin_distance >= 0 && margin_derivative >= 0 && margin_real_part >= 0;
  }
};

namespace detail {

// Checks Re f(w) >= Re c + e^{Re w}/2 >= (Re w)^2 for a point w with
// Re w > C, in log form: log Re f(w) may be the only representable datum.
inline double margin_real_part(double re_c, double re_w, double log_re_fw) {
  const double log_mid = re_w > 700 ? re_w - std::log(2.0) : std::log(std::max(re_c + std::exp(re_w) / 2, 1e-300));
  return std::min(log_re_fw - log_mid, log_mid - 2.0 * std::log(re_w));
}

// log|a| - log|b| via |a|^2 - |b|^2 = Re((a - b) conj(a + b)), so tiny
// differences at large modulus survive.
inline double log_modulus_ratio(complex a, complex b) {
  const double nb = std::abs(b);
  const double q = std::real(((a - b) / nb) * std::conj((a + b) / nb));
  return 0.5 * std::log1p(q);
}

}  // namespace detail

/// Evaluates the branch estimates for z = g_base(t) and prefix a_m ... a_1
/// (prefix[0] = a_m, as it reads in the pulled-back address). Since t must
/// exceed F^m(T) it is passed as tau = F^{-m}(t); levels whose potential
/// overflows are carried by the ray asymptotics g_s(p) = p + 2 pi i s_0,
/// under which Re w_k - Re v_k vanishes below double resolution.
inline PullbackEstimateReport verify_pullback_estimates(const MapSpec& m, const ExpAddress& base,
                                                       const std::vector<long>& prefix, double tau,
                                                       const PullbackEstimateConfig& cfg = {},
                                                       const TraceConfig& trace = {}) {
  if (!m.is_exp()) throw ConfigError("pullback estimates need an exponential map");
  if (!(cfg.eps > 0)) throw ConfigError("pullback estimates need eps > 0");
  const double C = cfg.C_for(m), T = cfg.T_for(m);
  if (C < PullbackEstimateConfig::lower_bound(m, cfg.eps))
    throw ConfigError("C must be at least max(2, Re c + 4, 8 pi^2 / eps)");
  if (!(tau > T)) throw ConfigError("potential must exceed F^m(T)");
  const int mm = static_cast<int>(prefix.size());
  const GrowthModel F(m);

  PullbackEstimateReport rep;
  rep.m = mm;
  rep.C = C;
  rep.eps = cfg.eps;
  rep.tau = tau;
  rep.C_prime = pullback_derivative_constant(C, m.c.real());

  // Address of w_k: a_k ... a_1 base; of v_k: 0^k base.
  auto w_address = [&](int k) {
    ExpAddress s = base;
    for (int i = mm - 1; i >= mm - k; --i) s = s.prepended(prefix[i]);
    return s;
  };
  auto v_address = [&](int k) {
    ExpAddress s = base;
    for (int i = 0; i < k; ++i) s = s.prepended(0);
    return s;
  };

  rep.levels.resize(mm + 1);
  for (int k = 0; k <= mm; ++k) {
    rep.levels[k].k = k;
    rep.levels[k].potential = F.iterate(tau, mm - k);
  }
  int k0 = 0;
  while (k0 <= mm && !(rep.levels[k0].potential < 1e300)) ++k0;
  if (k0 > mm) throw NumericalError("pullback estimates: base potential not representable");

  // Lowest representable level: ray points; afterwards compose branches.
  {
    auto& L = rep.levels[k0];
    L.w = exp_ray_point(m, w_address(k0), L.potential, trace).z;
    L.v = exp_ray_point(m, v_address(k0), L.potential, trace).z;
    L.represented = true;
    L.delta_re = L.w.real() - L.v.real();
  }
  for (int k = k0 + 1; k <= mm; ++k) {
    auto& L = rep.levels[k];
    const auto& P = rep.levels[k - 1];
    L.w = inverse_branch_exp(m, prefix[mm - k], P.w);
    L.v = inverse_branch_exp(m, 0, P.v);
    L.represented = true;
    L.delta_re = detail::log_modulus_ratio(P.w - m.c, P.v - m.c);
  }

  const auto& top = rep.levels[mm];
  double sum_delta = 0.0;
  for (int k = 1; k <= mm; ++k) sum_delta += rep.levels[k].delta_re;
  rep.margin_compare = top.delta_re + cfg.eps / 2;
  rep.margin_floor = top.v.real() - m.c.real() - cfg.eps / 2 - C;
  rep.margin_distance = std::abs(top.w - m.c) - std::abs(top.v - m.c) + cfg.eps;
  // log|(L_a)'(z)| = -sum_k Re w_k, so the log ratio against L_0^m is -sum delta.
  rep.margin_derivative = cfg.eps * rep.C_prime + sum_delta;

  // Real-part growth on both orbits: f(w_k) = w_{k-1}.
  for (int k = std::max(1, k0); k <= mm; ++k) {
    const auto& L = rep.levels[k];
    const auto& P = rep.levels[k - 1];
    for (int orbit = 0; orbit < 2; ++orbit) {
      const complex w = orbit == 0 ? L.w : L.v;
      if (!(w.real() > C)) continue;
      long strip;
      double log_re_fw;
      if (P.represented) {
        const complex fw = orbit == 0 ? P.w : P.v;
        strip = strip_index(fw);
        if (!(fw.real() > 0)) {
          if (strip == 0) rep.margin_real_part = -std::numeric_limits<double>::infinity(), ++rep.real_part_checks;
          continue;
        }
        log_re_fw = std::log(fw.real());
      } else {
        // First address entry of the orbit point at level k - 1.
        if (k == 1) strip = base.at(0);
        else strip = orbit == 0 ? prefix[mm - (k - 1)] : 0;
        // Re w_{k-1} = F(p_k) up to e^{-p_k}; log of it without forming it.
        log_re_fw = L.potential + std::log1p(-std::exp(-L.potential));
      }
      if (strip != 0) continue;
      rep.margin_real_part = std::min(rep.margin_real_part, detail::margin_real_part(m.c.real(), w.real(), log_re_fw));
      ++rep.real_part_checks;
    }
  }
  return rep;
}

}  // namespace dynrays

#endif  // DYNRAYS_ESTIMATES_HPP
