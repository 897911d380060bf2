#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "imm/error.hpp"

namespace imm {

enum class Variant { kImm, kW1, kW2 };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kImm: return "imm";
    case Variant::kW1: return "w1";
    case Variant::kW2: return "w2";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "imm") return Variant::kImm;
  if (s == "w1") return Variant::kW1;
  if (s == "w2") return Variant::kW2;
  throw DomainError("unknown variant '" + std::string(s) + "' (expected imm|w1|w2)");
}

// ln C(n, k) through log-gamma; stays finite for n in the millions.
inline double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Sampling-phase accuracy.
inline double eps_prime(double eps) { return std::numbers::sqrt2 * eps; }

namespace detail {

inline void check_instance(double n, double k, double eps, double ell, double min_n) {
  if (!(n >= min_n)) throw DomainError("n must be >= " + std::to_string(static_cast<int>(min_n)));
  if (!(k >= 1.0) || k > n) throw DomainError("k must satisfy 1 <= k <= n");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  if (!(ell > 0.0)) throw DomainError("ell must be > 0");
}

}  // namespace detail

// Final-phase constant:
//   2n * ((1-1/e) sqrt(l ln n + ln 2) + sqrt((1-1/e)(ln C(n,k) + l ln n + ln 2)))^2 / eps^2
inline double lambda_star(double n, double k, double eps, double ell) {
  detail::check_instance(n, k, eps, ell, 2.0);
  constexpr double c = 1.0 - 1.0 / std::numbers::e;
  const double ln_n = std::log(n);
  const double alpha = std::sqrt(ell * ln_n + std::numbers::ln2);
  const double beta = std::sqrt(c * (log_binomial(n, k) + ell * ln_n + std::numbers::ln2));
  const double s = c * alpha + beta;
  return 2.0 * n * s * s / (eps * eps);
}

// Per-iteration constant of the sampling loop:
//   (2 + 2/3 eps') (ln C(n,k) + l ln n + ln log2 n) n / eps'^2
// Needs n >= 4 so that ln log2 n > 0.
inline double lambda_prime(double n, double k, double eps_p, double ell) {
  if (!(n >= 4.0)) throw DomainError("lambda' needs n >= 4 (ln log2 n must be positive)");
  if (!(k >= 1.0) || k > n) throw DomainError("k must satisfy 1 <= k <= n");
  if (!(eps_p > 0.0)) throw DomainError("eps' must be > 0");
  if (!(ell > 0.0)) throw DomainError("ell must be > 0");
  const double ln_n = std::log(n);
  return (2.0 + 2.0 / 3.0 * eps_p) * (log_binomial(n, k) + ell * ln_n + std::log(std::log2(n))) * n /
         (eps_p * eps_p);
}

// Confidence exponent actually used. The ln2/ln n term turns the 1-2/n^l
// union bound of two failure events into 1-1/n^l; W2 adds gamma on top.
inline double adjust_ell(double ell, double n, Variant variant, double gamma = 0.0) {
  const double base = ell + std::numbers::ln2 / std::log(n);
  return variant == Variant::kW2 ? base + gamma : base;
}

// True when ceil(lambda*(l + gamma)) <= n^gamma.
inline bool gamma_condition(double n, double k, double eps, double ell, double gamma) {
  return std::ceil(lambda_star(n, k, eps, ell + gamma)) <= std::pow(n, gamma);
}

// 4 + ln(8 ln n) / ln n; enough whenever 1/eps <= n and k + l + gamma + 1 <= n.
inline double conservative_gamma(double n) {
  const double ln_n = std::log(n);
  return 4.0 + std::log(8.0 * ln_n) / ln_n;
}

struct GammaResult {
  double gamma = 0.0;
  double lambda_star_ceil = 0.0;  // ceil(lambda*(l + gamma))
  double n_pow_gamma = 0.0;       // n^gamma
  double upper = 0.0;             // verified starting bracket
};

inline constexpr double kGammaStep = 1e-3;

// Smallest gamma on the 1e-3 grid with ceil(lambda*(l + gamma)) <= n^gamma.
// The bracket [0, upper] is checked by direct evaluation before searching;
// afterwards the result is verified to hold at gamma and fail at gamma - 1e-3.
inline GammaResult gamma_search(double n, double k, double eps, double ell) {
  detail::check_instance(n, k, eps, ell, 2.0);
  auto holds = [&](long j) { return gamma_condition(n, k, eps, ell, static_cast<double>(j) * kGammaStep); };

  double upper = conservative_gamma(n);
  long hi = static_cast<long>(std::ceil(upper / kGammaStep));
  for (int tries = 0; !holds(hi); ++tries) {
    if (tries == 64) {
      throw DomainError("no gamma <= " + std::to_string(upper) + " satisfies ceil(lambda*(l+gamma)) <= n^gamma");
    }
    upper += 1.0;
    hi = static_cast<long>(std::ceil(upper / kGammaStep));
  }

  long lo = -1;  // invariant: holds(hi), and lo < 0 or !holds(lo)
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (holds(mid) ? hi : lo) = mid;
  }
  // The condition is monotone in practice but not provably so; walk down if needed.
  while (hi > 0 && holds(hi - 1)) --hi;

  GammaResult r;
  r.gamma = static_cast<double>(hi) * kGammaStep;
  r.lambda_star_ceil = std::ceil(lambda_star(n, k, eps, ell + r.gamma));
  r.n_pow_gamma = std::pow(n, r.gamma);
  r.upper = upper;
  return r;
}

// Instance constants for one run of a given variant.
struct ImmParams {
  double n = 0;
  double k = 0;
  double eps = 0;
  double ell = 0;             // requested confidence exponent
  Variant variant = Variant::kImm;
  double eps_prime = 0;
  double gamma = 0;           // 0 unless variant == w2
  double ell_eff = 0;         // exponent used in lambda' and lambda*
  double lambda_prime = 0;    // 0 when n < 4 (the sampling loop is empty)
  double lambda_star = 0;
};

inline ImmParams make_params(double n, double k, double eps, double ell, Variant variant) {
  detail::check_instance(n, k, eps, ell, 2.0);
  ImmParams p;
  p.n = n;
  p.k = k;
  p.eps = eps;
  p.ell = ell;
  p.variant = variant;
  p.eps_prime = eps_prime(eps);
  if (variant == Variant::kW2) {
    // Search from the already-adjusted exponent so the union bound over all
    // stopping times is taken against 1/n^(l + ln2/ln n).
    p.gamma = gamma_search(n, k, eps, adjust_ell(ell, n, Variant::kImm)).gamma;
  }
  p.ell_eff = adjust_ell(ell, n, variant, p.gamma);
  p.lambda_star = lambda_star(n, k, eps, p.ell_eff);
  p.lambda_prime = n >= 4.0 ? lambda_prime(n, k, p.eps_prime, p.ell_eff) : 0.0;
  return p;
}

}  // namespace imm
