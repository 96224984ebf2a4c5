#include "ixbandit/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ixbandit/error.hpp"

namespace ixbandit {
namespace {

double as_real(std::size_t n) { return static_cast<double>(n); }

}  // namespace

void BoundSpec::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("confidence level delta must lie in (0,1)");
  }
  if (arms < 2) throw ConfigError("bounds need K >= 2 arms");
  if (horizon < 1) throw ConfigError("horizon must be positive");
}

double bound_thm1_fixed(const BoundSpec& spec) {
  spec.validate();
  const double kt = as_real(spec.arms) * as_real(spec.horizon);
  const double log_k = std::log(as_real(spec.arms));
  return 2.0 * std::sqrt(2.0 * kt * log_k) +
         (std::sqrt(2.0 * kt / log_k) + 1.0) * std::log(2.0 / spec.delta);
}

double bound_thm1_anytime(const BoundSpec& spec) {
  spec.validate();
  const double kt = as_real(spec.arms) * as_real(spec.horizon);
  const double log_k = std::log(as_real(spec.arms));
  return 4.0 * std::sqrt(kt * log_k) +
         (2.0 * std::sqrt(kt / log_k) + 1.0) * std::log(2.0 / spec.delta);
}

double bound_thm2(const BoundSpec& spec) {
  spec.validate();
  if (!spec.experts) throw ConfigError("expert bound needs the expert count N");
  if (*spec.experts < 2) throw ConfigError("expert bound needs N >= 2");
  const double kt = as_real(spec.arms) * as_real(spec.horizon);
  const double log_n = std::log(as_real(*spec.experts));
  return 2.0 * std::sqrt(2.0 * kt * log_n) +
         (std::sqrt(2.0 * kt / log_n) + 1.0) * std::log(2.0 / spec.delta);
}

double bound_thm3(const BoundSpec& spec) {
  spec.validate();
  if (!spec.switches) throw ConfigError("tracking bound needs the switch count S");
  if (*spec.switches < 1) throw ConfigError("tracking bound needs S >= 1");
  const double k = as_real(spec.arms);
  const double t = as_real(spec.horizon);
  const double s = as_real(*spec.switches);
  const double s_bar = s + 1.0;
  return 2.0 * std::sqrt(2.0 * k * t * s_bar * std::log(std::numbers::e * k * t / s)) +
         (std::sqrt(2.0 * k * t / (s_bar * std::log(k))) + 1.0) *
             std::log(2.0 / spec.delta);
}

bool thm4_horizon_ok(std::size_t arms, std::size_t horizon,
                     std::size_t independence) {
  const double k = as_real(arms);
  return as_real(horizon) >= k * k / (8.0 * as_real(independence));
}

double bound_thm4(const BoundSpec& spec) {
  spec.validate();
  if (!spec.independence) {
    throw ConfigError("side-observation bound needs the independence number");
  }
  const std::size_t a_count = *spec.independence;
  if (a_count < 1 || a_count > spec.arms) {
    throw ConfigError("independence number must lie in 1..K");
  }
  if (!thm4_horizon_ok(spec.arms, spec.horizon, a_count)) {
    throw ConfigError("side-observation bound requires T >= K^2/(8 alpha); T = " +
                      std::to_string(spec.horizon) + " is too small");
  }
  const double k = as_real(spec.arms);
  const double t = as_real(spec.horizon);
  const double a = as_real(a_count);
  const double log_k = std::log(k);
  const double log_kt = std::log(k * t);
  const double log_conf = std::log(4.0 / spec.delta);
  return (4.0 + 2.0 * std::sqrt(log_conf)) *
             std::sqrt(2.0 * a * t * (log_k * log_k + log_kt)) +
         2.0 * std::sqrt(a * t * log_kt / log_k) * log_conf +
         std::sqrt(t * log_conf / 2.0);
}

}  // namespace ixbandit
