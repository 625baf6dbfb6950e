#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "slm/configuration.hpp"
#include "slm/ensemble.hpp"
#include "slm/model.hpp"
#include "slm/states.hpp"

namespace slm {

/// Guaranteed lifetime (beta_hi - beta_lo) e^{-beta_hi} / <a+> of the
/// beta_lo-exponential moment given a finite beta_hi-exponential moment at 0.
struct Horizon {
  double value = 0.0;
  bool infinite = false;  // <a+> = 0: no finite horizon
};
Horizon horizon(double beta_hi, double beta_lo, double plus_mass);

/// Exponents beta > 0 for which e^{beta |gamma|} moments are preserved for
/// all time: every beta when <a+> = 0, (0, log(m / <a+>)) when m > <a+> > 0.
struct BetaWindow {
  enum class Kind { all_positive, interval, empty };
  Kind kind = Kind::empty;
  double upper = 0.0;

  bool contains(double beta) const;
};
BetaWindow beta_window(double mortality, double plus_mass);

/// P(s) = <a+> s^2 - (<a+> + m) s + m, with roots 1 and m / <a+>.
double drift_polynomial(double mortality, double plus_mass, double s);

struct PolyRootsCheck {
  double s = 0.0;        // e^beta
  double value = 0.0;    // P(e^beta)
  /// Largest eps with P(e^beta) <= -eps (<a+> + m); empty when P(e^beta) >= 0.
  std::optional<double> epsilon;
};
PolyRootsCheck check_poly_roots(double mortality, double plus_mass, double beta);

/// Left side of the polynomial drift inequality for F(gamma) = |gamma|^order
/// and eps = 1:
///   -sum_x (m + E(x, gamma\x)) (F(gamma) - F(gamma\x) - 1)
///     + <a+> |gamma| (F(gamma u y) - F(gamma) + 1).
double drift_lhs_poly(const Configuration& config, double mortality, double plus_mass, int order);

/// c = <a+> 2^{order + 1}.
double drift_constant(double plus_mass, int order);

/// Running check of lhs <= c F over many configurations.
struct DriftCheck {
  int order = 1;
  double c = 0.0;
  std::size_t configs = 0;
  std::size_t violations = 0;
  /// max lhs / (c F) over nonempty configurations (0 when lhs <= 0 = c F).
  double max_slack_ratio = 0.0;

  void add(const Configuration& config, double mortality, double plus_mass);
  bool holds() const { return configs > 0 && violations == 0; }
};

DriftCheck check_drift_poly(const SimParams& params, int order, std::span<const Configuration> configs);

/// One verdict about one claim, always with the numbers behind it.
struct TheoremCase {
  std::string claim;   // a | b1 | b2 | b | c
  std::string status;  // pass | fail | not_applicable
  nlohmann::json inputs;
  nlohmann::json evidence;
  nlohmann::json tolerances;

  bool passed() const { return status == "pass"; }
};

nlohmann::json to_json(const TheoremCase& tc);

struct VerifyInputs {
  SimParams params;
  InitialState initial;
  ObservationSchedule schedule;
  std::vector<std::size_t> n_max_list{100, 200, 400};
  /// Exponents (beta*, beta_*) for the finite-horizon claim.
  std::optional<double> beta_star_hi;
  std::optional<double> beta_star_lo;
  /// Drift checks accumulated over simulated configurations.
  std::vector<DriftCheck> drift;
};

/// Builds the cases for claims (a), (b) and, when exponents are given, (c).
/// Moment-finiteness claims are read through master-equation truncation
/// sweeps when the rates are count-determined.
std::vector<TheoremCase> verify_theorem(const VerifyInputs& in);

TheoremCase verify_moments(const VerifyInputs& in);
TheoremCase verify_beta_window(const VerifyInputs& in);
TheoremCase verify_horizon(const VerifyInputs& in);

}  // namespace slm
