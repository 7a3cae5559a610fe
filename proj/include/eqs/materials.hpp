#pragma once

#include <map>
#include <variant>

#include "eqs/types.hpp"

namespace eqs {

struct ConstantConductivity {
  double kappa;  // S/m
};

/// Field-grading filler law: conductivity rises by orders of magnitude
/// around a switching field strength. Smooth sigmoid in log-conductivity:
///   log10 k(E) = log10(k_lo) + (log10(k_hi) - log10(k_lo)) * (1 + tanh((E - e_switch)/width)) / 2
struct MicrovaristorConductivity {
  double kappa_lo;  // S/m, E -> 0 limit
  double kappa_hi;  // S/m, E -> inf limit
  double e_switch;  // V/m, switching field
  double width;     // V/m, transition width
};

struct MaterialModel {
  double eps_r = 1.0;
  std::variant<ConstantConductivity, MicrovaristorConductivity> conductivity =
      ConstantConductivity{0.0};

  double permittivity() const { return eps_r * vacuum_permittivity; }

  /// Throws ConfigError if parameters violate positivity/monotonicity bounds.
  void validate() const;
};

/// kappa(|E|) in S/m; e_mag must be >= 0.
double kappa_of_e(const MaterialModel& m, double e_mag);

/// Analytic d kappa / d|E|; zero for constant conductivity.
double dkappa_de(const MaterialModel& m, double e_mag);

/// Per-region material table.
using MaterialTable = std::map<int, MaterialModel>;

}  // namespace eqs
