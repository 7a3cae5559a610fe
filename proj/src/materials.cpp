#include "eqs/materials.hpp"

#include <cmath>
#include <stdexcept>

#include "eqs/errors.hpp"

namespace eqs {

void MaterialModel::validate() const {
  if (!(eps_r > 0.0)) throw ConfigError("material: eps_r must be positive");
  if (const auto* c = std::get_if<ConstantConductivity>(&conductivity)) {
    if (!(c->kappa >= 0.0)) throw ConfigError("material: kappa must be non-negative");
  } else {
    const auto& mv = std::get<MicrovaristorConductivity>(conductivity);
    if (!(mv.kappa_lo > 0.0 && mv.kappa_hi > 0.0))
      throw ConfigError("microvaristor: conductivities must be positive");
    if (!(mv.kappa_hi >= mv.kappa_lo))
      throw ConfigError("microvaristor: kappa_hi must be >= kappa_lo");
    if (!(mv.e_switch > 0.0)) throw ConfigError("microvaristor: e_switch must be positive");
    if (!(mv.width > 0.0)) throw ConfigError("microvaristor: width must be positive");
  }
}

double kappa_of_e(const MaterialModel& m, double e_mag) {
  if (!(e_mag >= 0.0)) throw std::invalid_argument("kappa_of_e: negative field magnitude");
  if (const auto* c = std::get_if<ConstantConductivity>(&m.conductivity)) return c->kappa;
  const auto& mv = std::get<MicrovaristorConductivity>(m.conductivity);
  const double lo = std::log10(mv.kappa_lo);
  const double hi = std::log10(mv.kappa_hi);
  const double s = 0.5 * (1.0 + std::tanh((e_mag - mv.e_switch) / mv.width));
  return std::pow(10.0, lo + (hi - lo) * s);
}

double dkappa_de(const MaterialModel& m, double e_mag) {
  if (!(e_mag >= 0.0)) throw std::invalid_argument("dkappa_de: negative field magnitude");
  if (std::holds_alternative<ConstantConductivity>(m.conductivity)) return 0.0;
  const auto& mv = std::get<MicrovaristorConductivity>(m.conductivity);
  const double lo = std::log10(mv.kappa_lo);
  const double hi = std::log10(mv.kappa_hi);
  const double th = std::tanh((e_mag - mv.e_switch) / mv.width);
  // chain rule through 10^(...) and tanh
  return kappa_of_e(m, e_mag) * std::log(10.0) * (hi - lo) * 0.5 * (1.0 - th * th) / mv.width;
}

}  // namespace eqs
