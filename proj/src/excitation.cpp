#include "eqs/excitation.hpp"

#include <cmath>
#include <numbers>

#include "eqs/errors.hpp"

namespace eqs {

double waveform_value(const Waveform& w, double t) {
  if (const auto* s = std::get_if<SinusoidWaveform>(&w))
    return s->amplitude * std::sin(2.0 * std::numbers::pi * s->frequency * t + s->phase);
  if (const auto* r = std::get_if<RampWaveform>(&w))
    return t >= r->rise_time ? r->amplitude : r->amplitude * t / r->rise_time;
  return std::get<ConstantWaveform>(w).value;
}

double waveform_rate(const Waveform& w, double t) {
  if (const auto* s = std::get_if<SinusoidWaveform>(&w)) {
    const double om = 2.0 * std::numbers::pi * s->frequency;
    return s->amplitude * om * std::cos(om * t + s->phase);
  }
  if (const auto* r = std::get_if<RampWaveform>(&w))
    return t >= r->rise_time ? 0.0 : r->amplitude / r->rise_time;
  return 0.0;
}

double BoundaryExcitation::value(const std::string& set, double t) const {
  auto it = per_set_.find(set);
  if (it == per_set_.end()) throw ConfigError("no excitation for boundary set '" + set + "'");
  return waveform_value(it->second, t);
}

double BoundaryExcitation::rate(const std::string& set, double t) const {
  auto it = per_set_.find(set);
  if (it == per_set_.end()) throw ConfigError("no excitation for boundary set '" + set + "'");
  return waveform_rate(it->second, t);
}

Vec BoundaryExcitation::boundary_values(const DofMap& dm, double t) const {
  Vec xb(dm.n_fixed());
  std::vector<double> per_set(dm.set_names.size());
  for (size_t s = 0; s < dm.set_names.size(); ++s) per_set[s] = value(dm.set_names[s], t);
  for (int i = 0; i < dm.n_fixed(); ++i) xb[i] = per_set[dm.fixed_set[dm.fixed_dofs[i]]];
  return xb;
}

Vec BoundaryExcitation::boundary_rates(const DofMap& dm, double t) const {
  Vec xb(dm.n_fixed());
  std::vector<double> per_set(dm.set_names.size());
  for (size_t s = 0; s < dm.set_names.size(); ++s) per_set[s] = rate(dm.set_names[s], t);
  for (int i = 0; i < dm.n_fixed(); ++i) xb[i] = per_set[dm.fixed_set[dm.fixed_dofs[i]]];
  return xb;
}

}  // namespace eqs
