#pragma once

#include <map>
#include <string>
#include <variant>

#include "eqs/dofmap.hpp"
#include "eqs/types.hpp"

namespace eqs {

struct SinusoidWaveform {
  double amplitude = 0.0;  // V
  double frequency = 50.0;  // Hz
  double phase = 0.0;       // rad
};

struct RampWaveform {
  double amplitude = 0.0;  // V, held after rise_time
  double rise_time = 1.0;  // s
};

struct ConstantWaveform {
  double value = 0.0;  // V
};

using Waveform = std::variant<SinusoidWaveform, RampWaveform, ConstantWaveform>;

double waveform_value(const Waveform& w, double t);
double waveform_rate(const Waveform& w, double t);

/// Time-dependent Dirichlet data: one waveform per constrained boundary set.
class BoundaryExcitation {
 public:
  BoundaryExcitation() = default;
  explicit BoundaryExcitation(std::map<std::string, Waveform> per_set)
      : per_set_(std::move(per_set)) {}

  const std::map<std::string, Waveform>& waveforms() const { return per_set_; }
  bool has(const std::string& set) const { return per_set_.count(set) != 0; }

  double value(const std::string& set, double t) const;
  double rate(const std::string& set, double t) const;

  /// Dirichlet values x_B(t), ordered like dofmap.fixed_dofs.
  Vec boundary_values(const DofMap& dm, double t) const;
  /// d x_B / dt at t.
  Vec boundary_rates(const DofMap& dm, double t) const;

 private:
  std::map<std::string, Waveform> per_set_;
};

}  // namespace eqs
