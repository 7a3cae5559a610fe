#pragma once

#include <Eigen/Eigenvalues>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "eqs/ode_system.hpp"
#include "eqs/types.hpp"

namespace eqs::test {

inline Vec random_vec(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = uni(rng);
  return v;
}

inline std::filesystem::path temp_file(const std::string& stem) {
  static int counter = 0;
  return std::filesystem::temp_directory_path() /
         (stem + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

/// Decoupled diagonal surrogate M_i dx_i/dt = -k_i x_i + b_i(t); mass solves
/// and the shifted stage systems are exact divisions. Lets the integrators
/// run against closed-form solutions.
class DiagonalSystem : public OdeSystem {
 public:
  DiagonalSystem(Vec mass, Vec stiffness,
                 std::function<void(double, Vec&)> rhs = {})
      : mass_(std::move(mass)), stiffness_(std::move(stiffness)), rhs_(std::move(rhs)) {}

  int size() const override { return static_cast<int>(mass_.size()); }

  void eval_residual(double t, const Vec& x, Vec& r) override {
    r = -stiffness_.cwiseProduct(x);
    if (rhs_) {
      Vec b(size());
      rhs_(t, b);
      r += b;
    }
  }

  void eval_rhs(double t, const Vec& x, Vec& f) override {
    eval_residual(t, x, f);
    f = f.cwiseQuotient(mass_);
    ++stats_.m_solves;
  }

  void mass_apply(const Vec& v, Vec& y) const override { y = mass_.cwiseProduct(v); }

  void apply_minv_stiffness(double, const Vec&, const Vec& v, Vec& y) override {
    y = stiffness_.cwiseProduct(v).cwiseQuotient(mass_);
    ++stats_.rho_solves;
  }

  void shifted_solve(double, const Vec&, double gdt, const Vec& rhs, Vec& delta,
                     bool refresh) override {
    if (refresh) ++stats_.precond_setups;
    delta = rhs.cwiseQuotient(mass_ + gdt * stiffness_);
    ++stats_.newton_linear_solves;
  }

 private:
  Vec mass_, stiffness_;
  std::function<void(double, Vec&)> rhs_;
};

inline DiagonalSystem scalar_system(double mass, double stiffness,
                                    std::function<double(double)> rhs = {}) {
  Vec m(1), k(1);
  m[0] = mass;
  k[0] = stiffness;
  std::function<void(double, Vec&)> fn;
  if (rhs) fn = [rhs](double t, Vec& b) { b[0] = rhs(t); };
  return DiagonalSystem(std::move(m), std::move(k), std::move(fn));
}

/// Least-squares slope of log2(err) against the dyadic refinement index.
inline double fitted_order(const std::vector<double>& errors) {
  const int n = static_cast<int>(errors.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = -static_cast<double>(i);  // dt halves with each index
    const double y = std::log2(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Classic RK4 with fixed substeps, for reference solutions of scalar ODEs.
inline double rk4_scalar(const std::function<double(double, double)>& f, double y0, double t0,
                         double t1, int steps) {
  double y = y0, t = t0;
  const double h = (t1 - t0) / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1 = f(t, y);
    const double k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = f(t + h, y + h * k3);
    y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return y;
}

}  // namespace eqs::test
