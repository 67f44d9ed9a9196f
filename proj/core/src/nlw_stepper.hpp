#pragma once

#include <vector>

#include "solitonlab/radial_grid.hpp"
#include "solitonlab/wave_dynamics.hpp"

namespace solitonlab::detail {

// Velocity-Verlet stepper for w = rψ (full frame) or w = r(ψ - φ_h)
// (perturbation frame, φ_h the scheme's static solution). The last node is frozen.
class NlwStepper {
 public:
  NlwStepper(const RadialGrid& grid, Frame frame, double dt);

  /// Radial functions in the stepper's frame.
  void set_state(const std::vector<double>& u, const std::vector<double>& ut);
  void set_w(std::vector<double> w, std::vector<double> v);
  void step();

  double time() const noexcept { return time_; }
  void set_time(double t) noexcept { time_ = t; }
  double dt() const noexcept { return dt_; }
  Frame frame() const noexcept { return frame_; }
  const RadialGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& w() const noexcept { return w_; }
  const std::vector<double>& v() const noexcept { return v_; }
  const std::vector<double>& phi_h() const noexcept { return phi_h_; }

  double psi_at(std::size_t i) const;   // ψ
  double u_at(std::size_t i) const;     // ψ - φ_h, φ_h the scheme's static solution
  double ut_at(std::size_t i) const { return v_[i] / grid_[i]; }

  /// Conserved energy of the full-frame w-system and its kinetic plus
  /// gradient part.
  double energy() const;
  double kinetic_gradient() const;

  /// n₊ = (⟨u,g⟩ + ⟨u_t,g⟩/k)/2 in the 3-D radial measure.
  double n_plus(const UnstableMode& mode) const;

  RadialState state() const;

 private:
  void accelerate();
  double full_w(std::size_t i) const;

  RadialGrid grid_;
  Frame frame_;
  double dt_;
  double h_;
  double time_ = 0.0;
  std::vector<double> phi_h_, W_h_;    // static solution of the scheme
  std::vector<double> w_, v_, a_;
};

}  // namespace solitonlab::detail
