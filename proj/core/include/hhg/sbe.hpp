#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "hhg/field.hpp"
#include "hhg/material.hpp"

namespace hhg {

/// Uniform periodic grid on [-pi/a, pi/a); index n wraps to 0.
class KGrid {
 public:
  static constexpr int min_points = 64;

  KGrid(int points, double lattice_constant);

  int size() const noexcept { return points_; }
  double spacing() const noexcept { return spacing_; }
  double operator[](int i) const noexcept { return -zone_edge_ + spacing_ * i; }
  int wrap(int i) const noexcept { return ((i % points_) + points_) % points_; }

 private:
  int points_;
  double zone_edge_;
  double spacing_;
};

enum class Frame { moving, fixed };
enum class Integrator { rk4 };

Frame parse_frame(std::string_view name);
std::string_view to_string(Frame frame);

struct SolverParams {
  /// Dephasing time in units of the carrier period. Infinity disables dephasing.
  double t2_cycles = 0.5;
  Integrator integrator = Integrator::rk4;
  Frame frame = Frame::moving;
  int k_points = 256;
  /// RK4 steps per field sample; the field is interpolated in between.
  int substeps = 2;
  /// Store P and f on the static grid every `snapshot_stride` steps (0: never).
  std::size_t snapshot_stride = 0;
};

void validate(const SolverParams& params);

struct TrajectorySnapshot {
  std::size_t step = 0;
  double time = 0.0;
  std::vector<std::complex<double>> polarization;  ///< P(k, t) on the static grid
  std::vector<double> population;                  ///< f_e = f_h on the static grid
};

/// Output of one SBE integration. The macroscopic reductions are recorded at
/// every field sample; the microscopic state only at snapshot steps.
struct SBETrajectory {
  std::vector<double> time;
  /// Pi(t) = dk sum_k d_k P(k,t) + c.c.
  std::vector<double> polarization;
  /// J_inter(t) = dPi/dt, evaluated from the equations of motion.
  std::vector<double> interband;
  /// J_intra(t) = dk sum_k [v_c(k) f_e + v_h(k) f_h], v_h = -v_v.
  std::vector<double> intraband;
  std::vector<TrajectorySnapshot> snapshots;

  double dt = 0.0;
  double t2 = 0.0;  ///< atomic units
  Frame frame = Frame::moving;
  int k_points = 0;

  double max_population = 0.0;
  double min_population = 0.0;
  /// max over (k,t) of |P|^2 - f(1-f); non-positive for a physical state.
  double max_purity_excess = 0.0;
};

/// Integrates the two-band semiconductor Bloch equations with fixed-step RK4,
///
///   dP/dt = -i [eps_c - eps_v + s d_k E(t)] P + i (1 - f_e - f_h) d_k E(t) - P / T2
///   df/dt = -2 Im[d_k E(t) P*],
///
/// where s is the material's symmetry_break. In the moving frame every grid
/// point follows k(t) = k0 + A(t); in the fixed frame the E d/dk advection
/// terms are discretised with a fourth-order periodic stencil.
///
/// Throws SolverInstability if |P| > 10, a value turns non-finite, or f
/// leaves [-1e-6, 1 + 1e-6].
SBETrajectory evolve(const MaterialModel& material, const FieldTrace& field, const SolverParams& params);

std::vector<double> interband_current(const SBETrajectory& trajectory);
std::vector<double> intraband_current(const SBETrajectory& trajectory);

/// dk sum_k d(k + shift) P(k) + c.c. for states indexed by `grid`.
double interband_polarization(const MaterialModel& material, const KGrid& grid,
                              std::span<const std::complex<double>> polarization, double shift = 0.0);
/// dk sum_k [v_c(k + shift) - v_v(k + shift)] f(k)  (f_e = f_h).
double intraband_current_density(const MaterialModel& material, const KGrid& grid, std::span<const double> population,
                                  double shift = 0.0);

/// Fourth-order centred derivative of a uniformly sampled series.
std::vector<double> differentiate(std::span<const double> samples, double dt);

}  // namespace hhg
