#include "hhg/sbe.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hhg/errors.hpp"
#include "hhg/units.hpp"

namespace hhg {

KGrid::KGrid(int points, double lattice_constant)
    : points_(points), zone_edge_(units::pi / lattice_constant), spacing_(2.0 * units::pi / lattice_constant / points) {
  if (points < min_points) throw ConfigError("need at least 64 k-points", "solver.k_points");
  if (!(lattice_constant > 0.0)) throw ConfigError("lattice constant must be positive", "material.lattice_constant_angstrom");
}

Frame parse_frame(std::string_view name) {
  if (name == "moving") return Frame::moving;
  if (name == "static" || name == "fixed") return Frame::fixed;
  throw ConfigError("unknown frame '" + std::string(name) + "' (expected moving or static)", "solver.frame");
}

std::string_view to_string(Frame frame) { return frame == Frame::moving ? "moving" : "static"; }

void validate(const SolverParams& p) {
  if (!(p.t2_cycles > 0.0)) throw ConfigError("must be positive", "solver.t2_cycles");
  if (p.k_points < KGrid::min_points) throw ConfigError("need at least 64 k-points", "solver.k_points");
  if (p.substeps < 1) throw ConfigError("must be at least 1", "solver.substeps");
}

namespace {

constexpr double max_polarization = 10.0;
constexpr double population_slack = 1e-6;

/// Band data sampled on the (possibly shifted) grid. Harmonics of the shift
/// are combined with precomputed harmonics of the grid points through the
/// angle-addition formulas, so a stage costs one sin/cos per series term.
class BandSampler {
 public:
  BandSampler(const MaterialModel& m, const KGrid& grid) : m_(m), grid_(grid) {
    harmonics_ = std::max(m.cond_coeffs.size(), m.val_coeffs.size());
    combined_.assign(harmonics_, 0.0);
    for (std::size_t j = 0; j < m.cond_coeffs.size(); ++j) combined_[j] += m.cond_coeffs[j];
    for (std::size_t j = 0; j < m.val_coeffs.size(); ++j) combined_[j] += m.val_coeffs[j];
    const int n = grid.size();
    cos_.resize(harmonics_ * n);
    sin_.resize(harmonics_ * n);
    for (std::size_t j = 0; j < harmonics_; ++j) {
      for (int i = 0; i < n; ++i) {
        const double arg = static_cast<double>(j + 1) * grid[i] * m.lattice_constant;
        cos_[j * n + i] = std::cos(arg);
        sin_[j * n + i] = std::sin(arg);
      }
    }
    gap_.resize(n);
    dipole_.resize(n);
    gap_slope_.resize(n);
  }

  /// Fills gap(k + shift) and d(k + shift) for every grid point.
  void sample(double shift) {
    const int n = grid_.size();
    std::fill(gap_.begin(), gap_.end(), m_.bandgap);
    for (std::size_t j = 0; j < harmonics_; ++j) {
      const double arg = static_cast<double>(j + 1) * shift * m_.lattice_constant;
      const double cs = std::cos(arg);
      const double ss = std::sin(arg);
      const double c = combined_[j];
      const double* ck = &cos_[j * n];
      const double* sk = &sin_[j * n];
      for (int i = 0; i < n; ++i) gap_[i] += c * (1.0 - (ck[i] * cs - sk[i] * ss));
    }
    if (m_.dipole_width == 0.0) {
      std::fill(dipole_.begin(), dipole_.end(), m_.dipole_scale);
    } else {
      for (int i = 0; i < n; ++i) dipole_[i] = dipole(m_, grid_[i] + shift);
    }
  }

  /// d gap / dk at k + shift, i.e. v_c - v_v.
  const std::vector<double>& gap_slope(double shift) {
    const int n = grid_.size();
    std::fill(gap_slope_.begin(), gap_slope_.end(), 0.0);
    for (std::size_t j = 0; j < harmonics_; ++j) {
      const double order = static_cast<double>(j + 1);
      const double arg = order * shift * m_.lattice_constant;
      const double cs = std::cos(arg);
      const double ss = std::sin(arg);
      const double c = combined_[j] * order * m_.lattice_constant;
      const double* ck = &cos_[j * n];
      const double* sk = &sin_[j * n];
      for (int i = 0; i < n; ++i) gap_slope_[i] += c * (sk[i] * cs + ck[i] * ss);
    }
    return gap_slope_;
  }

  const std::vector<double>& gap() const { return gap_; }
  const std::vector<double>& dipoles() const { return dipole_; }

 private:
  const MaterialModel& m_;
  const KGrid& grid_;
  std::size_t harmonics_ = 0;
  std::vector<double> combined_;
  std::vector<double> cos_, sin_;
  std::vector<double> gap_, dipole_, gap_slope_;
};

struct State {
  std::vector<double> re, im, f;

  explicit State(std::size_t n = 0) : re(n, 0.0), im(n, 0.0), f(n, 0.0) {}
};

// y_out = y + h * k
void axpy(const State& y, const State& k, double h, State& out) {
  const std::size_t n = y.f.size();
  for (std::size_t i = 0; i < n; ++i) {
    out.re[i] = y.re[i] + h * k.re[i];
    out.im[i] = y.im[i] + h * k.im[i];
    out.f[i] = y.f[i] + h * k.f[i];
  }
}

class BlochSystem {
 public:
  BlochSystem(const MaterialModel& m, const KGrid& grid, double t2, Frame frame)
      : m_(m), grid_(grid), bands_(m, grid), damping_(std::isinf(t2) ? 0.0 : 1.0 / t2), frame_(frame) {
    if (frame_ == Frame::fixed) bands_.sample(0.0);
  }

  void derivative(const State& y, double field, double shift, State& dy) {
    if (frame_ == Frame::moving) bands_.sample(shift);
    const auto& gap = bands_.gap();
    const auto& dip = bands_.dipoles();
    const double asym = m_.symmetry_break;
    const std::size_t n = y.f.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double rabi = dip[i] * field;
      const double detuning = gap[i] + asym * rabi;
      const double inversion = 1.0 - 2.0 * y.f[i];
      dy.re[i] = detuning * y.im[i] - damping_ * y.re[i];
      dy.im[i] = -detuning * y.re[i] + rabi * inversion - damping_ * y.im[i];
      dy.f[i] = 2.0 * rabi * y.im[i];
    }
    if (frame_ == Frame::fixed && field != 0.0) advect(y, field, dy);
  }

 private:
  // + E d/dk with the fourth-order periodic stencil.
  void advect(const State& y, double field, State& dy) const {
    const int n = grid_.size();
    const double scale = field / (12.0 * grid_.spacing());
    auto d = [&](const std::vector<double>& v, int i) {
      return (-v[grid_.wrap(i + 2)] + 8.0 * v[grid_.wrap(i + 1)] - 8.0 * v[grid_.wrap(i - 1)] + v[grid_.wrap(i - 2)]);
    };
    for (int i = 0; i < n; ++i) {
      dy.re[i] += scale * d(y.re, i);
      dy.im[i] += scale * d(y.im, i);
      dy.f[i] += scale * d(y.f, i);
    }
  }

  const MaterialModel& m_;
  const KGrid& grid_;
  BandSampler bands_;
  double damping_;
  Frame frame_;
};

double dipole_slope(const MaterialModel& m, double k) {
  const double x = reduce_to_zone(m, k) / m.dipole_width;
  const double denom = 1.0 + x * x;
  return -2.0 * m.dipole_scale * x / (m.dipole_width * denom * denom);
}

// Periodic cubic interpolation of `values` (indexed by grid) at grid
// coordinate x (in units of the spacing).
double periodic_cubic(const std::vector<double>& values, const KGrid& grid, double x) {
  const double base = std::floor(x);
  const double u = x - base;
  const int i = static_cast<int>(base);
  const double w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
  const double w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
  const double w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
  const double w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
  return w0 * values[grid.wrap(i - 1)] + w1 * values[grid.wrap(i)] + w2 * values[grid.wrap(i + 1)] +
         w3 * values[grid.wrap(i + 2)];
}

TrajectorySnapshot make_snapshot(const State& y, const KGrid& grid, Frame frame, double shift, std::size_t step,
                                 double time) {
  TrajectorySnapshot snap;
  snap.step = step;
  snap.time = time;
  const int n = grid.size();
  snap.polarization.resize(n);
  snap.population.resize(n);
  for (int i = 0; i < n; ++i) {
    if (frame == Frame::fixed) {
      snap.polarization[i] = {y.re[i], y.im[i]};
      snap.population[i] = y.f[i];
    } else {
      // The moving-frame point k0 sits at k0 + shift; invert for static k_i.
      const double x = static_cast<double>(i) - shift / grid.spacing();
      snap.polarization[i] = {periodic_cubic(y.re, grid, x), periodic_cubic(y.im, grid, x)};
      snap.population[i] = periodic_cubic(y.f, grid, x);
    }
  }
  return snap;
}

}  // namespace

SBETrajectory evolve(const MaterialModel& material, const FieldTrace& field, const SolverParams& params) {
  validate(params);
  if (field.size() < 4) throw ShapeError("field trace needs at least 4 samples");
  if (field.vector_potential.size() != field.size() || field.field.size() != field.size()) {
    throw ShapeError("field trace arrays differ in length");
  }
  if (field.dt > field.period() / PulseSpec::min_samples_per_cycle * (1.0 + 1e-12)) {
    throw ConfigError("time step too coarse: need dt <= carrier period / 40", "pulse.samples_per_cycle");
  }

  const KGrid grid(params.k_points, material.lattice_constant);
  const double t2 = params.t2_cycles * field.period();
  if (params.frame == Frame::fixed) {
    // RK4 with the fourth-order stencil is stable for |E| h / dk below ~2.
    const double max_field = *std::max_element(field.field.begin(), field.field.end(),
                                               [](double a, double b) { return std::abs(a) < std::abs(b); });
    if (std::abs(max_field) * field.dt / params.substeps / grid.spacing() > 1.5) {
      throw ConfigError("static frame is unstable for this field: reduce the time step or use the moving frame",
                        "solver.frame");
    }
  }

  SBETrajectory traj;
  traj.dt = field.dt;
  traj.t2 = t2;
  traj.frame = params.frame;
  traj.k_points = grid.size();
  traj.time = field.time;
  traj.polarization.resize(field.size());
  traj.interband.resize(field.size());
  traj.intraband.resize(field.size());

  const std::size_t n = static_cast<std::size_t>(grid.size());
  BlochSystem system(material, grid, t2, params.frame);
  State y(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
  std::vector<std::complex<double>> pol(n);

  auto shift_at = [&](double a) { return params.frame == Frame::moving ? a : 0.0; };

  // `rate` is the right-hand side at this sample, so dPi/dt comes straight
  // from the equations of motion.
  auto record = [&](std::size_t step, const State& rate) {
    const double shift = shift_at(field.vector_potential[step]);
    for (std::size_t i = 0; i < n; ++i) pol[i] = {y.re[i], y.im[i]};
    traj.polarization[step] = interband_polarization(material, grid, pol, shift);
    for (std::size_t i = 0; i < n; ++i) pol[i] = {rate.re[i], 0.0};
    double current = interband_polarization(material, grid, pol, shift);
    if (params.frame == Frame::moving && material.dipole_width != 0.0) {
      // d(k0 + A) also moves: dA/dt = -E.
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += dipole_slope(material, grid[static_cast<int>(i)] + shift) * y.re[i];
      current -= 2.0 * grid.spacing() * field.field[step] * sum;
    }
    traj.interband[step] = current;
    traj.intraband[step] = intraband_current_density(material, grid, y.f, shift);
    if (params.snapshot_stride > 0 && step % params.snapshot_stride == 0) {
      traj.snapshots.push_back(make_snapshot(y, grid, params.frame, shift, step, field.time[step]));
    }
  };

  auto check = [&](std::size_t step) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p2 = y.re[i] * y.re[i] + y.im[i] * y.im[i];
      const double f = y.f[i];
      if (!std::isfinite(p2) || !std::isfinite(f) || p2 > max_polarization * max_polarization ||
          f < -population_slack || f > 1.0 + population_slack) {
        throw SolverInstability("SBE integration diverged (|P| = " + std::to_string(std::sqrt(p2)) +
                                    ", f = " + std::to_string(f) + ")",
                                step);
      }
      traj.max_population = std::max(traj.max_population, f);
      traj.min_population = std::min(traj.min_population, f);
      traj.max_purity_excess = std::max(traj.max_purity_excess, p2 - f * (1.0 - f));
    }
  };

  traj.max_purity_excess = -std::numeric_limits<double>::infinity();
  check(0);
  const int substeps = params.substeps;
  const double h = field.dt / substeps;
  for (std::size_t step = 0; step + 1 < field.size(); ++step) {
    for (int sub = 0; sub < substeps; ++sub) {
      const double u0 = static_cast<double>(sub) / substeps;
      const double um = (sub + 0.5) / substeps;
      const double u1 = static_cast<double>(sub + 1) / substeps;
      const double e0 = sub == 0 ? field.field[step] : field.field_at(step, u0);
      const double em = field.field_at(step, um);
      const double e1 = sub + 1 == substeps ? field.field[step + 1] : field.field_at(step, u1);
      const double a0 = shift_at(sub == 0 ? field.vector_potential[step] : field.vector_potential_at(step, u0));
      const double am = shift_at(field.vector_potential_at(step, um));
      const double a1 =
          shift_at(sub + 1 == substeps ? field.vector_potential[step + 1] : field.vector_potential_at(step, u1));

      system.derivative(y, e0, a0, k1);
      if (sub == 0) record(step, k1);
      axpy(y, k1, 0.5 * h, tmp);
      system.derivative(tmp, em, am, k2);
      axpy(y, k2, 0.5 * h, tmp);
      system.derivative(tmp, em, am, k3);
      axpy(y, k3, h, tmp);
      system.derivative(tmp, e1, a1, k4);
      for (std::size_t i = 0; i < n; ++i) {
        y.re[i] += h / 6.0 * (k1.re[i] + 2.0 * (k2.re[i] + k3.re[i]) + k4.re[i]);
        y.im[i] += h / 6.0 * (k1.im[i] + 2.0 * (k2.im[i] + k3.im[i]) + k4.im[i]);
        y.f[i] += h / 6.0 * (k1.f[i] + 2.0 * (k2.f[i] + k3.f[i]) + k4.f[i]);
      }
    }
    check(step + 1);
  }
  const std::size_t last = field.size() - 1;
  system.derivative(y, field.field[last], shift_at(field.vector_potential[last]), k1);
  record(last, k1);
  return traj;
}

double interband_polarization(const MaterialModel& material, const KGrid& grid,
                              std::span<const std::complex<double>> polarization, double shift) {
  if (polarization.size() != static_cast<std::size_t>(grid.size())) throw ShapeError("polarization/grid size mismatch");
  double sum = 0.0;
  if (material.dipole_width == 0.0) {
    for (const auto& p : polarization) sum += p.real();
    sum *= material.dipole_scale;
  } else {
    for (int i = 0; i < grid.size(); ++i) sum += dipole(material, grid[i] + shift) * polarization[i].real();
  }
  // d real: d P + c.c. = 2 d Re P
  return 2.0 * grid.spacing() * sum;
}

double intraband_current_density(const MaterialModel& material, const KGrid& grid, std::span<const double> population,
                                  double shift) {
  if (population.size() != static_cast<std::size_t>(grid.size())) throw ShapeError("population/grid size mismatch");
  double sum = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double k = grid[i] + shift;
    const double electron = group_velocity(material, Band::conduction, k);
    const double hole = -group_velocity(material, Band::valence, k);
    sum += (electron + hole) * population[i];
  }
  return grid.spacing() * sum;
}

std::vector<double> differentiate(std::span<const double> s, double dt) {
  const std::size_t n = s.size();
  std::vector<double> d(n, 0.0);
  if (n < 5) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i == 0 ? 0 : i - 1;
      const std::size_t hi = std::min(i + 1, n - 1);
      if (hi > lo) d[i] = (s[hi] - s[lo]) / (static_cast<double>(hi - lo) * dt);
    }
    return d;
  }
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = (-s[i + 2] + 8.0 * s[i + 1] - 8.0 * s[i - 1] + s[i - 2]) / (12.0 * dt);
  }
  // Fourth-order one-sided stencils at the two points nearest each end.
  d[0] = (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / (12.0 * dt);
  d[1] = (-3.0 * s[0] - 10.0 * s[1] + 18.0 * s[2] - 6.0 * s[3] + s[4]) / (12.0 * dt);
  d[n - 1] = (25.0 * s[n - 1] - 48.0 * s[n - 2] + 36.0 * s[n - 3] - 16.0 * s[n - 4] + 3.0 * s[n - 5]) / (12.0 * dt);
  d[n - 2] = (3.0 * s[n - 1] + 10.0 * s[n - 2] - 18.0 * s[n - 3] + 6.0 * s[n - 4] - s[n - 5]) / (12.0 * dt);
  return d;
}

std::vector<double> interband_current(const SBETrajectory& trajectory) { return trajectory.interband; }

std::vector<double> intraband_current(const SBETrajectory& trajectory) { return trajectory.intraband; }

}  // namespace hhg
