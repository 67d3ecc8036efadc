#include "tapdoe/reactor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tapdoe/constants.hpp"
#include "tapdoe/errors.hpp"
#include "tapdoe/kinetics.hpp"

namespace tapdoe {

void ReactorGeometry::validate() const {
  for (double l : zone_lengths) {
    if (!(l > 0.0)) throw InputError("zone lengths must be > 0");
  }
  for (double e : void_fractions) {
    if (!(e > 0.0 && e < 1.0)) throw InputError("void fractions must lie in (0, 1)");
  }
  if (!(cross_section_area > 0.0)) throw InputError("cross-section area must be > 0");
  if (!(reference_diffusivity > 0.0) || !(reference_mass > 0.0) || !(reference_temperature > 0.0)) {
    throw InputError("reference diffusivity, mass and temperature must be > 0");
  }
}

double ExperimentDesign::intensity(std::string_view gas) const {
  for (const auto& p : pulses) {
    if (p.gas == gas) return p.intensity;
  }
  return 0.0;
}

double ExperimentDesign::delay(std::string_view gas) const {
  for (const auto& p : pulses) {
    if (p.gas == gas) return p.delay;
  }
  return 0.0;
}

void ExperimentDesign::validate() const {
  if (!(temperature > 0.0)) throw InputError("design temperature must be > 0");
  if (!(horizon > 0.0)) throw InputError("design horizon must be > 0");
  for (const auto& p : pulses) {
    if (!(p.intensity >= 0.0)) throw InputError("pulse intensity of " + p.gas + " must be >= 0");
    if (!(p.delay >= 0.0) || !(p.delay < horizon)) {
      throw InputError("pulse delay of " + p.gas + " must lie in [0, horizon)");
    }
  }
}

std::string ExperimentDesign::label() const {
  std::ostringstream out;
  for (const auto& p : pulses) out << p.gas << "=" << p.intensity << "nmol@" << p.delay << "s ";
  out << "T=" << temperature << "K";
  return out.str();
}

std::size_t FluxSeries::gas_index(std::string_view gas) const {
  for (std::size_t i = 0; i < gases.size(); ++i) {
    if (gases[i] == gas) return i;
  }
  throw InputError("flux series has no gas '" + std::string(gas) + "'");
}

Eigen::VectorXd FluxSeries::column(std::string_view gas) const {
  return values.col(static_cast<Eigen::Index>(gas_index(gas)));
}

double FluxSeries::time_step() const {
  if (time.size() < 2) return time.empty() ? 0.0 : time.front();
  return (time.back() - time.front()) / static_cast<double>(time.size() - 1);
}

double FluxSeries::integral(std::string_view gas) const { return column(gas).sum() * time_step(); }

double StateField::gas_inventory(std::size_t g) const {
  double total = 0.0;
  for (std::size_t i = 0; i < gas_weight.size(); ++i) {
    total += gas_weight[i] * gas(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(g));
  }
  return total * area * constants::kNanomolePerMol;
}

double StateField::surface_inventory(std::size_t s) const {
  double total = 0.0;
  for (std::size_t k = 0; k < catalyst_weight.size(); ++k) {
    total += catalyst_weight[k] * surface(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s));
  }
  return total * area * constants::kNanomolePerMol;
}

double knudsen_diffusivity(double molar_mass, double temperature, const ReactorGeometry& geometry) {
  if (!(molar_mass > 0.0) || !(temperature > 0.0)) {
    throw InputError("Knudsen diffusivity needs positive mass and temperature");
  }
  return geometry.reference_diffusivity *
         std::sqrt((geometry.reference_mass / molar_mass) * (temperature / geometry.reference_temperature));
}

double outlet_flux(double gradient, double diffusivity, double area) {
  return -diffusivity * area * gradient * constants::kNanomolePerMol;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// In-place LU with partial pivoting of a small row-major n x n block. Returns false on a zero pivot.
bool lu_factor(double* a, int* piv, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(a[k * n + k]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + k]);
      if (v > best) {
        best = v;
        p = r;
      }
    }
    if (!(best > 0.0) || !std::isfinite(best)) return false;
    piv[k] = static_cast<int>(p);
    if (p != k) std::swap_ranges(a + k * n, a + (k + 1) * n, a + p * n);
    const double inv = 1.0 / a[k * n + k];
    for (std::size_t r = k + 1; r < n; ++r) {
      double* row = a + r * n;
      const double f = row[k] * inv;
      row[k] = f;
      if (f == 0.0) continue;
      const double* top = a + k * n;
      for (std::size_t c = k + 1; c < n; ++c) row[c] -= f * top[c];
    }
  }
  return true;
}

// Solve with a factor from lu_factor; b has n entries and is overwritten.
void lu_solve(const double* a, const int* piv, std::size_t n, double* b) {
  for (std::size_t k = 0; k < n; ++k) {
    const auto p = static_cast<std::size_t>(piv[k]);
    if (p != k) std::swap(b[k], b[p]);
  }
  for (std::size_t r = 1; r < n; ++r) {
    double sum = b[r];
    for (std::size_t c = 0; c < r; ++c) sum -= a[r * n + c] * b[c];
    b[r] = sum;
  }
  for (std::size_t r = n; r-- > 0;) {
    double sum = b[r];
    for (std::size_t c = r + 1; c < n; ++c) sum -= a[r * n + c] * b[c];
    b[r] = sum / a[r * n + r];
  }
}

// Implicit-Euler method-of-lines integrator. Unknowns are the gas concentrations at nodes
// 0..N-1 (node N is the outlet, held at zero) and the surface concentrations at catalyst
// nodes. Each Newton step eliminates the linear inert zones with scalar Thomas sweeps from
// both ends and solves the remaining catalyst block-tridiagonal system with dense blocks.
class PulseIntegrator {
 public:
  PulseIntegrator(const Mechanism& mech, const ReactorGeometry& geom, const ExperimentDesign& design,
                  const ParameterSet* params, const SimulationOptions& opts)
      : mech_(mech), geom_(geom), design_(design), opts_(opts),
        kinetics_(params ? CompiledKinetics(mech, design.temperature, params->energies())
                         : CompiledKinetics(mech, design.temperature)) {
    geom.validate();
    design.validate();
    if (opts.intervals < 4) throw InputError("need at least 4 spatial intervals");
    if (!(opts.dt > 0.0) || !(opts.pulse_width > 0.0)) throw InputError("dt and pulse width must be > 0");
    if (params) params->validate(mech);

    G_ = mech.gas_count();
    S_ = mech.surface_count();
    nb_ = G_ + S_;
    N_ = static_cast<std::size_t>(opts.intervals);
    L_ = geom.length();
    h_ = L_ / static_cast<double>(N_);
    area_ = geom.cross_section_area;

    const double a = geom.zone_lengths[0];
    const double b = a + geom.zone_lengths[1];
    auto zone_eps = [&](std::size_t interval) {
      const double mid = (static_cast<double>(interval) + 0.5) * h_;
      if (mid < a) return geom.void_fractions[0];
      if (mid < b) return geom.void_fractions[1];
      return geom.void_fractions[2];
    };
    cap_.assign(N_, 0.0);
    ell_.assign(N_, 0.0);
    for (std::size_t i = 0; i < N_; ++i) {
      if (i > 0) cap_[i] += zone_eps(i - 1) * h_ / 2;
      cap_[i] += zone_eps(i) * h_ / 2;
      const double lo = std::max(0.0, (static_cast<double>(i) - 0.5) * h_);
      const double hi = (static_cast<double>(i) + 0.5) * h_;
      ell_[i] = std::max(0.0, std::min(hi, b) - std::max(lo, a));
      if (ell_[i] > 1e-12 * h_) cat_nodes_.push_back(i);
    }
    if (kinetics_.inert() || S_ == 0) {
      // no surface chemistry: integrate the gas phase only
      cat_nodes_.clear();
    }
    M_ = cat_nodes_.size();
    p_ = M_ > 0 ? cat_nodes_.front() : N_;
    q_ = M_ > 0 ? cat_nodes_.back() : N_;

    coef_.resize(G_);
    const auto& species = mech.species();
    for (std::size_t g = 0; g < G_; ++g) {
      coef_[g] = knudsen_diffusivity(species[g].molar_mass, design.temperature, geom) / h_;
    }

    pulse_gas_.assign(G_, -1);
    for (std::size_t k = 0; k < design.pulses.size(); ++k) {
      auto idx = mech.find(design.pulses[k].gas);
      if (!idx || *idx >= G_) throw InputError("design pulses unknown gas '" + design.pulses[k].gas + "'");
      pulse_gas_[*idx] = static_cast<int>(k);
    }

    // characteristic magnitudes for the Newton absolute tolerance
    double total_pulse = 0.0;
    for (const auto& p : design.pulses) total_pulse += p.intensity * constants::kMolPerNanomole;
    double mean_eps = (geom.void_fractions[0] + geom.void_fractions[1] + geom.void_fractions[2]) / 3.0;
    gas_scale_ = std::max(total_pulse / (area_ * L_ * mean_eps), 1e-300);
    double site_max = 0.0;
    for (double u0 : mech.initial_surface()) site_max = std::max(site_max, u0);
    surf_scale_ = std::max(site_max, gas_scale_);

    c_.assign(N_ * G_, 0.0);
    u_.assign(M_ * S_, 0.0);
    const auto u0 = mech.initial_surface();
    for (std::size_t k = 0; k < M_; ++k) {
      for (std::size_t s = 0; s < S_; ++s) u_[k * S_ + s] = u0[s];
    }

    blocks_.assign(M_ * nb_ * nb_, 0.0);
    piv_.assign(M_ * nb_, 0);
    couple_.assign(M_ * G_ * nb_, 0.0);
    z_blk_.assign(M_ * nb_, 0.0);
    jac_local_ = Eigen::MatrixXd(nb_, nb_);
    prod_local_.assign(nb_, 0.0);
    y_local_.assign(nb_, 0.0);
    left_c_.assign(N_ * G_, 0.0);
    left_d_.assign(N_ * G_, 0.0);
    dc_.assign(N_ * G_, 0.0);
    du_.assign(M_ * S_, 0.0);
    rgas_.assign(N_ * G_, 0.0);
    rsurf_.assign(M_ * S_, 0.0);
  }

  SimulationResult run() {
    const double dt = opts_.dt;
    const auto n_out = static_cast<std::size_t>(std::llround(design_.horizon / dt));
    if (n_out == 0) throw InputError("horizon shorter than one time step");

    SimulationResult result;
    result.flux.gases = mech_.gas_names();
    result.flux.time.resize(n_out);
    result.flux.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_out), static_cast<Eigen::Index>(G_));

    std::vector<double> src(G_, 0.0);
    std::vector<double> flux_acc(G_, 0.0);
    std::vector<double> c_save, u_save;
    for (std::size_t n = 0; n < n_out; ++n) {
      const double t0 = static_cast<double>(n) * dt;
      const double t1 = static_cast<double>(n + 1) * dt;
      for (std::size_t g = 0; g < G_; ++g) {
        src[g] = 0.0;
        if (pulse_gas_[g] < 0) continue;
        const auto& pulse = design_.pulses[static_cast<std::size_t>(pulse_gas_[g])];
        if (pulse.intensity == 0.0) continue;
        const double lo = n == 0 ? 0.0 : normal_cdf((t0 - pulse.delay) / opts_.pulse_width);
        const double hi = normal_cdf((t1 - pulse.delay) / opts_.pulse_width);
        src[g] = pulse.intensity * constants::kMolPerNanomole * (hi - lo) / (area_ * dt);
      }

      c_save = c_;
      u_save = u_;
      int level = 0;
      while (true) {
        const std::size_t substeps = std::size_t{1} << level;
        const double tau = dt / static_cast<double>(substeps);
        std::fill(flux_acc.begin(), flux_acc.end(), 0.0);
        bool ok = true;
        for (std::size_t k = 0; k < substeps && ok; ++k) {
          ok = newton_step(tau, src);
          if (ok) {
            for (std::size_t g = 0; g < G_; ++g) flux_acc[g] += coef_[g] * c_[(N_ - 1) * G_ + g] / substeps;
          }
        }
        if (ok) break;
        c_ = c_save;
        u_ = u_save;
        ++level;
        ++stats_.halvings;
        if (level > opts_.max_halvings) {
          throw SimulationError(t1, "Newton iteration failed after " + std::to_string(opts_.max_halvings) +
                                        " step halvings");
        }
      }
      ++stats_.steps;
      result.flux.time[n] = t1;
      for (std::size_t g = 0; g < G_; ++g) {
        // coef = D/h, so coef * c_{N-1} is D (c_{N-1} - c_N)/h with c_N = 0
        const double f = flux_acc[g] * area_ * constants::kNanomolePerMol;
        if (!std::isfinite(f)) throw SimulationError(t1, "non-finite outlet flux");
        result.flux.values(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(g)) = f;
      }
      if (opts_.observer) opts_.observer(t1, state());
    }
    result.final_state = state();
    result.stats = stats_;
    return result;
  }

 private:
  StateField state() const {
    StateField f;
    f.area = area_;
    f.gases = mech_.gas_names();
    f.surface_species = mech_.surface_names();
    f.gas = Eigen::MatrixXd(static_cast<Eigen::Index>(N_), static_cast<Eigen::Index>(G_));
    for (std::size_t i = 0; i < N_; ++i) {
      f.x.push_back(static_cast<double>(i) * h_);
      for (std::size_t g = 0; g < G_; ++g) {
        f.gas(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(g)) = c_[i * G_ + g];
      }
    }
    f.gas_weight = cap_;
    f.catalyst_nodes = cat_nodes_;
    f.surface = Eigen::MatrixXd(static_cast<Eigen::Index>(M_), static_cast<Eigen::Index>(S_));
    for (std::size_t k = 0; k < M_; ++k) {
      f.catalyst_weight.push_back(ell_[cat_nodes_[k]]);
      for (std::size_t s = 0; s < S_; ++s) {
        f.surface(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(s)) = u_[k * S_ + s];
      }
    }
    return f;
  }

  // Residuals at the current iterate; fills rgas_, rsurf_ and (for catalyst nodes) blocks_.
  void assemble(double tau, const std::vector<double>& c_old, const std::vector<double>& u_old,
                const std::vector<double>& src) {
    for (std::size_t i = 0; i < N_; ++i) {
      for (std::size_t g = 0; g < G_; ++g) {
        const double ci = c_[i * G_ + g];
        const double right = (i + 1 < N_ ? c_[(i + 1) * G_ + g] : 0.0) - ci;
        const double left = i > 0 ? ci - c_[(i - 1) * G_ + g] : 0.0;
        double r = cap_[i] * (ci - c_old[i * G_ + g]) / tau - coef_[g] * (right - left);
        if (i == 0) r -= src[g];
        rgas_[i * G_ + g] = r;
      }
    }
    for (std::size_t k = 0; k < M_; ++k) {
      const std::size_t i = cat_nodes_[k];
      for (std::size_t g = 0; g < G_; ++g) y_local_[g] = c_[i * G_ + g];
      for (std::size_t s = 0; s < S_; ++s) y_local_[G_ + s] = u_[k * S_ + s];
      jac_local_.setZero();
      kinetics_.production_jacobian(y_local_, prod_local_, jac_local_);

      double* B = &blocks_[k * nb_ * nb_];
      auto copy_row = [&](std::size_t row, double scale) {
        for (std::size_t col = 0; col < nb_; ++col) {
          B[row * nb_ + col] = scale * jac_local_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
        }
      };
      for (std::size_t g = 0; g < G_; ++g) {
        rgas_[i * G_ + g] -= ell_[i] * prod_local_[g];
        copy_row(g, -ell_[i]);
        B[g * nb_ + g] += cap_[i] / tau + coef_[g] * (i == 0 ? 1.0 : 2.0);
      }
      for (std::size_t s = 0; s < S_; ++s) {
        rsurf_[k * S_ + s] = (u_[k * S_ + s] - u_old[k * S_ + s]) / tau - prod_local_[G_ + s];
        copy_row(G_ + s, -1.0);
        B[(G_ + s) * nb_ + G_ + s] += 1.0 / tau;
      }
    }
  }

  double diag(std::size_t i, std::size_t g, double tau) const {
    return cap_[i] / tau + coef_[g] * (i == 0 ? 1.0 : 2.0);
  }

  // Solve J delta = -R into dc_, du_.
  bool solve_linear(double tau) {
    // left inert zone: nodes [0, p_)
    for (std::size_t g = 0; g < G_; ++g) {
      const double off = -coef_[g];
      for (std::size_t i = 0; i < std::min(p_, N_); ++i) {
        const double d = -rgas_[i * G_ + g];
        double b = diag(i, g, tau);
        double dd = d;
        if (i > 0) {
          b -= off * left_c_[(i - 1) * G_ + g];
          dd -= off * left_d_[(i - 1) * G_ + g];
        }
        left_c_[i * G_ + g] = (i + 1 < N_ ? off : 0.0) / b;
        left_d_[i * G_ + g] = dd / b;
      }
    }
    if (M_ == 0) {
      for (std::size_t g = 0; g < G_; ++g) {
        double next = 0.0;
        for (std::size_t i = N_; i-- > 0;) {
          next = left_d_[i * G_ + g] - left_c_[i * G_ + g] * next;
          dc_[i * G_ + g] = next;
        }
      }
      return true;
    }

    // right inert zone: nodes (q_, N_); store x_i = e_i - f_i x_{i-1} in left_* buffers
    for (std::size_t g = 0; g < G_; ++g) {
      const double off = -coef_[g];
      for (std::size_t i = N_; i-- > q_ + 1;) {
        double b = diag(i, g, tau);
        double dd = -rgas_[i * G_ + g];
        if (i + 1 < N_) {
          b -= off * left_c_[(i + 1) * G_ + g];
          dd -= off * left_d_[(i + 1) * G_ + g];
        }
        left_c_[i * G_ + g] = off / b;
        left_d_[i * G_ + g] = dd / b;
      }
    }

    // catalyst block system with the inert zones folded into its end blocks
    const std::size_t bsz = nb_ * nb_;
    for (std::size_t k = 0; k < M_; ++k) {
      const std::size_t i = cat_nodes_[k];
      double* r = &z_blk_[k * nb_];
      for (std::size_t g = 0; g < G_; ++g) r[g] = -rgas_[i * G_ + g];
      for (std::size_t s = 0; s < S_; ++s) r[G_ + s] = -rsurf_[k * S_ + s];
    }
    for (std::size_t g = 0; g < G_; ++g) {
      const double off = -coef_[g];
      if (p_ > 0) {
        blocks_[g * nb_ + g] -= off * left_c_[(p_ - 1) * G_ + g];
        z_blk_[g] -= off * left_d_[(p_ - 1) * G_ + g];
      }
      if (q_ + 1 < N_) {
        blocks_[(M_ - 1) * bsz + g * nb_ + g] -= off * left_c_[(q_ + 1) * G_ + g];
        z_blk_[(M_ - 1) * nb_ + g] -= off * left_d_[(q_ + 1) * G_ + g];
      }
    }
    // forward elimination; couple_ block k holds B_{k-1}^{-1} U_{k-1} stored column by column (G_ columns of nb_)
    for (std::size_t k = 0; k < M_; ++k) {
      double* B = &blocks_[k * bsz];
      double* z = &z_blk_[k * nb_];
      if (k > 0) {
        // B_k -= L_k W, z_k -= L_k z_{k-1}; L_k is -coef on the gas diagonal
        const double* W = &couple_[k * G_ * nb_];
        const double* zp = &z_blk_[(k - 1) * nb_];
        for (std::size_t a = 0; a < G_; ++a) {
          const double la = -coef_[a];
          for (std::size_t b = 0; b < G_; ++b) B[a * nb_ + b] -= la * W[b * nb_ + a];
          z[a] -= la * zp[a];
        }
      }
      int* piv = &piv_[k * nb_];
      if (!lu_factor(B, piv, nb_)) return false;
      lu_solve(B, piv, nb_, z);
      if (k + 1 < M_) {
        double* W = &couple_[(k + 1) * G_ * nb_];
        for (std::size_t g = 0; g < G_; ++g) {
          double* col = W + g * nb_;
          std::fill(col, col + nb_, 0.0);
          col[g] = -coef_[g];
          lu_solve(B, piv, nb_, col);
        }
      }
    }
    for (std::size_t k = M_; k-- > 0;) {
      double* x = &z_blk_[k * nb_];
      if (k + 1 < M_) {
        const double* W = &couple_[(k + 1) * G_ * nb_];
        const double* xn = &z_blk_[(k + 1) * nb_];
        for (std::size_t g = 0; g < G_; ++g) {
          const double* col = W + g * nb_;
          for (std::size_t r = 0; r < nb_; ++r) x[r] -= col[r] * xn[g];
        }
      }
      const std::size_t i = cat_nodes_[k];
      for (std::size_t g = 0; g < G_; ++g) dc_[i * G_ + g] = x[g];
      for (std::size_t s = 0; s < S_; ++s) du_[k * S_ + s] = x[G_ + s];
    }
    for (std::size_t g = 0; g < G_; ++g) {
      for (std::size_t i = p_; i-- > 0;) {
        dc_[i * G_ + g] = left_d_[i * G_ + g] - left_c_[i * G_ + g] * dc_[(i + 1) * G_ + g];
      }
      for (std::size_t i = q_ + 1; i < N_; ++i) {
        dc_[i * G_ + g] = left_d_[i * G_ + g] - left_c_[i * G_ + g] * dc_[(i - 1) * G_ + g];
      }
    }
    return true;
  }

  bool newton_step(double tau, const std::vector<double>& src) {
    const std::vector<double> c_old = c_;
    const std::vector<double> u_old = u_;
    const double gas_atol = opts_.newton_atol * gas_scale_;
    const double surf_atol = opts_.newton_atol * surf_scale_;
    double prev_err = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts_.max_newton_iterations; ++iter) {
      ++stats_.newton_iterations;
      assemble(tau, c_old, u_old, src);
      if (!solve_linear(tau)) return false;

      // undershoot within the negativity tolerance is clamped; deeper undershoot damps the step
      double alpha = 1.0;
      auto limit = [&](double y, double d, double floor) {
        if (d < 0.0 && y > 0.0 && y + d < -floor) alpha = std::min(alpha, 0.99 * y / -d);
      };
      const double gas_floor = opts_.negativity_tolerance * gas_scale_;
      const double surf_floor = opts_.negativity_tolerance * surf_scale_;
      for (std::size_t k = 0; k < c_.size(); ++k) limit(c_[k], dc_[k], gas_floor);
      for (std::size_t k = 0; k < u_.size(); ++k) limit(u_[k], du_[k], surf_floor);

      double err = 0.0;
      bool finite = true;
      auto update = [&](double& y, double d, double atol) {
        const double next = std::max(y + alpha * d, 0.0);
        if (!std::isfinite(next)) finite = false;
        err = std::max(err, std::abs(next - y) / (atol + opts_.newton_rtol * next));
        y = next;
      };
      for (std::size_t k = 0; k < c_.size(); ++k) update(c_[k], dc_[k], gas_atol);
      for (std::size_t k = 0; k < u_.size(); ++k) update(u_[k], du_[k], surf_atol);
      if (!finite) return false;
      if (alpha == 1.0) {
        if (err <= 1.0) return true;
        // contraction estimate: the remaining error after a fast-converging update is below tolerance
        const double rate = err / prev_err;
        if (std::isfinite(prev_err) && rate < 0.5 && err * rate / (1.0 - rate) <= 1.0) return true;
      }
      prev_err = alpha == 1.0 ? err : std::numeric_limits<double>::infinity();
    }
    return false;
  }

  const Mechanism& mech_;
  const ReactorGeometry& geom_;
  const ExperimentDesign& design_;
  const SimulationOptions& opts_;
  CompiledKinetics kinetics_;

  std::size_t G_ = 0, S_ = 0, nb_ = 0, N_ = 0, M_ = 0, p_ = 0, q_ = 0;
  double L_ = 0.0, h_ = 0.0, area_ = 0.0;
  double gas_scale_ = 1.0, surf_scale_ = 1.0;
  std::vector<double> cap_, ell_, coef_;
  std::vector<std::size_t> cat_nodes_;
  std::vector<int> pulse_gas_;
  std::vector<double> c_, u_;

  // catalyst block-tridiagonal workspace, row-major nb x nb blocks
  std::vector<double> blocks_, couple_, z_blk_;
  std::vector<int> piv_;
  Eigen::MatrixXd jac_local_;
  std::vector<double> prod_local_, y_local_;
  std::vector<double> left_c_, left_d_, dc_, du_, rgas_, rsurf_;
  SolverStats stats_;
};

}  // namespace

SimulationResult simulate(const Mechanism& mechanism, const ReactorGeometry& geometry,
                          const ExperimentDesign& design, const ParameterSet& params,
                          const SimulationOptions& options) {
  return PulseIntegrator(mechanism, geometry, design, &params, options).run();
}

SimulationResult simulate(const Mechanism& mechanism, const ReactorGeometry& geometry,
                          const ExperimentDesign& design, const SimulationOptions& options) {
  return PulseIntegrator(mechanism, geometry, design, nullptr, options).run();
}

}  // namespace tapdoe
