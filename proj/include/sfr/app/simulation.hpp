#pragma once

// Solver + integrator + state.

#include <cmath>
#include <functional>
#include <memory>

#include "sfr/solver/solver.hpp"
#include "sfr/time/ssp_rk.hpp"

namespace sfr {

class Simulation {
 public:
  Simulation(const AssembledMesh& mesh, SolverOptions opt, const ButcherTableau& scheme)
      : solver_(std::make_unique<Solver>(mesh, std::move(opt))), rk_(scheme) {
    // the solver lives on the heap, so the callback survives moves of the Simulation
    residual_ = [s = solver_.get()](double t, const std::vector<double>& y, std::vector<double>& f) { s->residual(t, y, f); };
  }

  void initialize(const StateFunction& q0, double t0) {
    u_ = solver_->initial_state(q0, t0);
    t_ = t0;
    step_ = 0;
  }
  // Resume from a stored state (Q~ and |J|_num) at time t.
  void restore(std::vector<double> u, double t, long step = 0) {
    if (u.size() != solver_->state_size()) throw ConfigError("restart state does not match the mesh and degree");
    u_ = std::move(u);
    t_ = t;
    step_ = step;
  }

  Solver& solver() { return *solver_; }
  const Solver& solver() const { return *solver_; }
  const std::vector<double>& state() const { return u_; }
  std::vector<double>& state() { return u_; }
  double time() const { return t_; }
  long step() const { return step_; }
  const RungeKutta& integrator() const { return rk_; }

  void advance(double dt) {
    rk_.advance(u_, t_, dt, residual_, step_ + 1);
    ++step_;
    t_ += dt;
    solver_->sync_jacobian(u_, t_);
  }

  // March to t_end with steps of dt; a final shorter step lands exactly on t_end.
  // after_step runs after every step.
  void run_to(double t_end, double dt, const std::function<void(Simulation&)>& after_step = {}) {
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    if (t_end < t_) throw ConfigError("end time lies before the current time");
    const double tol = 1e-9 * dt;
    const double t0 = t_;
    const long s0 = step_;
    while (t_ < t_end - tol) {
      const double next = t0 + static_cast<double>(step_ - s0 + 1) * dt;
      if (next > t_end + tol) {
        rk_.advance(u_, t_, t_end - t_, residual_, step_ + 1);
        ++step_;
        t_ = t_end;
      } else {
        rk_.advance(u_, t_, dt, residual_, step_ + 1);
        ++step_;
        t_ = next;
      }
      solver_->sync_jacobian(u_, t_);
      if (after_step) after_step(*this);
    }
  }

  // Physical state at every solution point, element-major.
  std::vector<State> physical_states() const {
    std::vector<State> out(u_.size() / state_stride);
    for (size_t p = 0; p < out.size(); ++p) out[p] = Solver::physical(u_, p);
    return out;
  }

 private:
  std::unique_ptr<Solver> solver_;
  RungeKutta rk_;
  Residual residual_;
  std::vector<double> u_;
  double t_ = 0.0;
  long step_ = 0;
};

}  // namespace sfr
