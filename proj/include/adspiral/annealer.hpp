#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adspiral/engine.hpp"
#include "adspiral/lattice.hpp"

namespace adspiral {

/// Annealing functions A(s), B(s) in MHz, tabulated on strictly increasing s
/// and interpolated linearly between knots.
class ScheduleTable {
 public:
  ScheduleTable() = default;
  ScheduleTable(std::vector<double> s, std::vector<double> a, std::vector<double> b);

  /// Whitespace-separated "s A B" rows; '#' starts a comment.
  static ScheduleTable from_text(const std::string& text);
  static ScheduleTable load(const std::string& path);
  /// A(s) = 5000 (1 - s)^2, B(s) = 5000 (0.1 + 0.9 s) on `knots` evenly spaced
  /// points. Made up for testing; not hardware data.
  static ScheduleTable synthetic(int knots = 101);

  double A(double s) const;
  double B(double s) const;
  const std::vector<double>& s() const { return s_; }
  const std::vector<double>& a() const { return a_; }
  const std::vector<double>& b() const { return b_; }
  std::string to_text() const;

 private:
  std::size_t segment(double s) const;
  std::vector<double> s_, a_, b_;
};

struct Waypoint {
  double time;  ///< microseconds
  double s;
};

/// A reverse-anneal program. Energies follow
///   H = 2 pi [ -A(s)/2 sum X + B(s)/2 (h sum s_i Z_i + sum J_ij Z_i Z_j) ]
/// in rad/us, with s(t) piecewise linear through the waypoints.
struct AnnealSchedule {
  ScheduleTable table;
  std::vector<Waypoint> waypoints;
  double h = 2.0;
  double J = 0.1;
  double Jp = 0.1;
  /// Largest |ds/dt| allowed on any segment, per microsecond; 0 disables the check.
  double max_slew = 0.0;

  void validate() const;
  double start_time() const { return waypoints.front().time; }
  double end_time() const { return waypoints.back().time; }
  /// Throws std::out_of_range outside the waypoint span.
  double s_at(double t) const;
};

/// s(t): 1 -> s_star over `ramp`, held for `hold`, back to 1 over `ramp`.
std::vector<Waypoint> reverse_anneal_waypoints(double s_star, double ramp, double hold = 0.0);

/// Couplings the annealer is programmed with: the lattice geometry with J and
/// Jp taken from the schedule. Custom lattices keep their own couplings.
CouplingMatrix programmed_couplings(const AnnealSchedule& sched, const LatticeSpec& spec);

PauliSum build_dwave_hamiltonian(const AnnealSchedule& sched, const LatticeSpec& spec, double t);
PauliSum build_dwave_hamiltonian(const AnnealSchedule& sched, const CouplingMatrix& couplings,
                                 std::span<const int> stagger, double t);

/// Root of A(s) - sqrt(2) h B(s) on the table. Throws std::invalid_argument
/// when the difference never changes sign or vanishes on more than one point.
double find_s_star(const ScheduleTable& table, double h);

enum class AnnealFrame {
  /// Start from |up...up>, the Neel state with its down spins flipped, and
  /// probe the Heisenberg model conjugated by the same flip. This is the frame
  /// in which the annealer Hamiltonian is a spiral Hamiltonian.
  Flipped,
  /// Start from the Neel state and probe the plain Heisenberg model.
  Literal,
};

std::string to_string(AnnealFrame frame);
AnnealFrame anneal_frame_from_string(const std::string& name);

struct AnnealOptions {
  AnnealFrame frame = AnnealFrame::Flipped;
  /// Standard deviation of Gaussian noise added to every programmed coupling.
  double coupling_noise = 0.0;
  std::uint64_t seed = 0;
  /// samples applies per waypoint segment, so every waypoint is sampled.
  EvolutionOptions evolution{.tol = 1e-5, .samples = 40};
};

struct AnnealResult {
  EvolutionResult evolution;     ///< probe energies in units of J
  std::vector<double> s_values;  ///< s at each sample time
  StateVector initial_state;
  double initial_energy = 0.0;
  /// Probe energy at the sample with the smallest s.
  double turning_energy = 0.0;
  double turning_time = 0.0;
  double final_overlap = 0.0;  ///< |<psi(0)|psi(end)>|^2
  double e0 = 0.0;
  double e1 = 0.0;
};

/// Heisenberg model of the lattice in units of J, read in the frame's basis.
PauliSum anneal_probe(const AnnealSchedule& sched, const LatticeSpec& spec, AnnealFrame frame);
StateVector anneal_start_state(const LatticeSpec& spec, AnnealFrame frame);

/// Requires A(s) = 0 at both ends of the program.
AnnealResult run_reverse_anneal(const AnnealSchedule& sched, const LatticeSpec& spec,
                                const AnnealOptions& options = {});

}  // namespace adspiral
