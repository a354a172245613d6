#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adspiral/pauli.hpp"

namespace adspiral {

/// Symmetric coupling matrix stored as its upper-triangle bonds (i < j).
class CouplingMatrix {
 public:
  struct Bond {
    int i;
    int j;
    double strength;
  };

  explicit CouplingMatrix(int nsites = 0);

  int nsites() const { return nsites_; }
  std::span<const Bond> bonds() const& { return bonds_; }
  std::span<const Bond> bonds() const&& = delete;
  /// Accumulates into J(i, j); the order of i and j does not matter.
  void add(int i, int j, double strength);
  double operator()(int i, int j) const;
  CouplingMatrix scaled(double factor) const;

 private:
  int nsites_;
  std::vector<Bond> bonds_;
};

enum class LatticeKind { Chain, Comb, Custom };

std::string to_string(LatticeKind kind);
LatticeKind lattice_kind_from_string(const std::string& name);

/// Lattice geometry plus couplings, energies in units of J.
///
/// Chains have L sites with open ends. Combs have 2L sites at coordinates
/// (x, y), x in [0, L), y in {1, 2}, linearised as 2x + (y - 1): the y = 1
/// sites form the backbone and each carries one y = 2 tooth.
///
/// The staggering sign s_i multiplies every staggered field. For combs it is
/// (-1)^(x+y). For chains it is (-1)^(j+1) for zero-based j, i.e. (-1)^j with
/// sites labelled from 1, so the Neel state |up down up down ...> has Z_i = -s_i
/// and is favoured by a positive penalty field on every lattice.
struct LatticeSpec {
  LatticeKind kind = LatticeKind::Chain;
  int length = 2;
  double J = 1.0;
  double Jp = 1.0;
  /// Only for kind == Custom.
  std::optional<CouplingMatrix> custom_couplings;
  /// Optional staggering signs for custom lattices; defaults to the chain pattern.
  std::vector<int> custom_stagger;

  static LatticeSpec chain(int length, double J = 1.0);
  static LatticeSpec comb(int length, double J = 1.0, double Jp = 1.0);
  static LatticeSpec custom(CouplingMatrix couplings, std::vector<int> stagger = {});

  /// Throws std::invalid_argument when the spec violates its invariants.
  void validate() const;
  int nsites() const;
  CouplingMatrix couplings() const;
  std::vector<int> stagger() const;
  /// Prefactor in front of the Ising couplings of the spiral Hamiltonian:
  /// 1/4 for combs and 1 otherwise.
  double spiral_ising_prefactor() const;
};

int comb_site(int x, int y);

enum class PathForm { Linear, SineAugmented };

std::string to_string(PathForm form);
PathForm path_form_from_string(const std::string& name);

/// Drive tilt f(t) and penalty h_P(t) of the adiabatic spiral.
///
/// f(t) = sqrt(2/3) (t/T + sum_n beta_n sin(n pi t / T)), n = 1..betas.size(),
/// so f(0) = 0 and f(T) = sqrt(2/3) for any coefficients. The penalty ramps
/// linearly from hp0 to zero.
struct Schedule {
  double total_time = 25.0;
  double omega = 8.0;
  double hp0 = 0.0;
  PathForm form = PathForm::Linear;
  std::vector<double> betas;

  void validate() const;
  double f(double t) const;
  double hp(double t) const;
  /// Largest f(t) over [0, T], located by a dense scan and golden refinement.
  double max_f() const;
};

inline constexpr double kSpiralEndTilt = 0.816496580927726;  // sqrt(2/3)

PauliSum heisenberg_chain(int length, double J);
PauliSum heisenberg_comb(const LatticeSpec& spec);
/// sum over bonds J_ij (X_i X_j + Y_i Y_j + Z_i Z_j).
PauliSum heisenberg(const CouplingMatrix& couplings);
PauliSum heisenberg(const LatticeSpec& spec);

/// Time-dependent spiral Hamiltonian starting from the Neel state:
///   c sum J_ij Z_i Z_j + sum_i [(omega/2)(Z_i/sqrt3 + f(t) X_i) + (h_P(t)/2) s_i Z_i]
/// with c = spec.spiral_ising_prefactor().
PauliSum spiral_hamiltonian(const LatticeSpec& spec, const Schedule& sched, double t);

/// The spiral Hamiltonian in the basis flipped on the Neel up-sites:
///   c sum J_ij s_i s_j Z_i Z_j + sum_i [(omega/2)(s_i Z_i/sqrt3 + f(t) X_i) + (h_P(t)/2) Z_i].
/// Equals X * spiral_hamiltonian * X with X = neel_flip(spec).
PauliSum tilde_hamiltonian(const LatticeSpec& spec, const Schedule& sched, double t);

/// Product of X over the sites where the Neel state points up, so that
/// Neel = X |down...down>.
PauliString neel_flip(const LatticeSpec& spec);

/// Linear adiabatic path:
///   sum J_ij (Z_i Z_j + (t/T)(X_i X_j + Y_i Y_j)) + hP (1 - t/T) sum_i s_i Z_i.
PauliSum linear_adiabatic(const CouplingMatrix& couplings, std::span<const int> stagger, double hP,
                          double t, double T);

using Point2 = std::array<double, 2>;

/// Van der Waals couplings V0 / |x_i - x_j|^6 between every pair of atoms.
CouplingMatrix rydberg_couplings(std::span<const Point2> positions, double V0);

/// Atom positions for a comb of length L: backbone atoms on a line with
/// spacing a, each tooth displaced by a perpendicular to it, alternating side
/// from one backbone site to the next. Indexed like comb_site.
std::vector<Point2> comb_rydberg_layout(int length, double spacing);

}  // namespace adspiral
