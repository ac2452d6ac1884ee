#pragma once

#include <map>
#include <string>
#include <vector>

#include "rydmagic/hamiltonians.hpp"
#include "rydmagic/mps.hpp"
#include "rydmagic/tensor_core.hpp"

namespace rydmagic {

// Manifold angles; the blockade makes the manifold 4pi periodic in each angle.
struct ManifoldPoint {
    double theta_o = 0;
    double theta_e = 0;

    ManifoldPoint canonical() const;
};

// Distance on the 4pi torus.
double manifold_distance(const ManifoldPoint& a, const ManifoldPoint& b);

struct TdvpRhs {
    double d_theta_o = 0;
    double d_theta_e = 0;
    bool singular = false;  // a tan(theta/2) factor hit |cos(theta/2)| < 1e-12 and was replaced by its limit 0
};

TdvpRhs tdvp_rhs(const ManifoldPoint& p);

struct Trajectory {
    std::vector<double> times;
    std::vector<ManifoldPoint> points;
    std::vector<double> singular_crossings;  // times where cos(theta/2) of either angle changes sign
    double halving_error = -1;              // max |x_dt - x_dt/2| over common times, -1 when not checked
    std::map<std::string, std::vector<double>> observables;
};

Trajectory integrate_trajectory(const ManifoldPoint& init, double t_max, double dt, bool check_halving = true);

struct FirstReturn {
    double period = 0;
    double distance = 0;
};

// Closest approach to the start after t_min, refined by golden-section search inside the bracketing step.
FirstReturn first_return(const ManifoldPoint& init, double dt, double t_min, double t_max);

// Mean <PXP> per site of the ansatz at this point (Omega = 1).
double variational_energy(const ManifoldPoint& p);

enum class TrajectoryQuantity { m2, m2_long_range, m2_mixed, m_u };
std::string to_string(TrajectoryQuantity q);

// Evaluates every `stride`-th point; others are NaN. Per-point failures give NaN.
void trajectory_observables(Trajectory& tr, const std::vector<TrajectoryQuantity>& quantities, int threads = 1,
                            int stride = 1, int long_range_grid = 32);

struct QuenchSeries {
    std::vector<double> times;
    std::vector<double> m2;        // per site
    std::vector<double> fidelity;  // |<psi0|psi(t)>|^2
    std::vector<double> norm_error;
};

// Spectral propagation in the constrained basis; SRE by the direct Pauli sum.
QuenchSeries quench_ed(const SparseHamiltonian& h, const ConstrainedBasis& basis, const VectorXc& psi0,
                       const std::vector<double>& times, int n = 2);

// Per-site SRE of exp(-i t X / 2)|0>.
double precession_m2(double t);

enum class GateKind { swap, rotation_second, cnot0 };

struct Gate {
    GateKind kind;
    double theta = 0, phi = 0;  // rotation axis angles (rotation gates only)
};

// Gates in application order. Qubit 0 is the most significant bit.
struct CircuitSpec {
    double theta = 0, phi = 0;
    std::vector<Gate> gates;

    Matrix4c matrix() const;
};

Matrix4c gate_matrix(const Gate& g);
// SWAP, R, CNOT, R, CNOT with R = exp(i pi/2 n.sigma) on qubit 1, n at polar angles (theta/4, phi/4).
// CNOT flips qubit 1 when qubit 0 is |0>.
CircuitSpec mps_unitary(double theta, double phi = 0.0);

// T^s_{ab} = <s, a| U |0, b>: qubit 0 carries the dummy input and the physical output.
SiteTensor circuit_tensors(const Matrix4c& u);

// Staircase of n copies with bond boundaries e0 on both ends.
VectorXc staircase_state(double theta, double phi, int n_sites);

// M(U rho_in U^+) - M(rho_R) with M = -ln(sum tr^4 / sum tr^2) undivided; rho_in = |0><0| (x) rho_R.
double m_u(double theta, double phi = 0.0);
// Two-site cell: average of the per-site estimates, each with rho_R on its own right bond.
double m_u_cell(double theta_o, double theta_e, double phi_o = 0.0, double phi_e = 0.0);

}  // namespace rydmagic
