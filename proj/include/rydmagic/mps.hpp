#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rydmagic/tensor_core.hpp"

namespace rydmagic {

// A^0, A^1 of one site; both chi_left x chi_right.
using SiteTensor = std::array<MatrixXc, 2>;

struct UnitCellMPS {
    std::vector<SiteTensor> tensors;  // site 0 is the odd sublattice

    int cell_size() const { return static_cast<int>(tensors.size()); }
    Index chi_left(int site) const { return tensors.at(static_cast<size_t>(site))[0].rows(); }
    Index chi_right(int site) const { return tensors.at(static_cast<size_t>(site))[0].cols(); }
    Index max_chi() const;
    // Throws on inconsistent bond dimensions around the cell.
    void validate() const;
};

enum class Boundary { open, periodic };

struct FiniteMPS {
    std::vector<SiteTensor> tensors;
    Boundary boundary = Boundary::open;

    int n_sites() const { return static_cast<int>(tensors.size()); }
    Index max_chi() const;
    void validate() const;
};

struct TransferFixedPoints {
    cplx lam;
    VectorXc left;   // row-major vec of L with (L|E = lam (L|
    VectorXc right;  // row-major vec of R with E|R) = lam |R)
    MatrixXc left_matrix() const;
    MatrixXc right_matrix() const;
};

SiteTensor pxp_site(double theta, double phi = 0.0);
UnitCellMPS pxp_ansatz(double theta_o, double theta_e, double phi_o = 0.0, double phi_e = 0.0);
UnitCellMPS single_site_cell(const SiteTensor& a);

// sin(theta/2) solving z s^2 + s - z = 0
double h0_theta(double z);
UnitCellMPS h0_ground_state(double z);

// Sum_{s,t} op(t,s) A^s (x) conj(A^t). op = identity gives the ordinary transfer matrix.
MatrixXc site_transfer(const SiteTensor& a, const Matrix2c& op = Matrix2c::Identity());
MatrixXc transfer_matrix(const UnitCellMPS& mps);
TransferFixedPoints fixed_points(const UnitCellMPS& mps, double degeneracy_tol = 1e-9);

// Reduced density matrix of k consecutive sites starting at cell site `offset`; site 0 is the MSB.
MatrixXc rdm(const UnitCellMPS& mps, int k, int offset = 0);

// Right fixed point (trace-normalised density matrix) on the bond to the right of cell site `site`.
MatrixXc bond_density(const UnitCellMPS& mps, int site);

// Multiply every tensor so that the cell transfer matrix has dominant eigenvalue 1.
UnitCellMPS normalized(const UnitCellMPS& mps);

// Apply a single-site unitary to the physical index of cell site `site`.
SiteTensor rotate_site(const SiteTensor& a, const Matrix2c& u);

// Scar cell: B (2x3) on odd sites, C (3x2) on even sites.
SiteTensor scar_b();
SiteTensor scar_c();
UnitCellMPS scar_cell();
// |psi_1> = Tr(B C B C ...), |psi_2> = Tr(C B C B ...); even n, periodic.
std::pair<FiniteMPS, FiniteMPS> scar_mps_pair(int n_sites);

// Blockaded PBC strings of length L.
std::vector<uint32_t> pbc_strings(int L);
// (-1)^{|f|} |f>|f> / sqrt(|F_L|) on 2L sites.
VectorXc rainbow_state(int L);

constexpr int statevector_max_sites = 20;

FiniteMPS to_finite(const UnitCellMPS& mps, int n_sites, const VectorXc& left, const VectorXc& right);
// Default boundary: left (1,0,...), right all-ones.
FiniteMPS to_finite(const UnitCellMPS& mps, int n_sites);
// Periodic chains become open ones with bond chi_0^2 carrying the trace.
FiniteMPS open_boundary(const FiniteMPS& mps);

// Unnormalised contraction. Site 0 maps to the most significant bit.
VectorXc contract(const FiniteMPS& mps);
struct StateVector {
    VectorXc psi;  // normalised
    double norm;   // norm before normalisation
};
StateVector mps_to_statevector(const FiniteMPS& mps);
StateVector mps_to_statevector(const UnitCellMPS& mps, int n_sites);

FiniteMPS concatenate(const FiniteMPS& a, const FiniteMPS& b);
FiniteMPS random_mps(int n_sites, Index chi, uint64_t seed, Boundary boundary = Boundary::open);
double mps_norm_squared(const FiniteMPS& mps);
// Reduced density matrix of sites [site, site + k); site `site` is the MSB.
MatrixXc finite_rdm(const FiniteMPS& mps, int site, int k = 2);
// <psi|O_site|psi> / <psi|psi>
cplx mps_expectation(const FiniteMPS& mps, int site, const Matrix2c& op);

// JSON: {cell_size, chi, tensors: [[A0, A1] per site] with entries [re, im]}
std::string mps_to_json(const UnitCellMPS& mps);
UnitCellMPS mps_from_json(const std::string& text);

}  // namespace rydmagic
