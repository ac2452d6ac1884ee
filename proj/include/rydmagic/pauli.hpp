#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rydmagic/tensor_core.hpp"

namespace rydmagic {

// Codes per site: 0=I, 1=X, 2=Y, 3=Z.
struct PauliString {
    std::vector<uint8_t> codes;

    int size() const { return static_cast<int>(codes.size()); }
    std::string str() const;
    static PauliString parse(const std::string& s);
};

// Bit n-1-j of x (z) is set when site j carries X or Y (Z or Y).
struct PauliMasks {
    uint64_t x = 0;
    uint64_t z = 0;
};

PauliMasks to_masks(const PauliString& p);
PauliString from_masks(PauliMasks m, int n_sites);

// P|b> = i^{|x&z|} (-1)^{|b&z|} |b^x>
cplx pauli_expectation(const VectorXc& psi, PauliMasks m);
// Same, summing only over the listed basis indices (the nonzero support of psi).
cplx pauli_expectation(const VectorXc& psi, PauliMasks m, const std::vector<uint64_t>& support);

// Dense 2^n x 2^n matrix of a Pauli string (site 0 is the leftmost kron factor).
MatrixXc pauli_matrix(const PauliString& p);

// In-place Walsh-Hadamard transform, length a power of two.
void fwht(std::vector<cplx>& a);

}  // namespace rydmagic
