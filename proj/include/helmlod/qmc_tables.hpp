#pragma once

// Constant tables backing the low-discrepancy generators: Sobol direction
// numbers (dims 2..1024; dimension 1 is the van der Corput dimension) and a
// rank-1 lattice generating vector.  See src/qmc_tables.cpp for provenance.

#include <cstdint>

namespace helmlod::qmc {

inline constexpr int kSobolTableDims = 1024;
inline constexpr int kSobolMCount = 12092;
extern const std::uint32_t kSobolPoly[kSobolTableDims - 1];
extern const std::uint32_t kSobolMInit[kSobolMCount];
extern const char kSobolTableId[];

inline constexpr int kLatticeTableDims = 64;
extern const std::uint32_t kLatticeZ[kLatticeTableDims];
extern const char kLatticeTableId[];

}  // namespace helmlod::qmc
