#ifndef TORIC_LINALG_HPP
#define TORIC_LINALG_HPP

#include <optional>
#include <vector>

#include "toric/rational.hpp"

namespace toric {

// Dense rational matrix, row major. Sizes stay tiny (n <= 6 plus a handful
// of rows), so fraction-free elimination is plenty.
using RatMat = std::vector<RatVec>;

Rat det(RatMat m);                 // square; Gaussian elimination over Q
int rank(RatMat m);                // arbitrary shape
std::optional<RatVec> solve(RatMat a, RatVec b); // square; nullopt if singular

// One-dimensional nullspace of an (n-1) x n matrix of full row rank,
// i.e. the direction orthogonal to all rows. Returns nullopt if the rows
// are linearly dependent.
std::optional<RatVec> nullspace_direction(const RatMat& m, std::size_t n);

RatMat identity_matrix(std::size_t n);
RatVec mat_apply(const RatMat& a, const RatVec& x);

} // namespace toric

#endif
