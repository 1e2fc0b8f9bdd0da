#pragma once

#include "odml/data.hpp"
#include "odml/linalg.hpp"

namespace odml {

/// Entries i.i.d. N(0, 1).
Matrix random_gaussian(Index rows, Index cols, Rng& rng);

/// B B^T / k with B a dim x k Gaussian matrix and k uniform in [1, dim], so
/// both full-rank and rank-deficient matrices occur.
SymMatrix random_psd(Index dim, Rng& rng);

/// rows x dim matrix with orthonormal rows (rows <= dim).
Matrix random_orthonormal_rows(Index rows, Index dim, Rng& rng);

/// U diag(s) V^T with Haar-like U, V and singular values uniform in
/// [sv_low, sv_high].
Matrix random_near_orthonormal(Index rows, Index dim, double sv_low, double sv_high, Rng& rng);

}  // namespace odml
