#pragma once

#include "krein/core.hpp"

namespace krein {

// Blocks of a Hermitian matrix in an orthonormal frame adapted to S + S^perp:
// S_frame * [[a, b], [b*, c]] * S_frame^* reassembles the input.
struct BlockDecomposition {
  Matrix a;        // k x k Hermitian
  Matrix b;        // k x (n-k)
  Matrix c;        // (n-k) x (n-k) Hermitian
  Matrix S_frame;  // unitary, first k columns span S
  Index k = 0;

  Matrix reassemble() const;
};

BlockDecomposition block_decompose(const Matrix& M, const SubspaceBasis& S,
                                   const Tolerance& tol = {});

// S-weak complementability of JW: ran b in ran a (finite dimensions collapse
// ran |a|^{1/2} to ran a).
bool is_weakly_complementable(const KreinMap& W, const SubspaceBasis& S,
                              const Tolerance& tol = {});

// H = S + (WS)^{[perp]}.
bool is_complementable(const KreinMap& W, const SubspaceBasis& S,
                       const Tolerance& tol = {});

// Shorted operator of a Hermitian matrix: 0 on S, c - b* a^+ b on S^perp.
Matrix hilbert_shorted(const Matrix& M, const SubspaceBasis& S,
                       const Tolerance& tol = {});

// W_{/[S]} = Jfs * shorted(Jfs W, S) computed in the Hilbert geometry induced
// by Jfs; the result does not depend on the chosen fundamental symmetry.
KreinMap krein_schur_complement(const KreinMap& W, const SubspaceBasis& S,
                                const Matrix& Jfs, const Tolerance& tol = {});

}  // namespace krein
