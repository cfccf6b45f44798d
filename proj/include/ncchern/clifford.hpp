// Irreducible complex representation of the even Clifford algebra on R^{2n}
// and the graded trace against its chirality element.
//
// Construction: tensor doubling. Level 1 uses the Pauli pair (sigma_1,
// sigma_2); each later level maps existing generators g -> g (x) sigma_3 and
// appends Id (x) sigma_1, Id (x) sigma_2. The chirality element is fixed by
// gamma_0 = -i^{-n} gamma_1 ... gamma_{2n}, which squares to one, is
// Hermitian, and anticommutes with every generator.
//
// The orientation sign is measured, not assumed: on the standard basis the
// graded trace equals orientation * (-i^{-n}) * 2^n, with orientation = +/-1
// depending on n. Downstream formulas that are stated up to an overall
// orientation convention consume this sign.
#pragma once

#include "ncchern/common.hpp"

namespace ncchern {

struct CliffordRep {
  int n = 0;              // half-dimension; generators act on C^{2^n}
  int dim = 0;            // 2^n
  std::vector<Matrix> gamma;  // 2n generators, Hermitian, unitary
  Matrix gamma0;              // chirality element
  int orientation = 0;        // measured sign, +1 or -1
};

// n in [1,4]; larger reps are refused (dimension error).
CliffordRep build_clifford(int n);

// v . gamma = sum_i v_i gamma_i; v must have 2n entries.
Matrix gamma_dot(const CliffordRep& rep, const RVector& v);

// tr{gamma0 (y_1.gamma) ... (y_k.gamma)} for any number of factors.
cxd graded_trace(const CliffordRep& rep, const std::vector<RVector>& ys);

// Determinant form the graded trace of 2n factors must equal:
// orientation * (-i^{-n}) * 2^n * det(y_1,...,y_2n), columns y_i.
cxd graded_trace_closed_form(const CliffordRep& rep,
                             const std::vector<RVector>& ys);

// i^k for integer k (any sign).
cxd unit_imag_pow(int k);

}  // namespace ncchern
