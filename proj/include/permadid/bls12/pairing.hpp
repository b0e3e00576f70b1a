#pragma once

#include <utility>
#include <vector>

#include "permadid/bls12/groups.hpp"

namespace permadid::bls12 {

/// Curve parameter |x|; the BLS12-381 x is the negative of this value.
inline constexpr uint64_t kAbsX = 0xd201000000010000ULL;

/// Product of Miller loops over the given (G1, G2) pairs. Pairs with an
/// identity on either side contribute the neutral element.
Fp12 miller_loop(const std::vector<std::pair<G1Affine, G2Affine>>& pairs);

/// f^(p^6 - 1)(p^2 + 1): maps into the cyclotomic subgroup.
Fp12 final_exp_easy(const Fp12& f);

/// f^((p^4 - p^2 + 1)/r) for cyclotomic-subgroup f, via the fixed addition
/// chain in x.
Fp12 final_exp_hard(const Fp12& f);

Fp12 final_exponentiation(const Fp12& f);

/// The optimal ate pairing e(P, Q).
Fp12 pairing(const G1Affine& p, const G2Affine& q);

/// True when the product of pairings over all pairs equals one. The usual
/// verification shape e(A, X) == e(B, Y) is checked as
/// pairing_product_is_one({{A, X}, {-B, Y}}).
bool pairing_product_is_one(const std::vector<std::pair<G1Affine, G2Affine>>& pairs);

}  // namespace permadid::bls12
