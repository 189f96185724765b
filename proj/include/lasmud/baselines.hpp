#pragma once

#include "lasmud/channel.hpp"

namespace lasmud {

/// b_k = sign(y_k), sign(0) = +1.
BitVector mf_detect(const Observation& obs);

/// sgn(R^-1 y). Fails on singular R.
BitVector decorrelator_detect(const Channel& ch, const Observation& obs);

/// sgn((R + sigma^2 A^-2)^-1 y); degenerates to the decorrelator at sigma=0.
BitVector mmse_detect(const Channel& ch, const Observation& obs);

/// Exhaustive maximizer of f over {-1,+1}^K, walked in Gray-code order with
/// single-flip likelihood updates. Ties broken toward the lexicographically
/// smallest vector (-1 before +1). Refuses K > max_k.
BitVector gml_bruteforce(const Channel& ch, const Observation& obs, int max_k = 24);

/// True iff no single-bit flip strictly increases f. Evaluated by direct
/// likelihood comparison against all K neighbors.
bool lml_check(const Channel& ch, const Observation& obs, const BitVector& b);

}  // namespace lasmud
