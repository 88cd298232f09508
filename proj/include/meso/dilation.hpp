#ifndef MESO_DILATION_HPP
#define MESO_DILATION_HPP

#include "meso/field.hpp"

namespace meso {

// Anchor of the L-cell containing y, offset by nu: (floor(y/L) + nu) * L.
double anchor(double y, const DilationParams& p);

// Per-cell contraction toward the anchor: (y - anchor)/m + anchor.
double shrink(double y, const DilationParams& p);
Point shrink(Point x, const DilationParams& p, int dim);

// Local dilation: (D B)(x) = B(shrink(x)). Requires 1/L integer so the cells
// tile [0,1]^d and evaluation never leaves the domain.
TensorField dilate_local(const TensorField& field, const DilationParams& p);

// eps-wrapping iota^eps: A(x, lambda) -> A(x, x/eps).
TensorField wrap(const ScaleSeparatedField& a, double eps);

// Partial dilation D^p_m: B(x, lambda) -> B(x, lambda/m). Satisfies
// wrap(dilate_partial(A, m), eps) == wrap(A, m*eps) pointwise.
ScaleSeparatedField dilate_partial(const ScaleSeparatedField& a, double m);

// Structure-aware dilation: A_s + D(A_o); the structure part is untouched.
TensorField dilate_structure_aware(const StructuredField& field, const DilationParams& p);

// Two-scale representation of the dilated wrapped field: returns Atil with
// wrap(Atil, m*eps) == dilate_local(wrap(A, eps), p). On the cell with
// multi-index k the fast argument is phase-shifted by (1 - 1/m)(k + nu) L / eps
// per component.
ScaleSeparatedField represent_dilated(const ScaleSeparatedField& a, double eps,
                                      const DilationParams& p);

}  // namespace meso

#endif
