#ifndef MMCA_SVG_HPP
#define MMCA_SVG_HPP

#include <string>
#include <vector>

#include "mmca/types.hpp"

namespace mmca {

/// Static biplot scatter: one <circle> per row point of X, one <rect> plus
/// label per category point of A, for the two selected dimensions (0-based).
/// Axis annotations carry the singular values. Output is byte-stable for
/// identical inputs.
std::string biplot_svg(const Matrix& x, const Matrix& a,
                       const std::vector<std::string>& category_labels, const Vector& d,
                       int dim_x, int dim_y);

}  // namespace mmca

#endif  // MMCA_SVG_HPP
