#ifndef MMCA_DATASET_HPP
#define MMCA_DATASET_HPP

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "mmca/types.hpp"

namespace mmca {

// ============================================================================
// CategoricalDataset
// ============================================================================

struct Variable {
  std::string name;
  std::vector<std::string> categories;  // ordered, no duplicates
};

/// An n x J table of category indices, -1 marking a missing cell.
class CategoricalDataset {
 public:
  static constexpr int kMissing = -1;

  CategoricalDataset(int n, std::vector<Variable> variables, std::vector<int> cells);

  int n() const { return n_; }
  int variables() const { return static_cast<int>(vars_.size()); }
  const Variable& variable(int j) const { return vars_[static_cast<size_t>(j)]; }
  const std::vector<Variable>& variable_list() const { return vars_; }

  int cell(int i, int j) const { return cells_[static_cast<size_t>(i) * vars_.size() + j]; }
  bool missing(int i, int j) const { return cell(i, j) == kMissing; }

  BlockShape shape() const;

 private:
  int n_ = 0;
  std::vector<Variable> vars_;
  std::vector<int> cells_;  // n x J row-major
};

// ============================================================================
// IndicatorMatrix
// ============================================================================

/// Super indicator matrix G with observation mask W. A missing (i, j) cell is
/// a block of zeros in both values and mask; an observed cell is a one-hot
/// block in values and an all-ones block in mask.
struct IndicatorMatrix {
  Matrix values;  // n x K of {0, 1}
  Matrix mask;    // n x K of {0, 1}
  BlockShape shape;

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }

  bool observed(int i, int j) const { return mask(i, shape.offset(j)) != 0.0; }
  bool fully_observed() const { return mask.minCoeff() > 0.0; }

  // Category index chosen in block j of row i, or -1 when missing.
  int cell_index(int i, int j) const;

  // Number of observed (i, j) cells.
  int observed_cells() const;

  // Throws if the block structure or the one-hot/mask coupling is violated.
  void validate() const;
};

// ============================================================================
// Operations
// ============================================================================

/// Parse a header-row CSV of categorical variables. Categories are enumerated
/// per column in order of first appearance; cells equal to na_token become
/// missing. Fields are trimmed of surrounding ASCII whitespace; no quoting.
CategoricalDataset parse_csv(std::istream& in, const std::string& na_token = "NA");

IndicatorMatrix build_indicator(const CategoricalDataset& data);

// Inverse of build_indicator on the index level: n x J cell indices, -1 for
// missing blocks.
std::vector<int> decode_cells(const IndicatorMatrix& g);

/// Column sums 1'G (observed category counts).
Vector category_margins(const IndicatorMatrix& g);

/// Draw each (i, j) cell independently from softmax(mu_j + interaction_ij).
/// Sampling is inverse-CDF with a counter-based generator keyed by
/// (seed, i, j): the result is reproducible regardless of scheduling.
IndicatorMatrix simulate_multinomial(const Vector& mu, const Matrix& interaction,
                                     const BlockShape& shape, std::uint64_t seed);

/// Dense 0/1 CSV dump of an indicator matrix (debugging aid).
void write_indicator_csv(std::ostream& out, const IndicatorMatrix& g);

}  // namespace mmca

#endif  // MMCA_DATASET_HPP
