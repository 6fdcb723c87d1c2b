#pragma once

// First-order sensitivity of the largest singular value to single-cell
// perturbations, and the ranking of dynamics cells it induces.

#include <compare>
#include <vector>

#include <Eigen/Dense>

#include "ureach/interval.hpp"

namespace ureach {

struct Cell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline constexpr double kDefaultSvGap = 1e-10;

/// Scores and the cells sorted by decreasing score (ties row-major).
struct OrdMatrix {
  Eigen::MatrixXd scores;
  std::vector<Cell> ranking;

  double score(const Cell& c) const { return scores(c.row, c.col); }
};

/// |u1^T B v1|: the coefficient k in sigma_max(A + eps B) = sigma_max + k eps + O(eps^2).
/// Throws DegenerateSV if sigma_1 - sigma_2 < rel_gap * sigma_1.
double sv_change(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                 double rel_gap = kDefaultSvGap);

/// Ord(i,j) = sv_change(A, A(i,j) e_i e_j^T) = |A(i,j) u1(i) v1(j)|, from one SVD.
OrdMatrix order_cells(const Eigen::MatrixXd& a, double rel_gap = kDefaultSvGap);

/// sigma_max of a Max SV Candidate of L, which equals sup_{E in L} ||E||_2.
double max_sv_radius(const IntervalMatrixd& lambda,
                     int sign_enumeration_limit = kDefaultSignEnumerationLimit);

}  // namespace ureach
