#ifndef CARNOT_SRC_DET_HPP
#define CARNOT_SRC_DET_HPP

#include <Eigen/Dense>

namespace carnot::detail {

// Determinant with row and column equilibration. The differential of the
// endpoint map grades its rows and columns by factorial weights, and a plain
// LU determinant loses log10(cond) digits to that grading; scaling every row
// and column to unit sup norm first leaves only the angular conditioning,
// and running the factorization in extended precision removes most of what
// that costs. An exactly zero row or column short-circuits to zero.
inline double graded_determinant(Eigen::MatrixXd m) {
  const int n = static_cast<int>(m.rows());
  double scale = 1.0;
  for (int i = 0; i < n; ++i) {
    const double r = m.row(i).cwiseAbs().maxCoeff();
    if (r == 0.0) return 0.0;
    m.row(i) /= r;
    scale *= r;
  }
  for (int j = 0; j < n; ++j) {
    const double c = m.col(j).cwiseAbs().maxCoeff();
    if (c == 0.0) return 0.0;
    m.col(j) /= c;
    scale *= c;
  }
  const long double core =
      m.cast<long double>().eval().partialPivLu().determinant();
  return static_cast<double>(scale * core);
}

}  // namespace carnot::detail

#endif
