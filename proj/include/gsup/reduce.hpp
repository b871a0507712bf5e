#pragma once

#include <vector>

#include "gsup/types.hpp"

namespace gsup {

using Matrix = Eigen::MatrixXd;

/// An image stack: n images of d1 x d2 pixels, each stored row-major in one row.
struct ImageStack {
  DataMatrix pixels;
  int d1 = 0;
  int d2 = 0;

  Matrix image(Eigen::Index i) const;
  void validate() const;
};

struct MpcaModel {
  /// d1 x r1, orthonormal columns.
  Matrix left_factors;
  /// d2 x r2, orthonormal columns.
  Matrix right_factors;
  /// d1 x d2.
  Matrix mean_image;
  int sweeps = 0;
  /// Mean squared reconstruction error per sweep.
  std::vector<double> error_trace;

  int d1() const { return static_cast<int>(mean_image.rows()); }
  int d2() const { return static_cast<int>(mean_image.cols()); }
  int r1() const { return static_cast<int>(left_factors.cols()); }
  int r2() const { return static_cast<int>(right_factors.cols()); }
};

inline constexpr int kDefaultMpcaSweeps = 5;

MpcaModel mpca_fit(const ImageStack& images, int r1, int r2, int n_sweeps = kDefaultMpcaSweeps);

/// Each image maps to vec(U^T (X - M) V), flattened row-major (r1 x r2).
DataMatrix mpca_project(const MpcaModel& model, const ImageStack& images);

/// Inverse of mpca_project onto the factor span.
ImageStack mpca_reconstruct(const MpcaModel& model, const DataMatrix& features);

/// Mean squared pixel error of project-then-reconstruct.
double mpca_reconstruction_error(const MpcaModel& model, const ImageStack& images);

struct PcaResult {
  DataMatrix scores;
  /// p x r, orthonormal columns.
  Matrix components;
  Vector mean;
  /// Per-variable scale (ones unless correlation is set).
  Vector scale;
  Vector explained_variance_ratio;
};

PcaResult pca_fit_project(const DataMatrix& data, int r, bool correlation = false);

/// Top-r eigenvectors of a symmetric matrix, descending eigenvalue, sign fixed so the
/// largest-magnitude entry of each vector is positive.
Matrix top_eigenvectors(const Matrix& sym, int r, Vector* eigenvalues = nullptr);

}  // namespace gsup
