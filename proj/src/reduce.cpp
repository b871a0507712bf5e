#include "gsup/reduce.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "gsup/error.hpp"
#include "gsup/tolerances.hpp"

namespace gsup {

namespace {

using RowImage = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void check_rank(int r, int d, const char* what) {
  if (r < 1 || r > d) {
    throw DimensionError(std::string(what) + " must lie in [1, " + std::to_string(d) + "], got " + std::to_string(r));
  }
}

}  // namespace

Matrix ImageStack::image(Eigen::Index i) const { return RowImage(pixels.row(i).data(), d1, d2); }

void ImageStack::validate() const {
  if (d1 < 1 || d2 < 1) throw DimensionError("image side lengths must be positive");
  if (pixels.cols() != static_cast<Eigen::Index>(d1) * d2) throw DimensionError("image stack width does not match d1 * d2");
  if (!pixels.allFinite()) throw InputError("image stack contains non-finite values");
}

Matrix top_eigenvectors(const Matrix& sym, int r, Vector* eigenvalues) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw DomainError("eigendecomposition failed");
  const Eigen::Index d = sym.rows();
  Matrix out(d, r);
  if (eigenvalues) eigenvalues->resize(r);
  for (int k = 0; k < r; ++k) {
    // Eigen sorts ascending.
    Vector v = solver.eigenvectors().col(d - 1 - k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    out.col(k) = v;
    if (eigenvalues) (*eigenvalues)(k) = solver.eigenvalues()(d - 1 - k);
  }
  return out;
}

MpcaModel mpca_fit(const ImageStack& images, int r1, int r2, int n_sweeps) {
  images.validate();
  check_rank(r1, images.d1, "r1");
  check_rank(r2, images.d2, "r2");
  if (images.pixels.rows() < 2) throw DimensionError("mpca needs at least 2 images");
  if (n_sweeps < 1) throw DomainError("n_sweeps must be >= 1");

  const Eigen::Index n = images.pixels.rows();
  MpcaModel model;
  const Vector mean = images.pixels.colwise().mean().transpose();
  model.mean_image = RowImage(mean.data(), images.d1, images.d2);

  std::vector<Matrix> centered(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) centered[static_cast<std::size_t>(i)] = images.image(i) - model.mean_image;

  model.right_factors = Matrix::Identity(images.d2, r2);
  double previous = 0.0;
  for (int sweep = 0; sweep < n_sweeps; ++sweep) {
    Matrix cov1 = Matrix::Zero(images.d1, images.d1);
    for (const auto& x : centered) {
      const Matrix xv = x * model.right_factors;
      cov1.noalias() += xv * xv.transpose();
    }
    model.left_factors = top_eigenvectors(cov1, r1);

    Matrix cov2 = Matrix::Zero(images.d2, images.d2);
    for (const auto& x : centered) {
      const Matrix ux = model.left_factors.transpose() * x;
      cov2.noalias() += ux.transpose() * ux;
    }
    model.right_factors = top_eigenvectors(cov2, r2);

    const double err = mpca_reconstruction_error(model, images);
    model.error_trace.push_back(err);
    model.sweeps = sweep + 1;
    if (sweep > 0 && previous - err < tol::kMpcaImprovement) break;
    previous = err;
  }
  return model;
}

DataMatrix mpca_project(const MpcaModel& model, const ImageStack& images) {
  images.validate();
  if (images.d1 != model.d1() || images.d2 != model.d2()) throw DimensionError("image dimensions do not match the model");
  const Eigen::Index n = images.pixels.rows();
  DataMatrix out(n, static_cast<Eigen::Index>(model.r1()) * model.r2());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f =
        model.left_factors.transpose() * (images.image(i) - model.mean_image) * model.right_factors;
    out.row(i) = Eigen::Map<const Vector>(f.data(), f.size()).transpose();
  }
  return out;
}

ImageStack mpca_reconstruct(const MpcaModel& model, const DataMatrix& features) {
  if (features.cols() != static_cast<Eigen::Index>(model.r1()) * model.r2()) {
    throw DimensionError("feature width does not match r1 * r2");
  }
  ImageStack out;
  out.d1 = model.d1();
  out.d2 = model.d2();
  out.pixels.resize(features.rows(), static_cast<Eigen::Index>(out.d1) * out.d2);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const Matrix f = RowImage(features.row(i).data(), model.r1(), model.r2());
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x =
        model.left_factors * f * model.right_factors.transpose() + model.mean_image;
    out.pixels.row(i) = Eigen::Map<const Vector>(x.data(), x.size()).transpose();
  }
  return out;
}

double mpca_reconstruction_error(const MpcaModel& model, const ImageStack& images) {
  const ImageStack back = mpca_reconstruct(model, mpca_project(model, images));
  return (back.pixels - images.pixels).squaredNorm() / static_cast<double>(images.pixels.size());
}

PcaResult pca_fit_project(const DataMatrix& data, int r, bool correlation) {
  const auto p = static_cast<int>(data.cols());
  check_rank(r, p, "rank");
  if (data.rows() < 2) throw DimensionError("pca needs at least 2 rows");
  if (!data.allFinite()) throw InputError("data contains non-finite values");

  PcaResult res;
  res.mean = data.colwise().mean().transpose();
  Matrix centered = data.rowwise() - res.mean.transpose();
  res.scale = Vector::Ones(p);
  if (correlation) {
    res.scale = (centered.colwise().squaredNorm() / static_cast<double>(data.rows() - 1)).cwiseSqrt().transpose();
    for (int j = 0; j < p; ++j) {
      if (res.scale(j) <= 0.0) throw DomainError("correlation PCA: variable " + std::to_string(j) + " is constant");
    }
    centered = centered.array().rowwise() / res.scale.transpose().array();
  }
  const Matrix cov = centered.transpose() * centered / static_cast<double>(data.rows() - 1);
  Vector eig;
  res.components = top_eigenvectors(cov, r, &eig);
  res.explained_variance_ratio = eig.cwiseMax(0.0) / cov.trace();
  res.scores = centered * res.components;
  return res;
}

}  // namespace gsup
