#include "fcca/fpca.hpp"

#include <cmath>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fcca {

void Grid::validate() const {
  if (points.size() < 2) throw data_error("Grid: need at least 2 points");
  if (points.size() != quad_weights.size())
    throw std::invalid_argument("Grid: weight/point mismatch");
  for (Eigen::Index k = 0; k < points.size(); ++k) {
    if (points[k] < 0.0 || points[k] > 1.0)
      throw data_error("Grid: points must lie in [0,1]");
    if (k > 0 && points[k] <= points[k - 1])
      throw data_error("Grid: points must be strictly increasing");
    if (!(quad_weights[k] > 0.0)) throw data_error("Grid: weights must be positive");
  }
  if (std::abs(quad_weights.sum() - 1.0) > 1e-12)
    throw data_error("Grid: weights must sum to 1");
}

Grid Grid::midpoint(Eigen::Index p) {
  Grid g;
  g.points.resize(p);
  g.quad_weights = Eigen::VectorXd::Constant(p, 1.0 / static_cast<double>(p));
  for (Eigen::Index k = 0; k < p; ++k)
    g.points[k] = (2.0 * static_cast<double>(k) + 1.0) / (2.0 * static_cast<double>(p));
  return g;
}

FunctionalDataset center(const FunctionalDataset& ds) {
  if (ds.n() < 2) throw data_error("center: need at least 2 paths");
  FunctionalDataset out = ds;
  Eigen::RowVectorXd mean = ds.values.colwise().mean();
  out.values.rowwise() -= mean;
  out.mean_curve = mean.transpose();
  out.centered = true;
  return out;
}

namespace {

Eigen::MatrixXd covariance_impl(const FunctionalDataset& ds, bool parallel) {
  if (ds.n() < 2) throw data_error("empirical_covariance: need at least 2 paths");
  if (!ds.centered) throw data_error("empirical_covariance: dataset not centered");
  const Eigen::Index p = ds.values.cols();
  const double inv = 1.0 / static_cast<double>(ds.n() - 1);
  Eigen::MatrixXd k(p, p);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
#endif
  for (Eigen::Index s = 0; s < p; ++s) {
    for (Eigen::Index t = s; t < p; ++t) {
      double v = ds.values.col(s).dot(ds.values.col(t)) * inv;
      k(s, t) = v;
      k(t, s) = v;
    }
  }
  (void)parallel;
  return k;
}

}  // namespace

Eigen::MatrixXd empirical_covariance(const FunctionalDataset& ds) {
  return covariance_impl(ds, true);
}

Eigen::MatrixXd empirical_covariance_serial(const FunctionalDataset& ds) {
  return covariance_impl(ds, false);
}

EigenSystem eigendecompose_kernel(const Eigen::MatrixXd& kernel, const Grid& grid,
                                  Eigen::Index m) {
  grid.validate();
  const Eigen::Index p = grid.size();
  if (kernel.rows() != p || kernel.cols() != p)
    throw std::invalid_argument("eigendecompose_kernel: kernel/grid mismatch");
  if (m < 1 || m > p)
    throw data_error("eigendecompose_kernel: invalid component count");

  Eigen::VectorXd sqrt_w = grid.quad_weights.cwiseSqrt();
  Eigen::MatrixXd b = sqrt_w.asDiagonal() * kernel * sqrt_w.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  if (es.info() != Eigen::Success)
    throw data_error("eigendecompose_kernel: eigensolver failed");

  // Ascending from Eigen; take from the top.
  double lambda_max = es.eigenvalues()[p - 1];
  if (!(lambda_max > 0.0)) throw data_error("eigendecompose_kernel: rank 0 kernel");
  const double floor = 1e-10 * lambda_max;

  EigenSystem sys;
  sys.grid = grid.points;
  sys.quad_weights = grid.quad_weights;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < m; ++j) {
    Eigen::Index idx = p - 1 - j;
    if (es.eigenvalues()[idx] < floor) break;
    keep.push_back(idx);
  }
  if (static_cast<Eigen::Index>(keep.size()) < m)
    std::cerr << "eigendecompose_kernel: retaining " << keep.size() << " of " << m
              << " requested components (eigenvalues below relative floor)\n";
  if (keep.empty()) throw data_error("eigendecompose_kernel: rank 0 kernel");

  const Eigen::Index kept = static_cast<Eigen::Index>(keep.size());
  sys.eigenvalues.resize(kept);
  sys.eigenfunctions.resize(p, kept);
  Eigen::VectorXd inv_sqrt_w = sqrt_w.cwiseInverse();
  for (Eigen::Index j = 0; j < kept; ++j) {
    sys.eigenvalues[j] = es.eigenvalues()[keep[j]];
    Eigen::VectorXd phi = es.eigenvectors().col(keep[j]).cwiseProduct(inv_sqrt_w);
    Eigen::Index arg;
    phi.cwiseAbs().maxCoeff(&arg);
    if (phi[arg] < 0) phi = -phi;
    sys.eigenfunctions.col(j) = phi;
  }
  return sys;
}

Eigen::MatrixXd compute_scores(const FunctionalDataset& ds, const EigenSystem& es) {
  if (ds.values.cols() != es.grid_size() ||
      (ds.grid.points - es.grid).cwiseAbs().maxCoeff() > 1e-12)
    throw data_error("compute_scores: grid mismatch");
  return ds.values * (es.quad_weights.asDiagonal() * es.eigenfunctions);
}

FpcaResult fpca(const FunctionalDataset& ds, Eigen::Index m) {
  FunctionalDataset c = ds.centered ? ds : center(ds);
  Eigen::MatrixXd kernel = empirical_covariance(c);
  FpcaResult res;
  res.eigensystem = eigendecompose_kernel(kernel, c.grid, m);
  res.scores = compute_scores(c, res.eigensystem);
  res.mean_curve = c.mean_curve.size() ? c.mean_curve
                                       : Eigen::VectorXd::Zero(c.values.cols());
  return res;
}

}  // namespace fcca
