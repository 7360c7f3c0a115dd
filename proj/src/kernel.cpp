#include "sieve/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sieve/basis.hpp"
#include "sieve/error.hpp"
#include "sieve/parallel.hpp"

namespace sieve {

namespace {

void check_unit(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw DomainError("kernel argument outside [0,1]: " + std::to_string(v));
}

void check_dims(std::span<const int> active, Eigen::Index d) {
  for (int k : active) {
    if (k < 0 || k >= d) throw DomainError("active dimension " + std::to_string(k) + " out of range");
  }
}

}  // namespace

double w1_kernel(double s, double t) {
  check_unit(s);
  check_unit(t);
  return std::cosh(std::min(s, t)) * std::cosh(1.0 - std::max(s, t)) / std::sinh(1.0);
}

double w1_mercer_eigenvalue(int j) {
  if (j < 1) throw DomainError("Mercer index must be >= 1");
  if (j == 1) return 1.0;
  const double w = (j - 1) * std::numbers::pi;
  return 1.0 / (1.0 + w * w);
}

double w1_kernel_mercer(double s, double t, int terms) {
  double acc = 0.0;
  for (int j = 1; j <= terms; ++j) {
    acc += w1_mercer_eigenvalue(j) * eval_basis(BasisKind::Cosine, j, s) * eval_basis(BasisKind::Cosine, j, t);
  }
  return acc;
}

double product_kernel(std::span<const double> x, std::span<const double> z,
                      std::span<const int> active_dims) {
  if (x.size() != z.size()) throw DomainError("product_kernel: dimension mismatch");
  double p = 1.0;
  if (active_dims.empty()) {
    for (std::size_t k = 0; k < x.size(); ++k) p *= w1_kernel(x[k], z[k]);
  } else {
    check_dims(active_dims, static_cast<Eigen::Index>(x.size()));
    for (int k : active_dims) p *= w1_kernel(x[static_cast<std::size_t>(k)], z[static_cast<std::size_t>(k)]);
  }
  return p;
}

Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           std::span<const int> active_dims) {
  if (a.cols() != b.cols()) throw DomainError("cross_gram: dimension mismatch");
  // Row-major copies give contiguous points.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ar = a, br = b;
  const auto d = static_cast<std::size_t>(a.cols());
  Eigen::MatrixXd k(a.rows(), b.rows());
  parallel_for(static_cast<std::size_t>(a.rows()), [&](std::size_t i) {
    std::span<const double> xi(ar.row(static_cast<Eigen::Index>(i)).data(), d);
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      k(static_cast<Eigen::Index>(i), j) = product_kernel(xi, std::span<const double>(br.row(j).data(), d), active_dims);
    }
  });
  return k;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& x, std::span<const int> active_dims) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> xr = x;
  const auto d = static_cast<std::size_t>(x.cols());
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  // Upper triangle, mirrored.
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t iu) {
    const auto i = static_cast<Eigen::Index>(iu);
    std::span<const double> xi(xr.row(i).data(), d);
    for (Eigen::Index j = i; j < n; ++j) {
      k(i, j) = product_kernel(xi, std::span<const double>(xr.row(j).data(), d), active_dims);
    }
  });
  k.triangularView<Eigen::StrictlyLower>() = k.transpose().triangularView<Eigen::StrictlyLower>();
  return k;
}

KrrModel::KrrModel(Eigen::MatrixXd features, Eigen::VectorXd alpha, double ridge,
                   std::vector<int> active_dims)
    : features_(std::move(features)), alpha_(std::move(alpha)), ridge_(ridge), active_dims_(std::move(active_dims)) {
  if (alpha_.size() != features_.rows()) throw InputError("KRR model: alpha length mismatch");
  check_dims(active_dims_, features_.cols());
}

Eigen::VectorXd KrrModel::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != features_.cols()) throw InputError("KRR predict: dimension mismatch");
  return cross_gram(x, features_, active_dims_) * alpha_;
}

KrrModel krr_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& y, double ridge,
                 std::vector<int> active_dims) {
  if (features.rows() < 1) throw InputError("KRR: no samples");
  if (features.rows() != y.size()) throw InputError("KRR: feature/outcome length mismatch");
  if (!(ridge > 0.0)) throw DomainError("KRR ridge must be > 0");
  check_dims(active_dims, features.cols());

  const Eigen::Index n = features.rows();
  Eigen::MatrixXd system = gram_matrix(features, active_dims);
  system.diagonal().array() += static_cast<double>(n) * ridge;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    system.diagonal().array() += 1e-10;
    llt.compute(system);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("KRR: Cholesky factorization failed after jitter retry");
    }
  }
  Eigen::VectorXd alpha = llt.solve(y);
  return KrrModel(features, std::move(alpha), ridge, std::move(active_dims));
}

}  // namespace sieve
