#include "janus/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "janus/error.hpp"

namespace janus::solver {

using assembly::DiscreteOperator;
using assembly::LoadVector;

bool check_compatibility(const LoadVector& f, double tol) {
  double sum = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    sum += f.weights[i] * f.values[i];
    mass += f.weights[i] * std::abs(f.values[i]);
  }
  return std::abs(sum) <= tol * (mass + 1.0);
}

void project(std::span<const double> w, std::span<double> v) {
  const double ww = dot(w, w);
  if (ww == 0.0) return;
  const double c = dot(w, v) / ww;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * w[i];
}

CgReport projected_cg(const Apply& apply, std::span<const double> dir, std::span<const double> b,
                      std::span<double> x, double abs_tol, std::size_t max_iter,
                      std::span<const double> inv_diag) {
  const std::size_t n = b.size();
  Vec r(n), z(n), p(n), q(n);
  auto precondition = [&](std::span<const double> in, std::span<double> out) {
    if (inv_diag.empty()) {
      std::copy(in.begin(), in.end(), out.begin());
      return;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = inv_diag[i] * in[i];
    project(dir, out);
  };
  auto true_residual = [&]() {
    apply(x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    project(dir, r);
    return norm2(r);
  };

  project(dir, x);
  CgReport rep;
  rep.residual = true_residual();
  // Restart from the true residual whenever the recursive one claims convergence.
  while (rep.residual > abs_tol && rep.iterations < max_iter) {
    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    double rnorm = rep.residual;
    while (rep.iterations < max_iter) {
      apply(p, q);
      project(dir, q);
      const double pq = dot(p, q);
      if (!(pq > 0.0)) break;
      const double alpha = rz / pq;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      ++rep.iterations;
      rnorm = norm2(r);
      if (rnorm <= abs_tol) break;
      precondition(r, z);
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    project(dir, x);
    const double previous = rep.residual;
    rep.residual = true_residual();
    if (rnorm > abs_tol && rep.iterations < max_iter) break;  // breakdown
    if (rep.residual > abs_tol && rep.residual >= previous) break;  // stagnation
  }
  rep.converged = rep.residual <= abs_tol;
  return rep;
}

SolveResult solve(const DiscreteOperator& a, const LoadVector& f, const SolveOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = a.size();
  if (f.values.size() != n) throw Error(ErrorCode::DimensionMismatch, "source size");
  if (!check_compatibility(f, options.tol)) {
    throw Error(ErrorCode::IncompatibleSource,
                "weighted source sum " + std::to_string(f.compatibility_sum) + " is not zero");
  }
  const std::size_t max_iter = options.max_iter ? options.max_iter : 20 * std::max<std::size_t>(n, 1);
  const Vec& w = a.weights();
  Vec b = f.weighted();
  project(w, b);
  const double bnorm = norm2(f.weighted());

  SolveResult res;
  res.u.assign(n, 0.0);
  if (options.initial) {
    if (options.initial->size() != n) throw Error(ErrorCode::DimensionMismatch, "initial guess size");
    res.u = *options.initial;
  }
  if (bnorm == 0.0) {
    res.u.assign(n, 0.0);
  } else {
    Vec inv_diag;
    if (options.jacobi) {
      inv_diag = a.matrix().diagonal();
      for (auto& d : inv_diag) d = d > 0.0 ? 1.0 / d : 1.0;
    }
    const CsrMatrix& m = a.matrix();
    const auto rep = projected_cg([&](std::span<const double> x, std::span<double> y) { m.multiply(x, y); },
                                  w, b, res.u, options.tol * bnorm, max_iter, inv_diag);
    res.iterations = rep.iterations;
    res.residual = rep.residual / bnorm;
    if (!rep.converged) {
      throw Error(ErrorCode::NoConvergence,
                  "CG stopped after " + std::to_string(rep.iterations) + " iterations (max_iter " +
                      std::to_string(max_iter) + ") with relative residual " +
                      std::to_string(res.residual));
    }
  }
  res.energy = assembly::energy(a, f, res.u).total();
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

SolveResult solve(const DiscreteOperator& a, const LoadVector& f, double tol, std::size_t max_iter) {
  SolveOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  return solve(a, f, o);
}

double RegionResiduals::max() const {
  return std::max({local_interior, local_boundary, interface, nonlocal});
}

RegionResiduals residual_euler_lagrange(const DiscreteOperator& a, const LoadVector& f,
                                        std::span<const double> u, std::string_view model,
                                        const geometry::Interface* gamma) {
  bool mixed = false;
  if (model == "fractional") {
    mixed = false;
  } else {
    mixed = assembly::uses_interface(assembly::model_from_string(std::string(model)));
  }
  if (mixed && gamma == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "mixed residuals need the interface");
  }
  const std::size_t n = a.size();
  if (u.size() != n || f.values.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "residual: vector sizes do not match the operator");
  }
  const auto& layout = a.layout();
  const auto& local = layout.local();
  const int dim = layout.dimension();

  std::vector<bool> owns_face(local.size(), false);
  if (gamma != nullptr) {
    for (std::size_t k = 0; k < gamma->size(); ++k) owns_face[gamma->owner(k)] = true;
  }

  const Vec au = a.matrix().multiply(u);
  double acc[4] = {0, 0, 0, 0};
  double fnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = f.weights[i];
    const double e = (au[i] - w * f.values[i]) / w;
    fnorm += w * f.values[i] * f.values[i];
    int region = 3;
    if (layout.is_local(i)) {
      if (owns_face[i]) {
        region = 2;
      } else {
        bool interior = true;
        for (int axis = 0; axis < dim && interior; ++axis) {
          for (int side : {-1, 1}) {
            auto nb = local[i];
            nb[static_cast<std::size_t>(axis)] += side;
            if (!local.contains(nb)) interior = false;
          }
        }
        region = interior ? 0 : 1;
      }
    }
    acc[region] += w * e * e;
  }
  const double scale = fnorm > 0.0 ? std::sqrt(fnorm) : 1.0;
  return {std::sqrt(acc[0]) / scale, std::sqrt(acc[1]) / scale, std::sqrt(acc[2]) / scale,
          std::sqrt(acc[3]) / scale};
}

Vec dense_oracle(const DiscreteOperator& a, const LoadVector& f) {
  const std::size_t n = a.size();
  if (n > kDenseLimit) {
    throw Error(ErrorCode::TooLarge, "dense oracle limited to n <= " + std::to_string(kDenseLimit));
  }
  if (f.values.size() != n) throw Error(ErrorCode::DimensionMismatch, "source size");
  if (n == 0) return {};
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(ni, ni);
  const CsrMatrix& m = a.matrix();
  for (std::size_t r = 0; r < n; ++r) {
    for (auto k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k) {
      dense(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m.col_idx()[k])) = m.values()[k];
    }
  }
  const Vec& wv = a.weights();
  const Vec bv = f.weighted();
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(wv.data(), ni);
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(bv.data(), ni);

  // Householder reflector H with H w = -/+ |w| e0; columns 1.. of H span w-perp.
  Eigen::VectorXd v = w;
  v(0) += (w(0) >= 0 ? 1.0 : -1.0) * w.norm();
  const double vv = v.squaredNorm();
  auto reflect = [&](Eigen::MatrixXd& x) { x -= (2.0 / vv) * v * (v.transpose() * x); };
  Eigen::MatrixXd hah = dense;
  reflect(hah);
  hah.transposeInPlace();
  reflect(hah);
  Eigen::VectorXd hb = b - (2.0 / vv) * v * v.dot(b);

  if (n == 1) return Vec(1, 0.0);
  const Eigen::MatrixXd sub = hah.bottomRightCorner(ni - 1, ni - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  const Eigen::VectorXd proj = es.eigenvectors().transpose() * hb.tail(ni - 1);
  Eigen::VectorXd coeff(ni - 1);
  for (Eigen::Index k = 0; k < ni - 1; ++k) coeff(k) = ev(k) > cutoff ? proj(k) / ev(k) : 0.0;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(ni);
  y.tail(ni - 1) = es.eigenvectors() * coeff;
  const Eigen::VectorXd u = y - (2.0 / vv) * v * v.dot(y);
  return Vec(u.data(), u.data() + ni);
}

}  // namespace janus::solver
