#include "schiffer/linear_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace schiffer {

using Eigen::MatrixXd;
using Eigen::VectorXd;

ModeOperator assemble_mode(const FieldGrid& g, const CylinderModel& model, double lambda, int ell) {
  const int K = g.K();
  const auto& rg = g.radial;
  ModeOperator m;
  m.mode = ell;
  m.lambda = lambda;
  const double shift = model.j_m * model.j_m - lambda * double(ell * ell);
  m.op = rg.D2;
  for (int i = 1; i <= K; ++i) m.op.row(i) += (g.N - 1) / rg.r(i) * rg.D.row(i);
  m.op.row(0) = g.N * rg.D2.row(0);
  m.op.diagonal().array() += shift;

  m.parity_row = rg.D.row(0);
  m.matrix = m.op;
  m.matrix.row(0) = m.parity_row;
  m.matrix.row(K).setZero();
  m.matrix(K, K) = 1.0;

  // u_0 = coef . u_{1..K-1}
  const VectorXd coef = -rg.D.row(0).segment(1, K - 1).transpose() / rg.D(0, 0);
  m.reduced = m.op.block(1, 1, K - 1, K - 1) + m.op.block(1, 0, K - 1, 1) * coef.transpose();
  return m;
}

VectorXd ModeOperator::expand(const VectorXd& interior) const {
  const int K = static_cast<int>(op.rows()) - 1;
  VectorXd full = VectorXd::Zero(K + 1);
  full.segment(1, K - 1) = interior;
  full(0) = -parity_row.segment(1, K - 1).dot(interior) / parity_row(0);
  return full;
}

std::vector<ModeOperator> assemble_linearized(const FieldGrid& g, const CylinderModel& model, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("assemble_linearized: lambda must be positive");
  std::vector<ModeOperator> ops;
  for (int ell = 0; ell <= g.L(); ++ell) ops.push_back(assemble_mode(g, model, lambda, ell));
  return ops;
}

Field2D apply_linearized(const std::vector<ModeOperator>& ops, const Field2D& v) {
  Field2D out;
  out.coeffs.resizeLike(v.coeffs);
  for (size_t k = 0; k < ops.size(); ++k) out.coeffs.row(k) = (ops[k].op * v.coeffs.row(k).transpose()).transpose();
  return out;
}

SpectralReport kernel_scan(const FieldGrid& g, const CylinderModel& model, double lambda, double tol) {
  SpectralReport rep;
  rep.lambda = lambda;
  rep.tol = tol;
  const auto ops = assemble_linearized(g, model, lambda);
  std::vector<double> rest;
  Eigen::VectorXd kernel_interior;
  for (const auto& op : ops) {
    Eigen::JacobiSVD<MatrixXd> svd(op.reduced, Eigen::ComputeFullV);
    const VectorXd s = svd.singularValues();
    const int n = static_cast<int>(s.size());
    rep.smallest.push_back(s(n - 1));
    rep.second.push_back(s(n - 2));
    rest.push_back(s(n - 2));
    if (s(n - 1) < tol) {
      ++rep.kernel_count;
      if (!rep.kernel_mode) {
        rep.kernel_mode = op.mode;
        kernel_interior = svd.matrixV().col(n - 1);
      }
    } else {
      rest.push_back(s(n - 1));
    }
  }
  rep.gap = rest.empty() ? 0.0 : *std::min_element(rest.begin(), rest.end());
  if (rep.kernel_count == 1) {
    const auto& op = ops[*rep.kernel_mode];
    VectorXd v = op.expand(kernel_interior);
    v *= model.phi1(0.0) / v(0);
    rep.kernel_vector = v;
    if (*rep.kernel_mode == 1) {
      double err = 0.0;
      for (int i = 0; i <= g.K(); ++i) err = std::max(err, std::abs(v(i) - model.phi1(g.radial.r(i))));
      rep.kernel_profile_error = err;
      Field2D vs = Field2D::zero(g);
      vs.coeffs.row(1) = v.transpose();
      rep.transversality = -inner(g, vs, vs);
    }
  }
  return rep;
}

TransversalityResult transversality(const FieldGrid& g, const CylinderModel& model, double delta) {
  const SpectralReport rep = kernel_scan(g, model, model.lambda_m);
  if (rep.kernel_count != 1 || rep.kernel_mode.value_or(-1) != 1)
    throw std::logic_error("transversality: kernel at lambda_m is not one-dimensional in mode 1");
  Field2D v = Field2D::zero(g);
  v.coeffs.row(1) = rep.kernel_vector.transpose();
  TransversalityResult t;
  t.norm_sq = inner(g, v, v);
  t.analytic = -t.norm_sq;
  const auto plus = assemble_linearized(g, model, model.lambda_m + delta);
  const auto minus = assemble_linearized(g, model, model.lambda_m - delta);
  Field2D dv;
  dv.coeffs = (apply_linearized(plus, v).coeffs - apply_linearized(minus, v).coeffs) / (2.0 * delta);
  t.finite_difference = inner(g, v, dv);
  return t;
}

double weighted_asymmetry(const FieldGrid& g, const ModeOperator& op, const VectorXd& u, const VectorXd& v) {
  const VectorXd& w = g.radial.w;
  const VectorXd Au = op.op * u, Av = op.op * v;
  const double lhs = (Au.array() * v.array() * w.array()).sum();
  const double rhs = (u.array() * Av.array() * w.array()).sum();
  const double scale = std::sqrt((Au.array().square() * w.array()).sum() * (v.array().square() * w.array()).sum());
  return std::abs(lhs - rhs) / scale;
}

double range_residual(const FieldGrid& g, const CylinderModel& model, double lambda, const Field2D& w, double tol) {
  const auto ops = assemble_linearized(g, model, lambda);
  const int K = g.K();
  double res2 = 0.0, rhs2 = 0.0;
  for (const auto& op : ops) {
    const VectorXd b = w.coeffs.row(op.mode).segment(1, K - 1).transpose();
    Eigen::JacobiSVD<MatrixXd> svd(op.reduced, Eigen::ComputeFullU);
    const VectorXd s = svd.singularValues();
    for (int k = 0; k < s.size(); ++k)
      if (s(k) < tol) res2 += std::pow(svd.matrixU().col(k).dot(b), 2);
    rhs2 += b.squaredNorm();
  }
  return rhs2 > 0.0 ? std::sqrt(res2 / rhs2) : 0.0;
}

namespace {

int det_sign(const MatrixXd& a) {
  Eigen::PartialPivLU<MatrixXd> lu(a);
  double s = lu.permutationP().determinant();
  const MatrixXd& m = lu.matrixLU();
  for (int i = 0; i < m.rows(); ++i) s *= (m(i, i) < 0.0 ? -1.0 : 1.0);
  return s < 0.0 ? -1 : 1;
}

}  // namespace

std::vector<double> crossing_scan(const FieldGrid& g, const CylinderModel& model, int ell, double lo, double hi,
                                  int samples) {
  std::vector<double> out;
  auto sign_at = [&](double lam) { return det_sign(assemble_mode(g, model, lam, ell).reduced); };
  double a = lo;
  int sa = sign_at(a);
  for (int k = 1; k <= samples; ++k) {
    const double b = lo + (hi - lo) * k / samples;
    const int sb = sign_at(b);
    if (sa != sb) {
      double x0 = a, x1 = b;
      for (int it = 0; it < 80 && x1 - x0 > 1e-13 * std::max(1.0, std::abs(x1)); ++it) {
        const double mid = 0.5 * (x0 + x1);
        if (sign_at(mid) == sa)
          x0 = mid;
        else
          x1 = mid;
      }
      out.push_back(0.5 * (x0 + x1));
    }
    a = b;
    sa = sb;
  }
  return out;
}

}  // namespace schiffer
