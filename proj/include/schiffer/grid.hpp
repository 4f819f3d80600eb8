#pragma once

#include <Eigen/Dense>
#include <functional>

namespace schiffer {

// Chebyshev-Gauss-Lobatto nodes 0 = r_0 < ... < r_K = 1.
class RadialGrid {
public:
  static RadialGrid chebyshev(int K, const std::function<double(double)>& weight);
  // Weight r^{N-1}.
  static RadialGrid for_dimension(int K, int N);

  int K() const { return static_cast<int>(r.size()) - 1; }

  // Lagrange interpolation row: f(x) ~ row . f_nodes.
  Eigen::RowVectorXd interpolation_row(double x) const;
  double interpolate(const Eigen::VectorXd& f, double x) const;

  Eigen::VectorXd r;
  Eigen::MatrixXd D;   // d/dr
  Eigen::MatrixXd D2;  // d^2/dr^2
  Eigen::VectorXd w;   // int_0^1 f(r) weight(r) dr ~ w . f
  Eigen::VectorXd bary;
};

// Cosine modes cos(k * stride * x), k = 0..L, collocated at x_j = pi j / (M stride).
class CosineGrid {
public:
  static CosineGrid make(int L, int M, int stride = 1);

  int L() const { return static_cast<int>(E.cols()) - 1; }
  int M() const { return static_cast<int>(E.rows()) - 1; }
  int stride = 1;

  Eigen::VectorXd x;
  Eigen::MatrixXd E;    // values from coefficients
  Eigen::MatrixXd Ex;   // x-derivative values from coefficients
  Eigen::MatrixXd Exx;
  Eigen::MatrixXd P;    // coefficients from values (exact inverse of E when L = M)

  // Rows evaluating the series or its derivatives at arbitrary x.
  Eigen::RowVectorXd row(double x, int derivative = 0) const;
  // Weight of mode k in int_0^{2pi} cos^2.
  double norm(int k) const;
};

struct FieldGrid {
  RadialGrid radial;
  CosineGrid angular;
  int N = 1;

  int K() const { return radial.K(); }
  int L() const { return angular.L(); }
  int M() const { return angular.M(); }
};

FieldGrid make_cylinder_grid(int N, int K = 48, int L = 16, int M = 16);

// Clenshaw-Curtis nodes and weights on [0,1] with n+1 points.
void clenshaw_curtis(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace schiffer
