#include "schiffer/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace schiffer {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void clenshaw_curtis(int n, VectorXd& nodes, VectorXd& weights) {
  const double pi = std::numbers::pi;
  nodes.resize(n + 1);
  weights.setZero(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double th = k * pi / n;
    nodes(k) = 0.5 * (1.0 - std::cos(th));
    double v = 1.0;
    if (k == 0 || k == n) {
      weights(k) = (n % 2 == 0) ? 1.0 / (n * n - 1.0) : 1.0 / (n * double(n));
      continue;
    }
    if (n % 2 == 0) {
      for (int j = 1; j < n / 2; ++j) v -= 2.0 * std::cos(2.0 * j * th) / (4.0 * j * j - 1.0);
      v -= std::cos(n * th) / (n * n - 1.0);
    } else {
      for (int j = 1; j <= (n - 1) / 2; ++j) v -= 2.0 * std::cos(2.0 * j * th) / (4.0 * j * j - 1.0);
    }
    weights(k) = 2.0 * v / n;
  }
  weights *= 0.5;
}

RadialGrid RadialGrid::chebyshev(int K, const std::function<double(double)>& weight) {
  if (K < 4) throw std::invalid_argument("RadialGrid: K must be >= 4");
  const double pi = std::numbers::pi;
  RadialGrid g;
  g.r.resize(K + 1);
  g.bary.resize(K + 1);
  for (int i = 0; i <= K; ++i) {
    g.r(i) = 0.5 * (1.0 - std::cos(i * pi / K));
    g.bary(i) = ((i % 2) ? -1.0 : 1.0) * ((i == 0 || i == K) ? 0.5 : 1.0);
  }
  // Node differences through the product formula avoid cancellation near the ends.
  auto diff = [&](int i, int j) {
    return std::sin((i + j) * pi / (2.0 * K)) * std::sin((i - j) * pi / (2.0 * K));
  };
  g.D.setZero(K + 1, K + 1);
  for (int i = 0; i <= K; ++i) {
    double s = 0.0;
    for (int j = 0; j <= K; ++j) {
      if (i == j) continue;
      g.D(i, j) = (g.bary(j) / g.bary(i)) / diff(i, j);
      s += g.D(i, j);
    }
    g.D(i, i) = -s;
  }
  g.D2 = g.D * g.D;

  VectorXd q, cw;
  clenshaw_curtis(4 * K + 64, q, cw);
  g.w.setZero(K + 1);
  for (int k = 0; k < q.size(); ++k) g.w += (cw(k) * weight(q(k))) * g.interpolation_row(q(k)).transpose();
  return g;
}

RadialGrid RadialGrid::for_dimension(int K, int N) {
  return chebyshev(K, [N](double r) { return std::pow(r, N - 1); });
}

Eigen::RowVectorXd RadialGrid::interpolation_row(double x) const {
  const int n = static_cast<int>(r.size());
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (x == r(j)) {
      row(j) = 1.0;
      return row;
    }
  }
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    row(j) = bary(j) / (x - r(j));
    s += row(j);
  }
  return row / s;
}

double RadialGrid::interpolate(const VectorXd& f, double x) const { return interpolation_row(x).dot(f); }

CosineGrid CosineGrid::make(int L, int M, int stride) {
  if (L < 1 || M < L || stride < 1) throw std::invalid_argument("CosineGrid: need 1 <= L <= M, stride >= 1");
  const double pi = std::numbers::pi;
  CosineGrid c;
  c.stride = stride;
  c.x.resize(M + 1);
  c.E.resize(M + 1, L + 1);
  c.Ex.resize(M + 1, L + 1);
  c.Exx.resize(M + 1, L + 1);
  for (int j = 0; j <= M; ++j) {
    c.x(j) = pi * j / (double(M) * stride);
    for (int k = 0; k <= L; ++k) {
      const double th = pi * double(k) * j / M;
      const double f = double(k) * stride;
      c.E(j, k) = std::cos(th);
      c.Ex(j, k) = -f * std::sin(th);
      c.Exx(j, k) = -f * f * std::cos(th);
    }
  }
  // DCT-I inverse, truncated to the first L+1 modes.
  c.P.resize(L + 1, M + 1);
  for (int k = 0; k <= L; ++k) {
    const double gk = (k == 0 || k == M) ? 2.0 : 1.0;
    for (int j = 0; j <= M; ++j) {
      const double hj = (j == 0 || j == M) ? 0.5 : 1.0;
      c.P(k, j) = 2.0 * hj * std::cos(pi * double(k) * j / M) / (M * gk);
    }
  }
  return c;
}

Eigen::RowVectorXd CosineGrid::row(double xv, int derivative) const {
  const int L1 = static_cast<int>(E.cols());
  Eigen::RowVectorXd out(L1);
  for (int k = 0; k < L1; ++k) {
    const double f = double(k) * stride;
    switch (derivative) {
      case 0: out(k) = std::cos(f * xv); break;
      case 1: out(k) = -f * std::sin(f * xv); break;
      case 2: out(k) = -f * f * std::cos(f * xv); break;
      default: throw std::invalid_argument("CosineGrid::row: derivative order 0..2");
    }
  }
  return out;
}

double CosineGrid::norm(int k) const { return k == 0 ? 2.0 * std::numbers::pi : std::numbers::pi; }

FieldGrid make_cylinder_grid(int N, int K, int L, int M) {
  return FieldGrid{RadialGrid::for_dimension(K, N), CosineGrid::make(L, M, 1), N};
}

}  // namespace schiffer
