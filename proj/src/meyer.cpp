#include "dynareg/meyer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dynareg {

std::string_view to_string(MeyerCase c) {
  switch (c) {
    case MeyerCase::kBothOutside: return "both-outside";
    case MeyerCase::kColumnInsideSingular: return "column-inside-singular";
    case MeyerCase::kColumnInsideRegular: return "column-inside-regular";
    case MeyerCase::kRowInsideSingular: return "row-inside-singular";
    case MeyerCase::kRowInsideRegular: return "row-inside-regular";
    case MeyerCase::kBothInsideSingular: return "both-inside-singular";
  }
  return "unknown";
}

MeyerUpdate meyer_update(const DenseMatrix& a, const DenseMatrix& a_pinv, std::span<const double> c,
                         std::span<const double> d, double tol) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  if (a_pinv.rows() != cols || a_pinv.cols() != rows)
    throw std::invalid_argument("meyer_update: pseudoinverse shape does not match A");
  if (c.size() != rows || d.size() != cols) throw std::invalid_argument("meyer_update: update vector length mismatch");

  const DenseVector k = a_pinv * c;              // cols
  const DenseVector h = left_multiply(d, a_pinv);  // rows
  DenseVector u(c.begin(), c.end());             // rows
  {
    const DenseVector ak = a * k;
    for (std::size_t i = 0; i < rows; ++i) u[i] -= ak[i];
  }
  DenseVector v(d.begin(), d.end());  // cols
  {
    const DenseVector ha = left_multiply(h, a);
    for (std::size_t j = 0; j < cols; ++j) v[j] -= ha[j];
  }
  const double dk = dot(d, k);
  const double beta = 1.0 + dk;

  const double c_norm = norm2(c);
  const double d_norm = norm2(d);
  const double u_norm = norm2(u);
  const double v_norm = norm2(v);
  // u and v carry rounding error of order eps * ||A|| ||A+|| times the operand.
  const double cond = std::max(1.0, frobenius_norm(a) * frobenius_norm(a_pinv));
  const bool u_zero = u_norm <= tol * cond * c_norm;
  const bool v_zero = v_norm <= tol * cond * d_norm;
  const bool beta_zero = std::abs(beta) <= tol * (1.0 + norm2(d) * norm2(k));

  const double uu = u_norm * u_norm;
  const double vv = v_norm * v_norm;
  const double kk = dot(k, k);
  const double hh = dot(h, h);

  MeyerUpdate out{a_pinv, MeyerCase::kBothOutside};
  DenseMatrix& g = out.pinv;

  if (!u_zero && !v_zero) {
    // A+ - k u+ - v+ h + beta v+ u+
    add_outer(g, -1.0 / uu, k, u);
    add_outer(g, -1.0 / vv, v, h);
    add_outer(g, beta / (vv * uu), v, u);
    out.branch = MeyerCase::kBothOutside;
  } else if (u_zero && !v_zero && beta_zero) {
    // A+ - k k+ A+ - v+ h
    const DenseVector ka = left_multiply(k, a_pinv);
    add_outer(g, -1.0 / kk, k, ka);
    add_outer(g, -1.0 / vv, v, h);
    out.branch = MeyerCase::kColumnInsideSingular;
  } else if (u_zero && !beta_zero) {
    // A+ + (1/beta) v^T k^T A+ - (beta/sigma1) p1 q1^T
    const DenseVector ka = left_multiply(k, a_pinv);
    const double sigma1 = kk * vv + beta * beta;
    DenseVector p1(cols);
    for (std::size_t j = 0; j < cols; ++j) p1[j] = -(kk / beta) * v[j] - k[j];
    DenseVector q1(rows);
    for (std::size_t i = 0; i < rows; ++i) q1[i] = -(vv / beta) * ka[i] - h[i];
    add_outer(g, 1.0 / beta, v, ka);
    add_outer(g, -beta / sigma1, p1, q1);
    out.branch = MeyerCase::kColumnInsideRegular;
  } else if (!u_zero && v_zero && beta_zero) {
    // A+ - A+ h+ h - k u+
    const DenseVector ah = a_pinv * h;
    add_outer(g, -1.0 / hh, ah, h);
    add_outer(g, -1.0 / uu, k, u);
    out.branch = MeyerCase::kRowInsideSingular;
  } else if (v_zero && !beta_zero) {
    // A+ + (1/beta) A+ h^T u^T - (beta/sigma2) p2 q2^T
    const DenseVector ah = a_pinv * h;
    const double sigma2 = hh * uu + beta * beta;
    DenseVector p2(cols);
    for (std::size_t j = 0; j < cols; ++j) p2[j] = -(uu / beta) * ah[j] - k[j];
    DenseVector q2(rows);
    for (std::size_t i = 0; i < rows; ++i) q2[i] = -(hh / beta) * u[i] - h[i];
    add_outer(g, 1.0 / beta, ah, u);
    add_outer(g, -beta / sigma2, p2, q2);
    out.branch = MeyerCase::kRowInsideRegular;
  } else {
    // u == 0, v == 0, beta == 0:
    // A+ - k k+ A+ - A+ h+ h + (k+ A+ h+) k h
    const DenseVector ka = left_multiply(k, a_pinv);
    const DenseVector ah = a_pinv * h;
    const double kah = dot(ka, h) / (kk * hh);
    add_outer(g, -1.0 / kk, k, ka);
    add_outer(g, -1.0 / hh, ah, h);
    add_outer(g, kah, k, h);
    out.branch = MeyerCase::kBothInsideSingular;
  }
  return out;
}

}  // namespace dynareg
