#include "windesign/mathutil.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace windesign {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Acklam's rational approximation, |error| < 1.15e-9 before refinement.
double acklam(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5, r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inverse_normal_cdf: p outside (0,1)");
  double x = acklam(p);
  // One Halley step against the exact CDF.
  double e = normal_cdf(x) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

bool cholesky(const Matrix& r, Matrix& lower) {
  const int n = r.n;
  lower = Matrix(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = r.at(i, j);
      for (int k = 0; k < j; ++k) s -= lower.at(i, k) * lower.at(j, k);
      if (i == j) {
        if (!(s > 0.0)) return false;
        lower.at(i, i) = std::sqrt(s);
      } else {
        lower.at(i, j) = s / lower.at(j, j);
      }
    }
  }
  return true;
}

void jacobi_eigen(const Matrix& sym, std::vector<double>& eigenvalues, Matrix& eigenvectors) {
  const int n = sym.n;
  Matrix a = sym;
  eigenvectors = Matrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a.at(p, q);
        if (apq == 0.0) continue;
        double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = eigenvectors.at(k, p), vkq = eigenvectors.at(k, q);
          eigenvectors.at(k, p) = c * vkp - s * vkq;
          eigenvectors.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  eigenvalues.assign(n, 0.0);
  for (int i = 0; i < n; ++i) eigenvalues[i] = a.at(i, i);
}

Matrix repair_correlation(const Matrix& r, double floor_eigenvalue) {
  const int n = r.n;
  std::vector<double> lam;
  Matrix v;
  jacobi_eigen(r, lam, v);
  for (double& l : lam)
    if (l < floor_eigenvalue) l = floor_eigenvalue;
  // V * diag(lam) * V^T, then renormalize to unit diagonal.
  Matrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int k = 0; k < n; ++k) s += v.at(i, k) * lam[k] * v.at(j, k);
      out.at(i, j) = s;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) out.at(i, j) /= std::sqrt(out.at(i, i) * out.at(j, j));
  for (int i = 0; i < n; ++i) out.at(i, i) = 1.0;
  // Symmetrize away rounding drift.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double s = 0.5 * (out.at(i, j) + out.at(j, i));
      out.at(i, j) = out.at(j, i) = s;
    }
  return out;
}

}  // namespace windesign
