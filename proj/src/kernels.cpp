#include "granular/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace granular::kernels {

std::vector<double> make_conv_table(const std::function<double(double)>& g, int m, double dx) {
  std::vector<double> tbl(2 * m - 1);
  for (int u = -(m - 1); u <= m - 1; ++u) tbl[u + m - 1] = g(-u * dx);
  return tbl;
}

std::vector<double> make_interface_table(const std::function<double(double)>& g, int m,
                                         double dx) {
  std::vector<double> itbl(2 * m);
  for (int u = -m; u <= m - 1; ++u) itbl[u + m] = g(-(u + 0.5) * dx);
  return itbl;
}

void lattice_convolve(const std::vector<double>& tbl, const std::vector<double>& rho, double dx,
                      std::vector<double>& out) {
  const int m = static_cast<int>(rho.size());
  out.resize(m);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    const double* t = tbl.data() + (m - 1 - i);
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += t[j] * rho[j];
    out[i] = acc * dx;
  }
}

void interface_convolve(const std::vector<double>& itbl, const std::vector<double>& rho,
                        double dx, std::vector<double>& out) {
  const int m = static_cast<int>(rho.size());
  out.resize(m + 1);
#pragma omp parallel for schedule(static)
  for (int i = 0; i <= m; ++i) {
    const double* t = itbl.data() + (m - i);
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += t[j] * rho[j];
    out[i] = acc * dx;
  }
}

double interaction_double_sum(const std::vector<double>& tbl, const std::vector<double>& rho,
                              double dx) {
  std::vector<double> conv;
  lattice_convolve(tbl, rho, dx, conv);
  double acc = 0.0;
  for (size_t i = 0; i < rho.size(); ++i) acc += rho[i] * conv[i];
  return 0.5 * acc * dx;
}

double interaction_dissipation(const std::function<double(double)>& g,
                               const std::vector<double>& x, const std::vector<double>& tx,
                               const std::vector<double>& rho, double dx) {
  const int m = static_cast<int>(x.size());
  std::vector<double> row(m);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < m; ++i) {
    if (rho[i] == 0.0) {
      row[i] = 0.0;
      continue;
    }
    const double di = tx[i] - x[i];
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      if (rho[j] == 0.0) continue;
      acc += (g(tx[i] - tx[j]) - g(x[i] - x[j])) * (di - (tx[j] - x[j])) * rho[j];
    }
    row[i] = acc * rho[i];
  }
  double total = 0.0;
  for (int i = 0; i < m; ++i) total += row[i];
  return 0.5 * total * dx * dx;
}

void pairwise_forces(const std::function<double(double)>& g, const std::vector<double>& x,
                     std::vector<double>& f) {
  const int n = static_cast<int>(x.size());
  f.resize(n);
  const double inv_n = 1.0 / n;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += g(x[i] - x[j]);
    f[i] = acc * inv_n;
  }
}

void pairwise_forces_linear(double a, const std::vector<double>& x, std::vector<double>& f) {
  const int n = static_cast<int>(x.size());
  f.resize(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  for (int i = 0; i < n; ++i) f[i] = a * (x[i] - mean);
}

void pairwise_forces_cubic(const std::vector<double>& x, std::vector<double>& f) {
  const int n = static_cast<int>(x.size());
  f.resize(n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return x[a] < x[b]; });
  // prefix sums over sorted positions: p1[k] = sum_{l<k} y_l, p2[k] = sum_{l<k} y_l^2
  std::vector<double> p1(n + 1, 0.0), p2(n + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    const double y = x[idx[k]];
    p1[k + 1] = p1[k] + y;
    p2[k + 1] = p2[k] + y * y;
  }
  const double inv_n = 1.0 / n;
  for (int k = 0; k < n; ++k) {
    const double y = x[idx[k]];
    // sum over the k particles to the left of (y - y_l)^2, minus the mirror sum
    const double left = k * y * y - 2.0 * y * p1[k] + p2[k];
    const double s1r = p1[n] - p1[k + 1];
    const double s2r = p2[n] - p2[k + 1];
    const double right = s2r - 2.0 * y * s1r + (n - 1 - k) * y * y;
    f[idx[k]] = 3.0 * (left - right) * inv_n;
  }
}

namespace serial {

void lattice_convolve(const std::vector<double>& tbl, const std::vector<double>& rho, double dx,
                      std::vector<double>& out) {
  const int m = static_cast<int>(rho.size());
  out.resize(m);
  for (int i = 0; i < m; ++i) {
    const double* t = tbl.data() + (m - 1 - i);
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += t[j] * rho[j];
    out[i] = acc * dx;
  }
}

void interface_convolve(const std::vector<double>& itbl, const std::vector<double>& rho,
                        double dx, std::vector<double>& out) {
  const int m = static_cast<int>(rho.size());
  out.resize(m + 1);
  for (int i = 0; i <= m; ++i) {
    const double* t = itbl.data() + (m - i);
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += t[j] * rho[j];
    out[i] = acc * dx;
  }
}

double interaction_double_sum(const std::vector<double>& tbl, const std::vector<double>& rho,
                              double dx) {
  std::vector<double> conv;
  lattice_convolve(tbl, rho, dx, conv);
  double acc = 0.0;
  for (size_t i = 0; i < rho.size(); ++i) acc += rho[i] * conv[i];
  return 0.5 * acc * dx;
}

double interaction_dissipation(const std::function<double(double)>& g,
                               const std::vector<double>& x, const std::vector<double>& tx,
                               const std::vector<double>& rho, double dx) {
  const int m = static_cast<int>(x.size());
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    if (rho[i] == 0.0) continue;
    const double di = tx[i] - x[i];
    double acc = 0.0;
    for (int j = 0; j < m; ++j) {
      if (rho[j] == 0.0) continue;
      acc += (g(tx[i] - tx[j]) - g(x[i] - x[j])) * (di - (tx[j] - x[j])) * rho[j];
    }
    total += acc * rho[i];
  }
  return 0.5 * total * dx * dx;
}

void pairwise_forces(const std::function<double(double)>& g, const std::vector<double>& x,
                     std::vector<double>& f) {
  const int n = static_cast<int>(x.size());
  f.resize(n);
  const double inv_n = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += g(x[i] - x[j]);
    f[i] = acc * inv_n;
  }
}

}  // namespace serial

}  // namespace granular::kernels
