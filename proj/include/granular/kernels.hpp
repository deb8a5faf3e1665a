#pragma once

#include <functional>
#include <vector>

// O(m^2) / O(N^2) inner loops shared by the measure, transport and dynamics
// modules. Primary implementations are OpenMP-parallel; kernels::serial holds
// the plain reference implementations the tests compare against. All parallel
// kernels produce results independent of the thread count: each output slot is
// accumulated by exactly one thread in a fixed order, and cross-row reductions
// are finished serially in index order.

namespace granular::kernels {

/// Table for g evaluated on lattice differences: tbl[(j-i) + m - 1] = g((i-j)*dx),
/// so lattice_convolve computes out[i] = dx * sum_j g(x_i - x_j) * rho[j].
std::vector<double> make_conv_table(const std::function<double(double)>& g, int m, double dx);

/// Half-offset table: itbl[(j-i) + m] = g((i - j - 0.5)*dx). With interface
/// points y_i = lo + i*dx and cell centres x_j = lo + (j+0.5)*dx this gives
/// interface_convolve out[i] = dx * sum_j g(y_i - x_j) * rho[j], i in [0, m].
std::vector<double> make_interface_table(const std::function<double(double)>& g, int m, double dx);

void lattice_convolve(const std::vector<double>& tbl, const std::vector<double>& rho, double dx,
                      std::vector<double>& out);
void interface_convolve(const std::vector<double>& itbl, const std::vector<double>& rho,
                        double dx, std::vector<double>& out);

/// 0.5 * dx^2 * sum_{i,j} g(x_i - x_j) rho_i rho_j via a lattice table.
double interaction_double_sum(const std::vector<double>& tbl, const std::vector<double>& rho,
                              double dx);

/// 0.5 * dx^2 * sum_{i,j} (g(tx_i - tx_j) - g(x_i - x_j)) * ((tx_i-x_i)-(tx_j-x_j))
///   * rho_i rho_j.  No table: tx is an arbitrary monotone image of x.
double interaction_dissipation(const std::function<double(double)>& g,
                               const std::vector<double>& x, const std::vector<double>& tx,
                               const std::vector<double>& rho, double dx);

/// Mean-field forces f_i = (1/N) * sum_j g(x_i - x_j) for odd g.
void pairwise_forces(const std::function<double(double)>& g, const std::vector<double>& x,
                     std::vector<double>& f);

/// Exact fast path for g(d) = a*d: f_i = a * (x_i - mean(x)).
void pairwise_forces_linear(double a, const std::vector<double>& x, std::vector<double>& f);

/// Exact fast path for g(d) = 3*d*|d| via sorting and prefix sums, O(N log N).
void pairwise_forces_cubic(const std::vector<double>& x, std::vector<double>& f);

namespace serial {
void lattice_convolve(const std::vector<double>& tbl, const std::vector<double>& rho, double dx,
                      std::vector<double>& out);
void interface_convolve(const std::vector<double>& itbl, const std::vector<double>& rho,
                        double dx, std::vector<double>& out);
double interaction_double_sum(const std::vector<double>& tbl, const std::vector<double>& rho,
                              double dx);
double interaction_dissipation(const std::function<double(double)>& g,
                               const std::vector<double>& x, const std::vector<double>& tx,
                               const std::vector<double>& rho, double dx);
void pairwise_forces(const std::function<double(double)>& g, const std::vector<double>& x,
                     std::vector<double>& f);
}  // namespace serial

}  // namespace granular::kernels
