#include "granular/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "granular/kernels.hpp"

namespace granular {

namespace {

double gauss_pdf(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

}  // namespace

GridMeasure::GridMeasure(double lo, double hi, std::vector<double> density)
    : lo_(lo), hi_(hi), density_(std::move(density)) {
  if (hi_ <= lo_) throw std::invalid_argument("GridMeasure: need hi > lo");
  if (density_.empty()) throw std::invalid_argument("GridMeasure: empty density");
  for (double d : density_)
    if (!(d >= 0.0) || !std::isfinite(d))
      throw std::invalid_argument("GridMeasure: density must be finite and >= 0");
  dx_ = (hi_ - lo_) / static_cast<double>(density_.size());
}

GridMeasure GridMeasure::from_function(double lo, double hi, int m,
                                       const std::function<double(double)>& f,
                                       bool normalize_mass) {
  if (m < 2) throw std::invalid_argument("GridMeasure: need m >= 2");
  std::vector<double> d(m);
  const double dx = (hi - lo) / m;
  for (int i = 0; i < m; ++i) d[i] = f(lo + (i + 0.5) * dx);
  GridMeasure mu(lo, hi, std::move(d));
  if (normalize_mass) mu.normalize();
  return mu;
}

GridMeasure GridMeasure::gaussian(double lo, double hi, int m, double mean, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("GridMeasure::gaussian: need sigma > 0");
  return from_function(lo, hi, m, [=](double x) { return gauss_pdf(x, mean, sigma); });
}

GridMeasure GridMeasure::bimodal(double lo, double hi, int m, double centre, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("GridMeasure::bimodal: need sigma > 0");
  return from_function(lo, hi, m, [=](double x) {
    return 0.5 * (gauss_pdf(x, -centre, sigma) + gauss_pdf(x, centre, sigma));
  });
}

GridMeasure GridMeasure::uniform(double lo, double hi, int m, double a, double b) {
  if (b <= a) throw std::invalid_argument("GridMeasure::uniform: need b > a");
  const double dx = (hi - lo) / m;
  std::vector<double> d(m, 0.0);
  // overlap of each cell with [a, b]
  for (int i = 0; i < m; ++i) {
    const double cl = lo + i * dx, cr = cl + dx;
    const double ov = std::max(0.0, std::min(cr, b) - std::max(cl, a));
    d[i] = ov / dx;
  }
  GridMeasure mu(lo, hi, std::move(d));
  mu.normalize();
  return mu;
}

std::vector<double> GridMeasure::centres() const {
  std::vector<double> xs(density_.size());
  for (size_t i = 0; i < xs.size(); ++i) xs[i] = centre(static_cast<int>(i));
  return xs;
}

double GridMeasure::mass() const {
  double s = 0.0;
  for (double d : density_) s += d;
  return s * dx_;
}

double GridMeasure::mean() const {
  double s = 0.0;
  for (int i = 0; i < m(); ++i) s += centre(i) * density_[i];
  return s * dx_;
}

double GridMeasure::second_moment() const {
  double s = 0.0;
  for (int i = 0; i < m(); ++i) s += centre(i) * centre(i) * density_[i];
  return s * dx_;
}

bool GridMeasure::is_normalized(double tol) const { return std::abs(mass() - 1.0) <= tol; }

void GridMeasure::normalize() {
  const double total = mass();
  if (total <= 0.0) throw std::runtime_error("GridMeasure::normalize: zero mass");
  for (double& d : density_) d /= total;
}

std::vector<double> GridMeasure::cdf_edges() const {
  std::vector<double> f(density_.size() + 1, 0.0);
  for (size_t i = 0; i < density_.size(); ++i) f[i + 1] = f[i] + density_[i] * dx_;
  return f;
}

double GridMeasure::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("quantile: u outside [0,1]");
  const auto f = cdf_edges();
  const double total = f.back();
  if (total <= 0.0) throw std::runtime_error("quantile: zero mass");
  const double target = u * total;
  // first edge with F >= target
  const auto it = std::lower_bound(f.begin(), f.end(), target);
  if (it == f.begin()) return lo_;
  const size_t i = static_cast<size_t>(it - f.begin()) - 1;  // cell index
  if (i >= density_.size()) return hi_;
  const double mass_i = density_[i] * dx_;
  if (mass_i <= 0.0) return lo_ + (i + 1) * dx_;  // flat CDF: jump to the right edge
  return lo_ + i * dx_ + (target - f[i]) / mass_i * dx_;
}

std::pair<int, int> GridMeasure::support_range() const {
  int first = -1, last = -1;
  for (int i = 0; i < m(); ++i)
    if (density_[i] > 0.0) {
      if (first < 0) first = i;
      last = i;
    }
  if (first < 0) throw std::runtime_error("GridMeasure: empty support");
  return {first, last};
}

bool GridMeasure::has_connected_support() const {
  const auto [first, last] = support_range();
  for (int i = first; i <= last; ++i)
    if (density_[i] <= 0.0) return false;
  return true;
}

void GridMeasure::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  out << "x,density\n";
  char buf[80];
  for (int i = 0; i < m(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", centre(i), density_[i]);
    out << buf;
  }
}

GridMeasure GridMeasure::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  std::vector<double> xs, ds;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("read_csv: bad row: " + line);
    xs.push_back(std::stod(line.substr(0, comma)));
    ds.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < 2) throw std::runtime_error("read_csv: need at least two rows");
  const double dx = xs[1] - xs[0];
  return GridMeasure(xs.front() - 0.5 * dx, xs.back() + 0.5 * dx, std::move(ds));
}

double ParticleEnsemble::mean() const {
  double s = 0.0;
  for (double x : positions) s += x;
  return s / static_cast<double>(positions.size());
}

double ParticleEnsemble::second_moment() const {
  double s = 0.0;
  for (double x : positions) s += x * x;
  return s / static_cast<double>(positions.size());
}

void ParticleEnsemble::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  char buf[80];
  std::snprintf(buf, sizeof buf, "# seed=%llu time=%.17g\n",
                static_cast<unsigned long long>(seed), time);
  out << buf << "position\n";
  for (double x : positions) {
    std::snprintf(buf, sizeof buf, "%.17g\n", x);
    out << buf;
  }
}

ParticleEnsemble ParticleEnsemble::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  std::uint64_t seed = 0;
  double time = 0.0;
  std::vector<double> pos;
  while (std::getline(in, line)) {
    if (line.rfind("# seed=", 0) == 0) {
      unsigned long long s = 0;
      if (std::sscanf(line.c_str(), "# seed=%llu time=%lf", &s, &time) != 2)
        throw std::runtime_error("read_csv: bad sidecar line: " + line);
      seed = s;
      continue;
    }
    if (line.empty() || line[0] == '#' || line[0] == 'p') continue;
    pos.push_back(std::stod(line));
  }
  if (pos.empty()) throw std::runtime_error("read_csv: no particles in " + path);
  return ParticleEnsemble(std::move(pos), seed, time);
}

std::vector<double> convolve_grad_w(const GridMeasure& mu, const PotentialSpec& w) {
  std::vector<double> out(mu.m(), 0.0);
  if (w.is_zero()) return out;
  const auto tbl = kernels::make_conv_table(w.grad, mu.m(), mu.dx());
  kernels::lattice_convolve(tbl, mu.density(), mu.dx(), out);
  return out;
}

double free_energy(const GridMeasure& mu, const PotentialSpec& v, const PotentialSpec& w) {
  const double dx = mu.dx();
  double entropy = 0.0, confinement = 0.0;
  for (int i = 0; i < mu.m(); ++i) {
    const double rho = mu.density()[i];
    if (rho > 0.0) entropy += rho * std::log(rho);
    if (!v.is_zero()) confinement += v.value(mu.centre(i)) * rho;
  }
  double interaction = 0.0;
  if (!w.is_zero()) {
    const auto tbl = kernels::make_conv_table(w.value, mu.m(), dx);
    interaction = kernels::interaction_double_sum(tbl, mu.density(), dx);
  }
  return entropy * dx + confinement * dx + interaction;
}

double free_energy_pushforward(const GridMeasure& mu, const std::function<double(double)>& t_of,
                               const std::function<double(double)>& dt_of,
                               const PotentialSpec& v, const PotentialSpec& w) {
  const double dx = mu.dx();
  const int m = mu.m();
  std::vector<double> tx(m);
  double entropy = 0.0, confinement = 0.0;
  for (int i = 0; i < m; ++i) {
    const double rho = mu.density()[i];
    const double x = mu.centre(i);
    tx[i] = t_of(x);
    if (rho > 0.0) {
      const double tp = dt_of(x);
      if (!(tp > 0.0)) throw std::invalid_argument("free_energy_pushforward: need dt_of > 0");
      entropy += rho * (std::log(rho) - std::log(tp));
    }
    if (!v.is_zero()) confinement += v.value(tx[i]) * rho;
  }
  double interaction = 0.0;
  if (!w.is_zero()) {
    // W(T(x)-T(y)) is not a lattice difference; direct double sum
    std::vector<double> row(m, 0.0);
    const auto& rhov = mu.density();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
      if (rhov[i] == 0.0) continue;
      double acc = 0.0;
      for (int j = 0; j < m; ++j) acc += w.value(tx[i] - tx[j]) * rhov[j];
      row[i] = acc * rhov[i];
    }
    for (int i = 0; i < m; ++i) interaction += row[i];
    interaction *= 0.5 * dx * dx;
  }
  return entropy * dx + confinement * dx + interaction;
}

GridMeasure particles_to_grid(const ParticleEnsemble& p, double lo, double hi, int m) {
  if (m < 2) throw std::invalid_argument("particles_to_grid: need m >= 2");
  const double dx = (hi - lo) / m;
  std::vector<double> counts(m, 0.0);
  long kept = 0;
  for (double x : p.positions) {
    if (x < lo || x >= hi) continue;
    const int i = std::min(m - 1, static_cast<int>((x - lo) / dx));
    counts[i] += 1.0;
    ++kept;
  }
  if (kept == 0) throw std::runtime_error("particles_to_grid: all particles outside [lo,hi]");
  for (double& c : counts) c /= (kept * dx);
  return GridMeasure(lo, hi, std::move(counts));
}

ParticleEnsemble sample_from_grid(const GridMeasure& mu, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_from_grid: need n >= 1");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> pos(n);
  for (int i = 0; i < n; ++i) pos[i] = mu.quantile(unif(gen));
  return ParticleEnsemble(std::move(pos), seed, 0.0);
}

}  // namespace granular
