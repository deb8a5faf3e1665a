#include "granular/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>

#include "granular/kernels.hpp"

namespace granular {

namespace {

constexpr double kDtFloor = 1e-12;
constexpr double kW2SqSkip = 1e-16;

struct QuantileTable {
  double lo, dx;
  std::vector<double> cdf;      // edges, size m+1, cdf[0] = 0
  std::vector<double> density;  // size m

  explicit QuantileTable(const GridMeasure& mu)
      : lo(mu.lo()), dx(mu.dx()), cdf(mu.cdf_edges()), density(mu.density()) {}

  double quantile(double target) const {
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.begin()) return lo;
    const size_t i = static_cast<size_t>(it - cdf.begin()) - 1;
    if (i >= density.size()) return lo + dx * static_cast<double>(density.size());
    const double mass_i = density[i] * dx;
    if (mass_i <= 0.0) return lo + (i + 1) * dx;
    return lo + i * dx + (target - cdf[i]) / mass_i * dx;
  }

  double cdf_at(double x) const {
    const int m = static_cast<int>(density.size());
    if (x <= lo) return 0.0;
    int i = static_cast<int>((x - lo) / dx);
    if (i >= m) return cdf.back();
    return cdf[i] + density[i] * (x - (lo + i * dx));
  }

  double density_at(double x) const {
    const int m = static_cast<int>(density.size());
    if (x < lo) return 0.0;
    const int i = static_cast<int>((x - lo) / dx);
    return i >= m ? 0.0 : density[std::max(i, 0)];
  }
};

void require_normalized(const GridMeasure& mu, const char* who) {
  if (!mu.is_normalized())
    throw std::invalid_argument(std::string(who) + ": measure is not normalized");
}

std::uint64_t probe_substream(std::uint64_t seed, int k) {
  return seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1);
}

}  // namespace

TransportMap translation_map(double delta) {
  TransportMap t;
  t.t_of = [delta](double x) { return x + delta; };
  t.dt_of = [](double) { return 1.0; };
  t.description = "translation(" + std::to_string(delta) + ")";
  return t;
}

TransportMap dilation_map(double centre, double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("dilation_map: need lambda > 0");
  TransportMap t;
  t.t_of = [=](double x) { return centre + lambda * (x - centre); };
  t.dt_of = [lambda](double) { return lambda; };
  t.description = "dilation(c=" + std::to_string(centre) + ",l=" + std::to_string(lambda) + ")";
  return t;
}

TransportMap piecewise_linear_map(const std::vector<double>& knots,
                                  const std::vector<double>& slopes, double anchor_value) {
  if (knots.size() + 1 != slopes.size())
    throw std::invalid_argument("piecewise_linear_map: need one slope per segment");
  if (!std::is_sorted(knots.begin(), knots.end()))
    throw std::invalid_argument("piecewise_linear_map: knots must be sorted");
  for (double s : slopes)
    if (s < kDtFloor) throw std::invalid_argument("piecewise_linear_map: slope below floor");
  // values at knots, integrating slopes from the anchor at knots[0]
  auto values = std::make_shared<std::vector<double>>(knots.size());
  (*values)[0] = anchor_value;
  for (size_t i = 1; i < knots.size(); ++i)
    (*values)[i] = (*values)[i - 1] + slopes[i] * (knots[i] - knots[i - 1]);
  auto kn = std::make_shared<std::vector<double>>(knots);
  auto sl = std::make_shared<std::vector<double>>(slopes);

  TransportMap t;
  t.t_of = [kn, sl, values](double x) {
    const auto it = std::upper_bound(kn->begin(), kn->end(), x);
    const size_t seg = static_cast<size_t>(it - kn->begin());
    if (seg == 0) return (*values)[0] + (*sl)[0] * (x - (*kn)[0]);
    return (*values)[seg - 1] + (*sl)[seg] * (x - (*kn)[seg - 1]);
  };
  t.dt_of = [kn, sl](double x) {
    const auto it = std::upper_bound(kn->begin(), kn->end(), x);
    return (*sl)[static_cast<size_t>(it - kn->begin())];
  };
  t.description = "piecewise(" + std::to_string(knots.size()) + " knots)";
  return t;
}

double wasserstein2(const GridMeasure& mu, const GridMeasure& nu, int n_quad) {
  require_normalized(mu, "wasserstein2");
  require_normalized(nu, "wasserstein2");
  if (n_quad <= 0) n_quad = 4 * std::max(mu.m(), nu.m());
  const QuantileTable qa(mu), qb(nu);
  const double du = 1.0 / n_quad;
  double acc = 0.0;
  for (int k = 0; k < n_quad; ++k) {
    const double u = (k + 0.5) * du;
    const double d = qa.quantile(u * qa.cdf.back()) - qb.quantile(u * qb.cdf.back());
    acc += d * d;
  }
  return std::sqrt(acc * du);
}

double wasserstein2_particles(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  if (a.positions.size() != b.positions.size())
    throw std::invalid_argument("wasserstein2_particles: ensembles differ in size");
  std::vector<double> xa = a.positions, xb = b.positions;
  std::sort(xa.begin(), xa.end());
  std::sort(xb.begin(), xb.end());
  double acc = 0.0;
  for (size_t i = 0; i < xa.size(); ++i) {
    const double d = xa[i] - xb[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(xa.size()));
}

TransportMap brenier_map(const GridMeasure& mu, const GridMeasure& nu) {
  require_normalized(mu, "brenier_map");
  require_normalized(nu, "brenier_map");
  if (!mu.has_connected_support())
    throw std::invalid_argument("brenier_map: source support is disconnected");
  auto qmu = std::make_shared<QuantileTable>(mu);
  auto qnu = std::make_shared<QuantileTable>(nu);
  const double scale = qnu->cdf.back() / qmu->cdf.back();

  TransportMap t;
  t.t_of = [qmu, qnu, scale](double x) { return qnu->quantile(qmu->cdf_at(x) * scale); };
  auto t_of = t.t_of;
  t.dt_of = [qmu, qnu, t_of](double x) {
    const double num = qmu->density_at(x);
    const double den = qnu->density_at(t_of(x));
    if (den <= 0.0) return num > 0.0 ? 1.0 / kDtFloor : 1.0;
    return std::max(num / den, kDtFloor);
  };
  t.description = "monotone rearrangement";
  const auto [first, last] = mu.support_range();
  for (int i = first; i <= last; ++i) {
    const double x = mu.centre(i);
    const double den = qnu->density_at(t.t_of(x));
    if (den <= 0.0 || mu.density()[i] / den < kDtFloor) ++t.clamped_cells;
  }
  return t;
}

double dissipation_j(const GridMeasure& mu, const TransportMap& t, const PotentialSpec& v,
                     const PotentialSpec& w) {
  require_normalized(mu, "dissipation_j");
  const int m = mu.m();
  const double dx = mu.dx();
  const auto& rho = mu.density();
  std::vector<double> xs = mu.centres(), tx(m), tp(m);
  for (int i = 0; i < m; ++i) {
    tx[i] = t.t_of(xs[i]);
    tp[i] = std::max(t.dt_of(xs[i]), kDtFloor);
  }

  double local = 0.0;
  for (int i = 0; i < m; ++i) {
    if (rho[i] == 0.0) continue;
    double term = tp[i] + 1.0 / tp[i] - 2.0;
    if (!v.is_zero()) term += (v.grad(tx[i]) - v.grad(xs[i])) * (tx[i] - xs[i]);
    local += term * rho[i];
  }
  double j = local * dx;

  if (!w.is_zero()) {
    if (w.family == PotentialFamily::quadratic) {
      // W' linear: pair term reduces to a * (Var-like expression in T - id)
      const double a = w.params[0];
      double s1 = 0.0, s2 = 0.0;
      for (int i = 0; i < m; ++i) {
        const double d = tx[i] - xs[i];
        s1 += d * rho[i];
        s2 += d * d * rho[i];
      }
      s1 *= dx;
      s2 *= dx;
      j += a * (s2 - s1 * s1);
    } else {
      j += kernels::interaction_dissipation(w.grad, xs, tx, rho, dx);
    }
  }
  return j;
}

double wj_constant(double k_out, double r_out, double overlap_m, int dim) {
  if (k_out <= 0.0 || r_out <= 0.0 || dim < 1)
    throw std::invalid_argument("wj_constant: need K > 0, R > 0, n >= 1");
  const double ball = std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
  return 2.0 / (3.0 / k_out + 4.0 * ball * std::pow(r_out, dim + 2.0) * std::exp(overlap_m));
}

double hyp_u_constant(const GridMeasure& mu, double r_out) {
  if (r_out <= 0.0) throw std::invalid_argument("hyp_u_constant: need R > 0");
  if (!mu.has_connected_support())
    throw std::invalid_argument("hyp_u_constant: zero density inside support");
  const auto [first, last] = mu.support_range();
  const double dx = mu.dx();
  const int window = static_cast<int>(2.0 * r_out / dx + 1e-9);
  std::vector<double> u(last - first + 1);
  for (int i = first; i <= last; ++i) u[i - first] = -std::log(mu.density()[i]);

  double best = -std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(u.size());
  for (int i = 0; i < n; ++i) {
    double runmax = u[i];
    for (int j = i; j <= std::min(n - 1, i + window); ++j) {
      runmax = std::max(runmax, u[j]);
      best = std::max(best, runmax - u[i] - u[j]);
    }
  }
  return best;
}

namespace {

struct BuiltProbe {
  TransportMap map;
  std::string kind;
  bool skip = false;
};

BuiltProbe build_probe(const GridMeasure& mu, int k, std::uint64_t seed, bool preserve_mean,
                       double mu_mean) {
  std::mt19937_64 gen(probe_substream(seed, k));
  std::normal_distribution<double> normal(0.0, 1.0);
  int kind = preserve_mean ? (k % 2 == 0 ? 1 : 2) : k % 3;

  BuiltProbe p;
  if (kind == 0) {
    const double delta = 0.75 * normal(gen);
    if (std::abs(delta) < 1e-8) {
      p.skip = true;
      return p;
    }
    p.map = translation_map(delta);
    p.kind = "translation";
    return p;
  }
  if (kind == 1) {
    const double lambda = std::clamp(std::exp(0.3 * normal(gen)), 0.05, 20.0);
    if (std::abs(lambda - 1.0) < 1e-8) {
      p.skip = true;
      return p;
    }
    p.map = dilation_map(mu_mean, lambda);
    p.kind = "dilation";
    return p;
  }
  const double a = mu.quantile(1e-3), b = mu.quantile(1.0 - 1e-3);
  std::vector<double> knots(8);
  std::uniform_real_distribution<double> unif(a, b);
  for (double& x : knots) x = unif(gen);
  std::sort(knots.begin(), knots.end());
  std::vector<double> slopes(9);
  for (double& s : slopes) s = std::max(std::exp(0.35 * normal(gen)), 1e-6);
  const double anchor = knots[0] + 0.3 * normal(gen);
  p.map = piecewise_linear_map(knots, slopes, anchor);
  p.kind = "piecewise";
  return p;
}

double pushforward_w2_sq(const GridMeasure& mu, const TransportMap& t) {
  double acc = 0.0;
  for (int i = 0; i < mu.m(); ++i) {
    const double d = t.t_of(mu.centre(i)) - mu.centre(i);
    acc += d * d * mu.density()[i];
  }
  return acc * mu.dx();
}

double pushforward_mean(const GridMeasure& mu, const TransportMap& t) {
  double acc = 0.0;
  for (int i = 0; i < mu.m(); ++i) acc += t.t_of(mu.centre(i)) * mu.density()[i];
  return acc * mu.dx();
}

TransportMap shift_map(const TransportMap& base, double delta, std::string kind) {
  TransportMap t;
  auto f = base.t_of;
  t.t_of = [f, delta](double x) { return f(x) + delta; };
  t.dt_of = base.dt_of;
  t.description = std::move(kind);
  return t;
}

}  // namespace

bool random_probe_map(const GridMeasure& mu, int k, std::uint64_t seed, bool preserve_mean,
                      TransportMap& out) {
  const double mu_mean = mu.mean();
  BuiltProbe p = build_probe(mu, k, seed, preserve_mean, mu_mean);
  if (p.skip) return false;
  out = p.map;
  out.description = p.kind;
  if (preserve_mean) {
    const double shift = mu_mean - pushforward_mean(mu, p.map);
    out = shift_map(p.map, shift, p.kind + "+shift");
  }
  return true;
}

WjProbeReport wj_probe(const GridMeasure& mu, const PotentialSpec& v, const PotentialSpec& w,
                       int n_probes, std::uint64_t seed, bool preserve_mean) {
  require_normalized(mu, "wj_probe");
  if (n_probes < 1) throw std::invalid_argument("wj_probe: need n_probes >= 1");
  const double mu_mean = mu.mean();

  WjProbeReport rep;
  rep.rows.resize(n_probes);
  std::vector<char> skipped(n_probes, 0);

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n_probes; ++k) {
    BuiltProbe p = build_probe(mu, k, seed, preserve_mean, mu_mean);
    ProbeRow row;
    row.id = k;
    if (!p.skip) {
      TransportMap map = p.map;
      if (preserve_mean) {
        const double shift = mu_mean - pushforward_mean(mu, map);
        map = shift_map(map, shift, p.kind + "+shift");
      }
      row.kind = p.kind;
      row.w2_sq = pushforward_w2_sq(mu, map);
      if (row.w2_sq < kW2SqSkip) {
        p.skip = true;
      } else {
        row.j = dissipation_j(mu, map, v, w);
        row.ratio = row.j / row.w2_sq;
      }
    }
    skipped[k] = p.skip ? 1 : 0;
    rep.rows[k] = row;
  }

  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_probes; ++k) {
    if (skipped[k]) {
      ++rep.n_skipped;
      continue;
    }
    if (rep.rows[k].ratio < rep.min_ratio) {
      rep.min_ratio = rep.rows[k].ratio;
      rep.argmin_id = k;
      rep.argmin_kind = rep.rows[k].kind;
    }
  }
  if (rep.argmin_id < 0) throw std::runtime_error("wj_probe: every probe was degenerate");

  // rebuild the winning map deterministically from its index
  BuiltProbe p = build_probe(mu, rep.argmin_id, seed, preserve_mean, mu_mean);
  rep.argmin_map = p.map;
  if (preserve_mean) {
    const double shift = mu_mean - pushforward_mean(mu, p.map);
    rep.argmin_map = shift_map(p.map, shift, p.kind + "+shift");
  }
  // drop skipped rows from the report
  std::vector<ProbeRow> kept;
  kept.reserve(rep.rows.size());
  for (int k = 0; k < n_probes; ++k)
    if (!skipped[k]) kept.push_back(rep.rows[k]);
  rep.rows = std::move(kept);
  return rep;
}

std::vector<double> translation_probe(const GridMeasure& mu, const PotentialSpec& v,
                                      const std::vector<double>& m_values) {
  require_normalized(mu, "translation_probe");
  std::vector<double> out;
  out.reserve(m_values.size());
  for (double shift : m_values) {
    if (shift <= 0.0) throw std::invalid_argument("translation_probe: need M > 0");
    double acc = 0.0;
    for (int i = 0; i < mu.m(); ++i) {
      const double x = mu.centre(i);
      acc += (v.grad(x + shift) - v.grad(x)) * mu.density()[i];
    }
    out.push_back(acc * mu.dx() / shift);
  }
  return out;
}

}  // namespace granular
