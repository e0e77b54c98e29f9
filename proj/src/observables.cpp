#include "gisfa/observables.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

#include "gisfa/errors.hpp"

namespace gisfa {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string format_log10(double v) {
  return v > 0.0 ? fmt::format("{:.12e}", std::log10(v)) : std::string("-inf");
}

}  // namespace

std::string_view selector_token(Selector s) {
  switch (s) {
    case Selector::m0:
      return "M0";
    case Selector::m0_m1:
      return "M0M1";
    case Selector::sfa:
      return "SFA";
  }
  return "?";
}

Selector parse_selector(std::string_view text) {
  const std::string u = upper(text);
  if (u == "M0") return Selector::m0;
  if (u == "M0+M1" || u == "M0M1") return Selector::m0_m1;
  if (u == "SFA") return Selector::sfa;
  throw ConfigError(fmt::format("unknown amplitude selector '{}' (expected M0, M0+M1, SFA)", text));
}

std::string_view normalization_token(Normalization n) {
  switch (n) {
    case Normalization::none:
      return "none";
    case Normalization::peak:
      return "peak";
    case Normalization::integral:
      return "integral";
  }
  return "?";
}

Normalization parse_normalization(std::string_view text) {
  if (text == "none") return Normalization::none;
  if (text == "peak") return Normalization::peak;
  if (text == "integral") return Normalization::integral;
  throw ConfigError(fmt::format("unknown normalization '{}' (expected peak, integral, none)", text));
}

MomentumGrid MomentumGrid::axis(double pz_max, int n_pz, double pt) {
  MomentumGrid g = map(pz_max, n_pz, 0.0, 1);
  g.pt = {pt};
  return g;
}

MomentumGrid MomentumGrid::map(double pz_max, int n_pz, double pt_max, int n_pt) {
  if (n_pz < 2 || n_pt < 1) throw ConfigError("momentum grid: need n_pz >= 2 and n_pt >= 1");
  MomentumGrid g;
  g.pz.resize(n_pz);
  for (int i = 0; i < n_pz; ++i) {
    // symmetric by construction: node i and n-1-i are exact negatives
    const double x = -pz_max + 2.0 * pz_max * i / (n_pz - 1);
    g.pz[i] = x;
  }
  for (int i = 0; i < n_pz / 2; ++i) g.pz[n_pz - 1 - i] = -g.pz[i];
  if (n_pz % 2 == 1) g.pz[n_pz / 2] = 0.0;
  g.pt.resize(n_pt);
  for (int i = 0; i < n_pt; ++i) g.pt[i] = n_pt == 1 ? 0.0 : pt_max * i / (n_pt - 1);
  return g;
}

void MomentumGrid::validate() const {
  if (pz.size() < 2 || pt.empty()) throw ConfigError("momentum grid: empty");
  for (std::size_t i = 0; i < pz.size(); ++i) {
    if (pz[i] != -pz[pz.size() - 1 - i]) throw ConfigError("momentum grid: p_z samples not symmetric");
  }
  if (pt.size() > 1 && pt[0] != 0.0) throw ConfigError("momentum grid: p_t must start at 0");
  for (double v : pt) {
    if (v < 0.0) throw ConfigError("momentum grid: p_t must be non-negative");
  }
}

MomentumPoint MomentumGrid::at(std::size_t index) const {
  return {pz[index / pt.size()], pt[index % pt.size()]};
}

double SpectrumResult::max_error() const {
  return w_error.empty() ? 0.0 : *std::max_element(w_error.begin(), w_error.end());
}

void parallel_for(std::size_t begin, std::size_t end, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (begin >= end) return;
  const auto n_threads = std::min<std::size_t>(std::max(1, workers), end - begin);
  std::atomic<std::size_t> next{begin};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < end; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = end;
      }
    }
  };
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_threads; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<AmplitudeSet> evaluate_grid(const AmplitudeEngine& engine, const MomentumGrid& grid,
                                        GaugeParam gauge, const SweepOptions& options) {
  grid.validate();
  std::vector<AmplitudeSet> out(grid.size());
  parallel_for(0, grid.size(), options.workers, [&](std::size_t i) {
    try {
      out[i] = engine.evaluate(grid.at(i), gauge, options.sfa_variant, options.with_m1);
    } catch (const NumericError& e) {
      const MomentumPoint p = grid.at(i);
      throw NumericError(fmt::format("grid node {} (p_z={}, p_t={}): {}", i, p.pz, p.pt, e.what()));
    } catch (const DomainError& e) {
      const MomentumPoint p = grid.at(i);
      throw DomainError(fmt::format("grid node {} (p_z={}, p_t={}): {}", i, p.pz, p.pt, e.what()));
    }
  });
  return out;
}

SpectrumResult spectrum_from(const std::vector<AmplitudeSet>& amplitudes, const MomentumGrid& grid,
                             Selector selector, double gamma) {
  if (amplitudes.size() != grid.size()) throw DomainError("spectrum_from: size mismatch");
  SpectrumResult r;
  r.selector = selector;
  r.gamma = gamma;
  r.grid = grid;
  r.w.resize(amplitudes.size());
  r.w_error.resize(amplitudes.size());
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const AmplitudeSet& a = amplitudes[i];
    Complex m;
    double err = 0.0;
    switch (selector) {
      case Selector::m0:
        m = a.m0;
        break;
      case Selector::m0_m1:
        m = a.m0 + a.m1;
        err = a.m1_error;
        break;
      case Selector::sfa:
        m = a.m_sfa;
        err = a.sfa_error;
        break;
    }
    r.w[i] = std::norm(m);
    r.w_error[i] = 2.0 * std::abs(m) * err + err * err;
  }
  return r;
}

SpectrumResult sweep(const AmplitudeEngine& engine, const MomentumGrid& grid, Selector selector,
                     GaugeParam gauge, SweepOptions options) {
  options.with_m1 = options.with_m1 && selector == Selector::m0_m1;
  const auto amplitudes = evaluate_grid(engine, grid, gauge, options);
  SpectrumResult r = spectrum_from(amplitudes, grid, selector, gauge.gamma);
  if (!grid.on_axis()) integrate_transverse(r);
  return r;
}

std::vector<double> integrate_transverse(SpectrumResult& result) {
  const auto& g = result.grid;
  const std::size_t npt = g.pt.size();
  result.rho.assign(g.pz.size(), 0.0);
  result.warning.clear();
  if (npt < 2) return result.rho;
  const double h = g.pt[1] - g.pt[0];
  const double scale = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
  double worst_tail = 0.0;
  double worst_halving = 0.0;
  const bool can_halve = npt % 2 == 1 && npt >= 9;
  std::vector<double> f(npt);
  std::vector<double> every_other;
  for (std::size_t iz = 0; iz < g.pz.size(); ++iz) {
    for (std::size_t it = 0; it < npt; ++it) f[it] = result.at(iz, it) * g.pt[it];
    const double total = simpson(f, h);
    result.rho[iz] = scale * total;
    if (total <= 0.0) continue;
    worst_tail = std::max(worst_tail, 0.5 * h * (f[npt - 2] + f[npt - 1]) / total);
    if (can_halve) {
      every_other.clear();
      for (std::size_t it = 0; it < npt; it += 2) every_other.push_back(f[it]);
      worst_halving = std::max(worst_halving, std::abs(simpson(every_other, 2.0 * h) - total) / total);
    }
  }
  std::vector<std::string> notes;
  if (worst_tail > 1e-4) {
    notes.push_back(fmt::format(
        "p_t grid truncates the transverse integral: last interval carries up to {:.2e} of rho",
        worst_tail));
  }
  // Simpson error of the fine rule is about 1/15 of the change against the doubled step
  if (worst_halving / 15.0 > 1e-4) {
    notes.push_back(fmt::format(
        "p_t grid under-resolves the transverse integrand: doubling the step changes rho by up to {:.2e}",
        worst_halving));
  }
  for (const auto& n : notes) result.warning += (result.warning.empty() ? "" : "; ") + n;
  return result.rho;
}

namespace {

double grid_integral(const SpectrumResult& r) {
  const auto& g = r.grid;
  const double hz = g.pz[1] - g.pz[0];
  std::vector<double> along(g.pz.size());
  if (g.on_axis()) {
    for (std::size_t iz = 0; iz < g.pz.size(); ++iz) along[iz] = r.at(iz, 0);
    return simpson(along, hz);
  }
  std::vector<double> f(g.pt.size());
  const double ht = g.pt[1] - g.pt[0];
  for (std::size_t iz = 0; iz < g.pz.size(); ++iz) {
    for (std::size_t it = 0; it < g.pt.size(); ++it) f[it] = r.at(iz, it) * g.pt[it];
    along[iz] = simpson(f, ht);
  }
  return 2.0 * std::numbers::pi * simpson(along, hz);
}

}  // namespace

SpectrumResult normalize(SpectrumResult r, Normalization mode) {
  if (mode == Normalization::none) return r;
  const double w_max = r.w.empty() ? 0.0 : *std::max_element(r.w.begin(), r.w.end());
  if (!(w_max > 0.0)) throw NumericError("normalize: spectrum is identically zero");
  double wc = w_max;
  double rc = r.rho.empty() ? 1.0 : *std::max_element(r.rho.begin(), r.rho.end());
  if (mode == Normalization::integral) {
    wc = grid_integral(r);
    if (!r.rho.empty()) rc = simpson(r.rho, r.grid.pz[1] - r.grid.pz[0]);
  }
  if (!(wc > 0.0) || (!r.rho.empty() && !(rc > 0.0))) {
    throw NumericError("normalize: non-positive normalization constant");
  }
  for (double& v : r.w) v /= wc;
  for (double& v : r.w_error) v /= wc;
  for (double& v : r.rho) v /= rc;
  r.w_constant *= wc;
  if (!r.rho.empty()) r.rho_constant *= rc;
  r.mode = mode;
  return r;
}

double asymmetry(const SpectrumResult& r) {
  const auto& g = r.grid;
  const std::size_t nz = g.pz.size();
  double diff = 0.0;
  double total = 0.0;
  for (std::size_t iz = 0; iz < nz; ++iz) {
    for (std::size_t it = 0; it < g.pt.size(); ++it) {
      diff += std::abs(r.at(iz, it) - r.at(nz - 1 - iz, it));
      total += r.at(iz, it);
    }
  }
  return total > 0.0 ? diff / total : 0.0;
}

double normalized_l2_distance(const SpectrumResult& a, const SpectrumResult& b) {
  if (a.w.size() != b.w.size()) throw DomainError("normalized_l2_distance: grids differ");
  const double ma = *std::max_element(a.w.begin(), a.w.end());
  const double mb = *std::max_element(b.w.begin(), b.w.end());
  double d2 = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.w.size(); ++i) {
    const double x = a.w[i] / ma;
    const double y = b.w[i] / mb;
    d2 += (x - y) * (x - y);
    na += x * x;
    nb += y * y;
  }
  return std::sqrt(d2) / std::sqrt(std::sqrt(na * nb));
}

namespace {

void write_metadata(std::ostream& out, const SpectrumResult& r,
                    const std::vector<std::pair<std::string, std::string>>& metadata) {
  for (const auto& [k, v] : metadata) out << "# " << k << "=" << v << "\n";
  out << "# selector=" << selector_token(r.selector) << "\n";
  out << fmt::format("# gamma={:.17g}\n", r.gamma);
  out << "# normalization=" << normalization_token(r.mode) << "\n";
  out << fmt::format("# normalization_constant={:.17g}\n", r.w_constant);
  if (!r.rho.empty()) out << fmt::format("# rho_normalization_constant={:.17g}\n", r.rho_constant);
  out << fmt::format("# max_w_error={:.6e}\n", r.max_error());
  if (!r.warning.empty()) out << "# warning=" << r.warning << "\n";
}

}  // namespace

void write_spectrum_csv(std::ostream& out, const SpectrumResult& r,
                        const std::vector<std::pair<std::string, std::string>>& metadata) {
  write_metadata(out, r, metadata);
  const auto& g = r.grid;
  if (g.on_axis()) {
    out << fmt::format("# p_t={:.17g}\n", g.pt[0]);
    out << "p_z,w,log10_w\n";
    for (std::size_t iz = 0; iz < g.pz.size(); ++iz) {
      const double w = r.at(iz, 0);
      out << fmt::format("{:.10f},{:.12e},{}\n", g.pz[iz], w, format_log10(w));
    }
    return;
  }
  out << "p_z,p_t,w,log10_w\n";
  for (std::size_t iz = 0; iz < g.pz.size(); ++iz) {
    for (std::size_t it = 0; it < g.pt.size(); ++it) {
      const double w = r.at(iz, it);
      out << fmt::format("{:.10f},{:.10f},{:.12e},{}\n", g.pz[iz], g.pt[it], w, format_log10(w));
    }
  }
}

void write_rho_csv(std::ostream& out, const SpectrumResult& r,
                   const std::vector<std::pair<std::string, std::string>>& metadata) {
  write_metadata(out, r, metadata);
  out << "p_z,rho,log10_rho\n";
  for (std::size_t iz = 0; iz < r.grid.pz.size(); ++iz) {
    out << fmt::format("{:.10f},{:.12e},{}\n", r.grid.pz[iz], r.rho[iz], format_log10(r.rho[iz]));
  }
}

}  // namespace gisfa
