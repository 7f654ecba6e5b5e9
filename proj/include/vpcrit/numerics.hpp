#pragma once

// Double-precision kernels: Dormand-Prince 5(4) integration with cubic
// Hermite dense output and event location, Brent root refinement, adaptive
// Simpson quadrature and golden-section minimisation.
//
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "vpcrit/errors.hpp"

namespace vpcrit {

struct Tolerances {
  double rel = 1e-10;
  double abs = 1e-12;
  std::size_t max_steps = 1'000'000;

  void validate() const {
    if (!(rel > 0.0) || !std::isfinite(rel)) {
      throw domain_error("tolerance: rel must be positive and finite");
    }
    if (!(abs > 0.0) || !std::isfinite(abs)) {
      throw domain_error("tolerance: abs must be positive and finite");
    }
    if (max_steps < 1) {
      throw domain_error("tolerance: max_steps must be at least 1");
    }
  }
};

template <std::size_t N>
using State = std::array<double, N>;

/// Piecewise cubic Hermite interpolant through accepted integrator nodes.
///
/// Each component is interpolated from its value and its time derivative at
/// both ends of a step, so the interpolant is C^1 and reproduces the stored
/// node states exactly.
template <std::size_t N>
class DenseTrajectory {
 public:
  void push_back(double t, const State<N>& y, const State<N>& dydt) {
    if (!t_.empty() && !(t > t_.back())) {
      throw consistency_error("dense trajectory: nodes must be strictly increasing");
    }
    t_.push_back(t);
    y_.push_back(y);
    f_.push_back(dydt);
  }

  std::size_t size() const noexcept { return t_.size(); }
  bool empty() const noexcept { return t_.empty(); }
  std::span<const double> nodes() const noexcept { return t_; }
  const State<N>& state(std::size_t i) const { return y_.at(i); }
  const State<N>& derivative(std::size_t i) const { return f_.at(i); }
  double front_time() const { return t_.front(); }
  double back_time() const { return t_.back(); }

  /// Interpolated state at t, front_time() <= t <= back_time().
  State<N> operator()(double t) const {
    const std::size_t i = segment(t);
    if (t == t_[i]) return y_[i];
    const double h = t_[i + 1] - t_[i];
    const double s = (t - t_[i]) / h;
    const double s2 = s * s;
    const double om = 1.0 - s;
    const double h00 = (1.0 + 2.0 * s) * om * om;
    const double h10 = s * om * om;
    const double h01 = s2 * (3.0 - 2.0 * s);
    const double h11 = s2 * (s - 1.0);
    State<N> out{};
    for (std::size_t k = 0; k < N; ++k) {
      out[k] = h00 * y_[i][k] + h * h10 * f_[i][k] + h01 * y_[i + 1][k] + h * h11 * f_[i + 1][k];
    }
    return out;
  }

  /// Time derivative of the interpolant at t.
  State<N> slope(double t) const {
    const std::size_t i = segment(t);
    const double h = t_[i + 1] - t_[i];
    const double s = (t - t_[i]) / h;
    const double d00 = 6.0 * s * s - 6.0 * s;
    const double d10 = 3.0 * s * s - 4.0 * s + 1.0;
    const double d11 = 3.0 * s * s - 2.0 * s;
    State<N> out{};
    for (std::size_t k = 0; k < N; ++k) {
      out[k] = d00 * (y_[i][k] - y_[i + 1][k]) / h + d10 * f_[i][k] + d11 * f_[i + 1][k];
    }
    return out;
  }

 private:
  // Index i of the segment [t_i, t_{i+1}] containing t.
  std::size_t segment(double t) const {
    if (t_.size() < 2) {
      throw domain_error("dense trajectory: need at least two nodes to interpolate");
    }
    if (!(t >= t_.front() && t <= t_.back())) {
      throw domain_error("dense trajectory: evaluation outside [" + std::to_string(t_.front()) +
                         ", " + std::to_string(t_.back()) + "]");
    }
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - t_.begin());
    i = (i == 0) ? 0 : i - 1;
    return std::min(i, t_.size() - 2);
  }

  std::vector<double> t_;
  std::vector<State<N>> y_;
  std::vector<State<N>> f_;
};

template <std::size_t N>
struct IvpResult {
  DenseTrajectory<N> trajectory;
  std::optional<double> event;  // abscissa of the first sign change, if any
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
};

/// Tag for integrate_ivp without an event function.
struct no_event {};

/// Brent's method: inverse quadratic interpolation and secant steps, with a
/// bisection fallback that keeps a sign-changing bracket at every iteration.
///
/// Stops when |g(x)| <= tol.abs or when the bracket width drops below
/// tol.rel * |x| + tol.abs.
template <class G>
double find_root_bracketed(G&& g, double a, double b, const Tolerances& tol = {}) {
  double fa = g(a);
  double fb = g(b);
  if (std::isnan(fa) || std::isnan(fb)) throw domain_error("find_root_bracketed: NaN at bracket end");
  if (std::abs(fa) <= tol.abs) return a;
  if (std::abs(fb) <= tol.abs) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw bracket_error("find_root_bracketed: no sign change on [" + std::to_string(a) + ", " +
                        std::to_string(b) + "]");
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (std::size_t iter = 0; iter < tol.max_steps; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * (tol.rel * std::abs(b) + tol.abs);
    const double m = 0.5 * (c - b);
    if (std::abs(fb) <= tol.abs || std::abs(m) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (m > 0.0 ? tol1 : -tol1);
    fb = g(b);
    if (std::isnan(fb)) throw domain_error("find_root_bracketed: NaN inside bracket");
  }
  throw budget_error("find_root_bracketed: iteration budget exhausted");
}

namespace detail {

template <std::size_t N>
struct Dp5Step {
  State<N> y;
  State<N> f;    // rhs at the new point (first-same-as-last)
  State<N> err;  // embedded 5th-4th order difference
};

template <std::size_t N>
void require_finite(const State<N>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw domain_error(std::string("integrate_ivp: non-finite ") + what);
  }
}

// One Dormand-Prince 5(4) step of size h from (t, y) with f = rhs(t, y).
template <std::size_t N, class Rhs>
Dp5Step<N> dp5_step(Rhs& rhs, double t, const State<N>& y, const State<N>& f, double h) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  State<N> tmp{};
  const State<N>& k1 = f;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  const State<N> k2 = rhs(t + c2 * h, tmp);
  require_finite(k2, "right-hand side");
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  const State<N> k3 = rhs(t + c3 * h, tmp);
  require_finite(k3, "right-hand side");
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  const State<N> k4 = rhs(t + c4 * h, tmp);
  require_finite(k4, "right-hand side");
  for (std::size_t i = 0; i < N; ++i) {
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  }
  const State<N> k5 = rhs(t + c5 * h, tmp);
  require_finite(k5, "right-hand side");
  for (std::size_t i = 0; i < N; ++i) {
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  }
  const State<N> k6 = rhs(t + h, tmp);
  require_finite(k6, "right-hand side");

  Dp5Step<N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out.y[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  }
  out.f = rhs(t + h, out.y);
  require_finite(out.f, "right-hand side");
  for (std::size_t i = 0; i < N; ++i) {
    out.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * out.f[i]);
  }
  return out;
}

template <std::size_t N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1, const Tolerances& tol) {
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = tol.abs + tol.rel * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = err[i] / sc;
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(N));
}

// Starting step size (Hairer, Norsett & Wanner, Solving ODEs I, II.4).
template <std::size_t N, class Rhs>
double initial_step(Rhs& rhs, double t0, const State<N>& y0, const State<N>& f0, double span,
                    const Tolerances& tol) {
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = tol.abs + tol.rel * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / N);
  d1 = std::sqrt(d1 / N);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  State<N> y1{};
  for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h0 * f0[i];
  const State<N> f1 = rhs(t0 + h0, y1);
  require_finite(f1, "right-hand side");
  double d2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = tol.abs + tol.rel * std::abs(y0[i]);
    d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / N) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(t, y) on [t0, t_max]
/// with proportional-integral step control.
///
/// When `event(t, y)` changes sign across an accepted step, the crossing is
/// bracketed within that step and refined with Brent's method on a re-taken
/// single step from the step start; the refined point becomes the last node
/// of the trajectory and integration stops there.
template <std::size_t N, class Rhs, class Event>
IvpResult<N> integrate_ivp(Rhs&& rhs, const State<N>& y0, double t0, double t_max,
                           const Tolerances& tol, Event&& event) {
  tol.validate();
  if (!(t_max > t0)) throw domain_error("integrate_ivp: t_max must exceed t0");
  detail::require_finite(y0, "initial state");

  constexpr bool has_event = !std::is_same_v<std::decay_t<Event>, no_event>;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  // PI controller constants (DOPRI5 defaults).
  constexpr double beta_pi = 0.04;
  constexpr double expo = 0.2 - 0.75 * beta_pi;
  constexpr double safety = 0.9;

  IvpResult<N> out;
  double t = t0;
  State<N> y = y0;
  State<N> f = rhs(t, y);
  detail::require_finite(f, "right-hand side");
  out.trajectory.push_back(t, y, f);

  double g_prev = 0.0;
  if constexpr (has_event) g_prev = event(t, y);

  double h = detail::initial_step(rhs, t0, y, f, t_max - t0, tol);
  double err_old = 1e-4;
  bool last_rejected = false;
  std::size_t attempts = 0;

  while (t < t_max) {
    if (++attempts > tol.max_steps) {
      throw budget_error("integrate_ivp: step budget of " + std::to_string(tol.max_steps) +
                         " exhausted at t = " + std::to_string(t));
    }
    if (h < 16.0 * eps * std::max(std::abs(t), 1.0)) {
      throw stiffness_error("integrate_ivp: step size underflow at t = " + std::to_string(t));
    }
    const bool last = (t + h >= t_max);
    if (last) h = t_max - t;

    auto step = detail::dp5_step<N>(rhs, t, y, f, h);
    const double err = detail::error_norm<N>(step.err, y, step.y, tol);
    if (!std::isfinite(err)) throw domain_error("integrate_ivp: non-finite error estimate");

    if (err > 1.0) {
      ++out.rejected_steps;
      last_rejected = true;
      h /= std::min(10.0, std::pow(err, expo) / safety);
      continue;
    }

    ++out.accepted_steps;
    const double t_new = last ? t_max : t + h;

    if constexpr (has_event) {
      const double g_new = event(t_new, step.y);
      if (std::isnan(g_new)) throw domain_error("integrate_ivp: NaN event value");
      const bool crossed = (g_prev > 0.0 && g_new <= 0.0) || (g_prev < 0.0 && g_new >= 0.0);
      if (crossed) {
        const double t_left = t;
        const State<N> y_left = y;
        const State<N> f_left = f;
        auto g_step = [&](double tau) {
          if (tau == 0.0) return g_prev;
          const auto s = detail::dp5_step<N>(rhs, t_left, y_left, f_left, tau);
          return static_cast<double>(event(t_left + tau, s.y));
        };
        Tolerances root_tol{4.0 * eps, tol.abs, tol.max_steps};
        const double tau = find_root_bracketed(g_step, 0.0, t_new - t_left, root_tol);
        const double t_event = t_left + tau;
        if (t_event > t_left) {
          const auto s = detail::dp5_step<N>(rhs, t_left, y_left, f_left, tau);
          out.trajectory.push_back(t_event, s.y, s.f);
          out.event = t_event;
        } else {
          out.event = t_left;
        }
        return out;
      }
      g_prev = g_new;
    }

    t = t_new;
    y = step.y;
    f = step.f;
    out.trajectory.push_back(t, y, f);

    double fac = std::pow(err, expo) * std::pow(err_old, -beta_pi) / safety;
    fac = std::clamp(fac, 0.2, 10.0);  // growth at most 5x, shrink at most 10x
    double h_new = h / fac;
    if (last_rejected) h_new = std::min(h_new, h);
    err_old = std::max(err, 1e-4);
    last_rejected = false;
    h = h_new;
  }
  return out;
}

template <std::size_t N, class Rhs>
IvpResult<N> integrate_ivp(Rhs&& rhs, const State<N>& y0, double t0, double t_max,
                           const Tolerances& tol = {}) {
  return integrate_ivp<N>(std::forward<Rhs>(rhs), y0, t0, t_max, tol, no_event{});
}

/// Globally adaptive Simpson quadrature with Richardson extrapolation.
///
/// Every panel carries a Simpson value on its two halves and the Richardson
/// error estimate |S2 - S1| / 15. The panel with the largest estimate is
/// split until the summed estimate is at most max(tol.abs, tol.rel * |I|).
/// A `tol.abs` of zero gives a purely relative target, which is what
/// scale-free integrands need. tol.max_steps bounds the number of integrand
/// evaluations.
template <class H>
double integrate_adaptive(H&& h, double a, double b, const Tolerances& tol = {}) {
  if (!(tol.rel > 0.0) || tol.abs < 0.0) throw domain_error("integrate_adaptive: bad tolerance");
  if (!std::isfinite(a) || !std::isfinite(b)) throw domain_error("integrate_adaptive: non-finite limit");
  if (a > b) throw domain_error("integrate_adaptive: requires a <= b");
  if (a == b) return 0.0;

  auto eval = [&](double x) {
    const double v = h(x);
    if (!std::isfinite(v)) {
      throw domain_error("integrate_adaptive: non-finite integrand at x = " + std::to_string(x));
    }
    return v;
  };

  // Five equispaced samples f0..f4 on [a, b].
  struct Panel {
    double a, b;
    std::array<double, 5> f;
    double value;  // Richardson-corrected composite Simpson
    double err;
    bool splittable;
  };
  auto make_panel = [](double pa, double pb, const std::array<double, 5>& f) {
    const double w = pb - pa;
    const double whole = w / 6.0 * (f[0] + 4.0 * f[2] + f[4]);
    const double halves = w / 12.0 * (f[0] + 4.0 * f[1] + 2.0 * f[2] + 4.0 * f[3] + f[4]);
    const double delta = halves - whole;
    const double m = 0.5 * (pa + pb);
    const bool splittable = w > 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(m), 1e-300) &&
                            pa < pa + 0.25 * w && pb - 0.25 * w < pb;
    return Panel{pa, pb, f, halves + delta / 15.0, std::abs(delta) / 15.0, splittable};
  };
  auto worse = [](const Panel& x, const Panel& y) { return x.err < y.err; };

  constexpr int initial_panels = 8;
  const double width = b - a;
  std::vector<Panel> heap;
  heap.reserve(256);
  std::size_t evaluations = 0;
  {
    std::array<double, 4 * initial_panels + 1> fx{};
    for (int i = 0; i <= 4 * initial_panels; ++i) {
      const double x = (i == 4 * initial_panels) ? b : a + width * i / (4.0 * initial_panels);
      fx[i] = eval(x);
    }
    evaluations = fx.size();
    for (int p = 0; p < initial_panels; ++p) {
      const double pa = a + width * p / initial_panels;
      const double pb = (p + 1 == initial_panels) ? b : a + width * (p + 1) / initial_panels;
      heap.push_back(make_panel(pa, pb, {fx[4 * p], fx[4 * p + 1], fx[4 * p + 2], fx[4 * p + 3], fx[4 * p + 4]}));
    }
  }
  std::make_heap(heap.begin(), heap.end(), worse);

  auto totals = [&heap]() {
    double value = 0.0, comp = 0.0, err = 0.0;
    for (const auto& p : heap) {
      const double t = value + p.value;
      comp += (std::abs(value) >= std::abs(p.value)) ? (value - t) + p.value : (p.value - t) + value;
      value = t;
      err += p.err;
    }
    return std::pair{value + comp, err};
  };

  auto [value, err] = totals();
  std::size_t since_resum = 0;
  while (err > std::max(tol.abs, tol.rel * std::abs(value))) {
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Panel p = heap.back();
    if (!p.splittable) {
      // Unsplittable panels stay in the sum but no longer drive refinement.
      heap.back().err = 0.0;
      std::push_heap(heap.begin(), heap.end(), worse);
      err -= p.err;
      if (heap.front().err == 0.0) break;
      continue;
    }
    if (evaluations + 4 > tol.max_steps) {
      throw budget_error("integrate_adaptive: evaluation budget of " + std::to_string(tol.max_steps) +
                         " exhausted");
    }
    heap.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double q = 0.25 * (p.b - p.a);
    const double f_l1 = eval(p.a + 0.5 * q), f_l3 = eval(p.a + 1.5 * q);
    const double f_r1 = eval(m + 0.5 * q), f_r3 = eval(m + 1.5 * q);
    evaluations += 4;
    const Panel left = make_panel(p.a, m, {p.f[0], f_l1, p.f[1], f_l3, p.f[2]});
    const Panel right = make_panel(m, p.b, {p.f[2], f_r1, p.f[3], f_r3, p.f[4]});
    value += left.value + right.value - p.value;
    err += left.err + right.err - p.err;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), worse);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), worse);
    if (++since_resum == 256) {
      std::tie(value, err) = totals();
      since_resum = 0;
    }
  }
  return totals().first;
}

/// Golden-section search for a minimum of a unimodal f on [a, b].
template <class F>
double minimize_golden(F&& f, double a, double b, double x_tol) {
  if (!(a < b)) throw domain_error("minimize_golden: requires a < b");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace vpcrit
