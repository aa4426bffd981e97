#include "bohmq/orbital.hpp"

#include <cmath>
#include <stdexcept>

#include "bohmq/calculus.hpp"

namespace bohmq {

OrbitalKind orbital_kind_from_string(const std::string& s) {
  if (s == "gaussian") return OrbitalKind::gaussian;
  if (s == "exponential") return OrbitalKind::exponential;
  if (s == "oscillator") return OrbitalKind::oscillator;
  if (s == "box-wave") return OrbitalKind::box_wave;
  throw std::invalid_argument("unknown orbital kind: " + s);
}

std::string to_string(OrbitalKind k) {
  switch (k) {
    case OrbitalKind::gaussian: return "gaussian";
    case OrbitalKind::exponential: return "exponential";
    case OrbitalKind::oscillator: return "oscillator";
    case OrbitalKind::box_wave: return "box-wave";
  }
  return "?";
}

double hermite(int n, double x) {
  if (n <= 0) return 1.0;
  double hm = 1.0, h = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double hn = 2.0 * x * h - 2.0 * static_cast<double>(k) * hm;
    hm = h;
    h = hn;
  }
  return h;
}

Orbital Orbital::create(OrbitalKind kind, OrbitalParams params,
                        std::vector<AxisSpec> box) {
  const std::size_t d = box.size();
  if (d == 0) throw std::invalid_argument("orbital: empty box");
  const bool needs_width = kind != OrbitalKind::box_wave;
  const bool needs_center = kind != OrbitalKind::box_wave;
  const bool needs_index =
      kind == OrbitalKind::oscillator || kind == OrbitalKind::box_wave;
  if (needs_width && !(params.width > 0.0))
    throw std::invalid_argument("orbital: width must be positive");
  if (needs_center && params.center.size() != d)
    throw std::invalid_argument("orbital: center needs one value per dimension");
  if (needs_index) {
    if (params.index.size() != d)
      throw std::invalid_argument("orbital: index needs one value per dimension");
    const int min_index = kind == OrbitalKind::box_wave ? 1 : 0;
    for (int n : params.index)
      if (n < min_index)
        throw std::invalid_argument("orbital: quantum index out of range");
  }

  Orbital orb(kind, std::move(params), std::move(box));
  GridSpec quad_grid(1, orb.box_);
  ScalarField sq = eval_on_grid(
      [&orb](std::span<const double> r) {
        const double v = orb.unnormalized(r);
        return v * v;
      },
      quad_grid);
  const double mass = total_integral(sq);
  if (!std::isfinite(mass) || mass <= 0.0)
    throw std::invalid_argument("orbital: cannot normalize on the configured box");
  orb.scale_ = 1.0 / std::sqrt(mass);
  return orb;
}

void Orbital::factor(std::size_t axis, double x, double& f, double& df,
                     double& d2f) const {
  switch (kind_) {
    case OrbitalKind::gaussian: {
      const double s2 = params_.width * params_.width;
      const double u = x - params_.center[axis];
      f = std::exp(-u * u / (2.0 * s2));
      df = -(u / s2) * f;
      d2f = (u * u / (s2 * s2) - 1.0 / s2) * f;
      return;
    }
    case OrbitalKind::oscillator: {
      const double sig = params_.width;
      const double xi = (x - params_.center[axis]) / sig;
      const int n = params_.index[axis];
      const double e = std::exp(-xi * xi / 2.0);
      const double h = hermite(n, xi);
      const double h1 = n > 0 ? 2.0 * n * hermite(n - 1, xi) : 0.0;
      const double h2 = n > 1 ? 4.0 * n * (n - 1) * hermite(n - 2, xi) : 0.0;
      f = h * e;
      df = (h1 - xi * h) * e / sig;
      d2f = (h2 - 2.0 * xi * h1 + (xi * xi - 1.0) * h) * e / (sig * sig);
      return;
    }
    case OrbitalKind::box_wave: {
      const AxisSpec& ax = box_[axis];
      const double len = ax.hi - ax.lo;
      const double k = params_.index[axis] * M_PI / len;
      const double arg = k * (x - ax.lo);
      f = std::sin(arg);
      df = k * std::cos(arg);
      d2f = -k * k * f;
      return;
    }
    case OrbitalKind::exponential:
      break;  // radial, handled by callers
  }
  f = df = d2f = 0.0;
}

double Orbital::unnormalized(std::span<const double> r) const {
  if (kind_ == OrbitalKind::exponential) {
    double s2 = 0.0;
    for (std::size_t a = 0; a < dims(); ++a) {
      const double u = r[a] - params_.center[a];
      s2 += u * u;
    }
    return std::exp(-std::sqrt(s2) / params_.width);
  }
  double prod = 1.0;
  double f, df, d2f;
  for (std::size_t a = 0; a < dims(); ++a) {
    factor(a, r[a], f, df, d2f);
    prod *= f;
  }
  return prod;
}

double Orbital::value(std::span<const double> r) const {
  return scale_ * unnormalized(r);
}

double Orbital::derivative(std::span<const double> r, std::size_t axis) const {
  if (axis >= dims()) throw std::invalid_argument("orbital: axis out of range");
  if (kind_ == OrbitalKind::exponential) {
    double s2 = 0.0;
    for (std::size_t a = 0; a < dims(); ++a) {
      const double u = r[a] - params_.center[a];
      s2 += u * u;
    }
    const double s = std::sqrt(s2);
    if (s == 0.0) return 0.0;  // cusp at the center
    const double v = scale_ * std::exp(-s / params_.width);
    return -(r[axis] - params_.center[axis]) / (params_.width * s) * v;
  }
  double prod = scale_;
  double out = 0.0;
  double f, df, d2f;
  for (std::size_t a = 0; a < dims(); ++a) {
    factor(a, r[a], f, df, d2f);
    if (a == axis)
      out = df;
    else
      prod *= f;
  }
  return prod * out;
}

double Orbital::second_derivative(std::span<const double> r,
                                  std::size_t axis) const {
  if (axis >= dims()) throw std::invalid_argument("orbital: axis out of range");
  if (kind_ == OrbitalKind::exponential) {
    double s2 = 0.0;
    for (std::size_t a = 0; a < dims(); ++a) {
      const double u = r[a] - params_.center[a];
      s2 += u * u;
    }
    const double s = std::sqrt(s2);
    const double lam = params_.width;
    if (s == 0.0) return 0.0;  // cusp at the center
    const double v = scale_ * std::exp(-s / lam);
    const double u = r[axis] - params_.center[axis];
    return v * (u * u / (lam * lam * s2) - (1.0 / lam) * (1.0 / s - u * u / (s2 * s)));
  }
  double prod = scale_;
  double out = 0.0;
  double f, df, d2f;
  for (std::size_t a = 0; a < dims(); ++a) {
    factor(a, r[a], f, df, d2f);
    if (a == axis)
      out = d2f;
    else
      prod *= f;
  }
  return prod * out;
}

bool Orbital::same_shape(const Orbital& other) const {
  return kind_ == other.kind_ && params_.center == other.params_.center &&
         params_.width == other.params_.width && params_.index == other.params_.index;
}

}  // namespace bohmq
