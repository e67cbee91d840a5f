#include "sqfold/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace sqfold {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHalfPi = kPi / 2.0;
}  // namespace

Vec2 rot(const Vec2& p, double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c * p.v + s * p.w, -s * p.v + c * p.w};
}

Vec2 fold(const Vec2& p) { return {p.v, std::fabs(p.w)}; }

double arc_tan(const Vec2& p) {
  if (p.v == 0.0 && p.w == 0.0)
    throw std::invalid_argument("arc_tan: zero vector has no angle");
  if (p.v > 0.0) return std::atan(p.w / p.v);
  if (p.v < 0.0) return std::atan(p.w / p.v) - kPi;
  return p.w > 0.0 ? kHalfPi : -kHalfPi;
}

namespace {

// Angle of (b, (b^2-1)/2) per the three-case bound formula.
double bound_angle(double b) {
  if (b > 0.0) return std::atan((b * b - 1.0) / (2.0 * b));
  if (b < 0.0) return std::atan((b * b - 1.0) / (2.0 * b)) - kPi;
  return -kHalfPi;
}

}  // namespace

AngleSpan angle_span(double l, double u) {
  if (!(l <= u)) throw std::invalid_argument("angle_span: requires l <= u");
  if (!std::isfinite(l) || !std::isfinite(u))
    throw std::invalid_argument("angle_span: bounds must be finite");
  AngleSpan s;
  s.theta_min = bound_angle(l);
  s.theta_max = bound_angle(u);
  s.theta_mid = 0.5 * (s.theta_min + s.theta_max);
  s.theta_d = s.theta_max - s.theta_min;
  return s;
}

double knot(double alpha) {
  if (!(alpha > -1.5 * kPi && alpha < kHalfPi))
    throw std::invalid_argument("knot: angle outside (-3*pi/2, pi/2)");
  if (alpha == -kHalfPi) return 0.0;
  // tan + sec written as (sin+1)/cos; stable through the -pi/2 pole.
  return (std::sin(alpha) + 1.0) / std::cos(alpha);
}

SectorAngles sector_angles(const SectorIndex& z, const AngleSpan& span) {
  const int nu = static_cast<int>(z.z.size());
  if (nu < 1) throw std::invalid_argument("sector_angles: requires nu >= 1");
  double phi = span.theta_min;
  int zeros = 0;  // sum of (1 - z_j) over the prefix z_1..z_i
  double step = span.theta_d;
  for (int i = 0; i < nu; ++i) {
    step *= 0.5;  // theta_d / 2^{i+1}
    const double sign = (zeros % 2 == 0) ? 1.0 : -1.0;
    phi += sign * step;
    zeros += 1 - z.z[i];
  }
  const double sign_s = (zeros % 2 == 0) ? 1.0 : -1.0;
  SectorAngles out;
  out.phi = phi;
  out.beta = phi + sign_s * step;  // step == theta_d / 2^nu here
  return out;
}

Triangle triangle(double alpha, double beta) {
  if (std::fabs(alpha - beta) < 1e-12)
    throw std::invalid_argument("triangle: degenerate sector (alpha == beta)");
  auto tangent_row = [](double a) {
    return Halfplane{std::cos(a), 0.5 * (std::sin(a) - 1.0),
                     0.5 * (std::sin(a) + 1.0), Sense::LE};
  };
  const double mid = 0.5 * (alpha + beta);
  const double half = 0.5 * (alpha - beta);
  Triangle t;
  t.alpha = alpha;
  t.beta = beta;
  t.halfplanes[0] = tangent_row(alpha);
  t.halfplanes[1] = tangent_row(beta);
  t.halfplanes[2] =
      Halfplane{std::cos(mid), 0.5 * (std::sin(mid) - std::cos(half)),
                0.5 * (std::sin(mid) + std::cos(half)), Sense::GE};
  return t;
}

bool Triangle::contains(double x, double y, double tol) const {
  for (const auto& h : halfplanes)
    if (h.violation(x, y) > tol) return false;
  return true;
}

bool member_plus(double x, double y, double alpha, double beta, double tol) {
  const Triangle t = triangle(alpha, beta);
  return t.halfplanes[2].violation(x, y) <= tol && y >= x * x - tol;
}

ErrorBounds error_bounds(double l, double u, int nu) {
  if (nu < 2) throw std::invalid_argument("error_bounds: requires nu >= 2");
  if (!(l <= u)) throw std::invalid_argument("error_bounds: requires l <= u");
  const double m = std::max(l * l, u * u) + 1.0;
  const double scale = std::ldexp(m, -(nu - 1));  // m / 2^{nu-1}
  return {scale, scale * scale};
}

}  // namespace sqfold
