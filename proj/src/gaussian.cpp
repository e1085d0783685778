#include "spmi/gaussian.hpp"

#include <cmath>
#include <limits>

#include "spmi/errors.hpp"

namespace spmi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSqrtTwoPi = 2.5066282746310005024157652848110;

// Gauss-Legendre nodes/weights on [-1, 1], symmetric halves only, as used by
// Genz's BVND: 6-, 12- and 20-point rules selected by |rho|.
constexpr double kW6[3] = {0.1713244923791703, 0.3607615730481386,
                           0.4679139345726910};
constexpr double kX6[3] = {0.9324695142031520, 0.6612093864662645,
                           0.2386191860831969};

constexpr double kW12[6] = {0.04717533638651177, 0.1069393259953183,
                            0.1600783285433464,  0.2031674267230659,
                            0.2334925365383547,  0.2491470458134029};
constexpr double kX12[6] = {0.9815606342467191, 0.9041172563704750,
                            0.7699026741943050, 0.5873179542866171,
                            0.3678314989981802, 0.1252334085114692};

constexpr double kW20[10] = {0.01761400713915212, 0.04060142980038694,
                             0.06267204833410906, 0.08327674157670475,
                             0.1019301198172404,  0.1181945319615184,
                             0.1316886384491766,  0.1420961093183821,
                             0.1491729864726037,  0.1527533871307259};
constexpr double kX20[10] = {0.9931285991850949,  0.9639719272779138,
                             0.9122344282513259,  0.8391169718222188,
                             0.7463319064601508,  0.6360536807265150,
                             0.5108670019508271,  0.3737060887154196,
                             0.2277858511416451,  0.07652652113349733};

// Genz's BVND: Pr(X > h, Y > k) for finite h, k and |rho| < 1.
// Drezner & Wesolowsky's single-integral reduction with fixed-order
// Gauss-Legendre quadrature; the |rho| > 0.925 branch integrates the
// complementary variable to keep accuracy near the singular correlation.
double bvnd(double h, double k, double rho) {
  const double* w = kW6;
  const double* x = kX6;
  int ng = 3;
  if (std::abs(rho) >= 0.3 && std::abs(rho) < 0.75) {
    w = kW12;
    x = kX12;
    ng = 6;
  } else if (std::abs(rho) >= 0.75) {
    w = kW20;
    x = kX20;
    ng = 10;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(rho) < 0.925) {
    const double hs = (h * h + k * k) / 2.0;
    const double asr = std::asin(rho);
    for (int i = 0; i < ng; ++i) {
      for (int is = -1; is <= 1; is += 2) {
        const double sn = std::sin(asr * (is * x[i] + 1.0) / 2.0);
        bvn += w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      }
    }
    bvn = bvn * asr / (2.0 * kTwoPi) +
          normal_cdf(-h) * normal_cdf(-k);
  } else {
    if (rho < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (std::abs(rho) < 1.0) {
      const double as = (1.0 - rho) * (1.0 + rho);
      double a = std::sqrt(as);
      const double bs = (h - k) * (h - k);
      const double c = (4.0 - hk) / 8.0;
      const double d = (12.0 - hk) / 16.0;
      double asr = -(bs / as + hk) / 2.0;
      if (asr > -100.0) {
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 +
               c * d * as * as / 5.0);
      }
      if (-hk < 100.0) {
        const double b = std::sqrt(bs);
        bvn -= std::exp(-hk / 2.0) * kSqrtTwoPi * normal_cdf(-b / a) * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a /= 2.0;
      for (int i = 0; i < ng; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          const double xs = a * (is * x[i] + 1.0);
          const double xs2 = xs * xs;
          const double rs = std::sqrt(1.0 - xs2);
          asr = -(bs / xs2 + hk) / 2.0;
          if (asr > -100.0) {
            bvn += a * w[i] * std::exp(asr) *
                   (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs -
                    (1.0 + c * xs2 * (1.0 + d * xs2)));
          }
        }
      }
      bvn = -bvn / kTwoPi;
    }
    if (rho > 0.0) {
      bvn += normal_cdf(-std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) bvn += normal_cdf(k) - normal_cdf(h);
    }
  }
  return bvn;
}

}  // namespace

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244008443621048);
}

double normal_quantile(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) {
    throw InvalidParameterError("normal_quantile: p must lie in [0, 1]");
  }
  if (p == 0.0) return -kInf;
  if (p == 1.0) return kInf;

  // Acklam's rational approximation (relative error < 1.15e-9) ...
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
          c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // ... followed by one Halley step against the exact CDF, which drives the
  // relative error down to ~1e-15.
  const double e = normal_cdf(x) - p;
  const double u = e * kSqrtTwoPi * std::exp(x * x / 2.0);
  x -= u / (1.0 + x * u / 2.0);
  return x;
}

double bvn_upper(double h, double k, double rho) {
  if (std::isnan(rho) || std::abs(rho) >= 1.0) {
    throw InvalidParameterError("bvn_upper: require |rho| < 1");
  }
  if (std::isnan(h) || std::isnan(k)) {
    throw InvalidParameterError("bvn_upper: h and k must not be NaN");
  }
  if (h == kInf || k == kInf) return 0.0;
  if (h == -kInf && k == -kInf) return 1.0;
  if (h == -kInf) return normal_cdf(-k);
  if (k == -kInf) return normal_cdf(-h);
  return bvnd(h, k, rho);
}

double bvn_cdf(double x, double y, double rho) {
  // Pr(X <= x, Y <= y) = Pr(-X > -x, -Y > -y) and (-X, -Y) has the same
  // correlation, so the lower orthant is the upper orthant of the negated
  // arguments.
  return bvn_upper(-x, -y, rho);
}

}  // namespace spmi
