#pragma once

// Self-contained numerical helpers used only by the tests, kept independent
// of the library code they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace testsupport {

// Regularized lower incomplete gamma P(a, x), series branch.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x), continued fraction (Lentz).
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p domain");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

// CDF of InvGamma(shape, rate): P(X <= x) = Q(shape, rate / x).
inline double inv_gamma_cdf(double shape, double rate, double x) {
    if (x <= 0.0) return 0.0;
    return gamma_q(shape, rate / x);
}

// Two-sided Kolmogorov-Smirnov statistic of a sample against a CDF.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// log density of a zero-mean multivariate normal evaluated at y, with the
// covariance given row-major; in-place Cholesky.
inline double mvn_logpdf(std::vector<double> cov, std::vector<double> y) {
    const std::size_t n = y.size();
    if (cov.size() != n * n) throw std::invalid_argument("mvn dims");
    // Cholesky cov = L L'.
    double logdet = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double diag = cov[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= cov[j * n + k] * cov[j * n + k];
        if (diag <= 0.0) throw std::runtime_error("mvn not positive definite");
        const double ljj = std::sqrt(diag);
        cov[j * n + j] = ljj;
        logdet += 2.0 * std::log(ljj);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = cov[i * n + j];
            for (std::size_t k = 0; k < j; ++k) v -= cov[i * n + k] * cov[j * n + k];
            cov[i * n + j] = v / ljj;
        }
    }
    // Solve L z = y, accumulate z'z.
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = y[i];
        for (std::size_t k = 0; k < i; ++k) v -= cov[i * n + k] * y[k];
        y[i] = v / cov[i * n + i];
        quad += y[i] * y[i];
    }
    constexpr double kLog2Pi = 1.8378770664093454835606594728112;
    return -0.5 * (static_cast<double>(n) * kLog2Pi + logdet + quad);
}

// Adaptive Simpson quadrature.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 60);
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;
    double se_mean = 0.0;
};

inline Moments moments(const std::vector<double>& v) {
    Moments m;
    const double n = static_cast<double>(v.size());
    for (double x : v) m.mean += x;
    m.mean /= n;
    for (double x : v) m.var += (x - m.mean) * (x - m.mean);
    m.var /= (n - 1.0);
    m.se_mean = std::sqrt(m.var / n);
    return m;
}

// Standard error of the mean of a correlated chain via batch means.
inline double batch_se(const std::vector<double>& chain, std::size_t n_batches = 50) {
    const std::size_t len = chain.size() / n_batches;
    std::vector<double> bm;
    for (std::size_t b = 0; b < n_batches; ++b) {
        double s = 0.0;
        for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += chain[i];
        bm.push_back(s / static_cast<double>(len));
    }
    const Moments m = moments(bm);
    return std::sqrt(m.var / static_cast<double>(n_batches));
}

}  // namespace testsupport
