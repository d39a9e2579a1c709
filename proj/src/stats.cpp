#include <mortcast/stats.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mortcast {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

double rational(const double* num, const double* den, int n, double r) {
    double p = num[n - 1];
    double q = den[n - 1];
    for (int i = n - 2; i >= 0; --i) {
        p = p * r + num[i];
        q = q * r + den[i];
    }
    return p / q;
}

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p must lie in (0,1)");

    // AS 241, PPND16.
    static const double a[8] = {3.3871328727963666080e+0, 1.3314166789178437745e+2,
                                1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                3.3430575583588128105e+4, 2.5090809287301226727e+3};
    static const double b[8] = {1.0,                      4.2313330701600911252e+1,
                                6.8718700749205790830e+2, 5.3941960214247511077e+3,
                                2.1213794301586595867e+4, 3.9307895800092710610e+4,
                                2.8729085735721942674e+4, 5.2264952788528545610e+3};
    static const double c[8] = {1.42343711074968357734e+0, 4.63033784615654529590e+0,
                                5.76949722146069140550e+0, 3.64784832476320460504e+0,
                                1.27045825245236838258e+0, 2.41780725177450611770e-1,
                                2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static const double d[8] = {1.0,                       2.05319162663775882187e+0,
                                1.67638483018380384940e+0, 6.89767334985100004550e-1,
                                1.48103976427480074590e-1, 1.51986665636164571966e-2,
                                5.47593808499534494600e-4, 1.05075007164441684324e-9};
    static const double e[8] = {6.65790464350110377720e+0, 5.46378491116411436990e+0,
                                1.78482653991729133580e+0, 2.96560571828504891230e-1,
                                2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static const double f[8] = {1.0,                       5.99832206555887937690e-1,
                                1.36929880922735805310e-1, 1.48753612908506148525e-2,
                                7.86869131145613259100e-4, 1.84631831751005468180e-5,
                                1.42151175831644588870e-7, 2.04426310338993978564e-15};

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * rational(a, b, 8, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        value = rational(c, d, 8, r - 1.6);
    } else {
        value = rational(e, f, 8, r - 5.0);
    }
    return q < 0.0 ? -value : value;
}

double chi2_survival_2df(double x) {
    if (x < 0.0) return 1.0;
    return std::exp(-0.5 * x);
}

double sample_mean(const Vector& x) {
    if (x.size() == 0) throw std::invalid_argument("sample_mean: empty sample");
    return x.mean();
}

double sample_variance(const Vector& x) {
    if (x.size() < 2) throw std::invalid_argument("sample_variance: need at least two points");
    const Vector centered = x.array() - x.mean();
    return centered.squaredNorm() / static_cast<double>(x.size() - 1);
}

double sample_skewness(const Vector& x) {
    const double n = static_cast<double>(x.size());
    const Vector centered = x.array() - x.mean();
    const double m2 = centered.squaredNorm() / n;
    const double m3 = centered.array().cube().sum() / n;
    if (m2 <= 0.0) throw std::invalid_argument("sample_skewness: zero variance");
    return m3 / std::pow(m2, 1.5);
}

double sample_kurtosis(const Vector& x) {
    const double n = static_cast<double>(x.size());
    const Vector centered = x.array() - x.mean();
    const double m2 = centered.squaredNorm() / n;
    const double m4 = centered.array().pow(4).sum() / n;
    if (m2 <= 0.0) throw std::invalid_argument("sample_kurtosis: zero variance");
    return m4 / (m2 * m2);
}

double stable_sum(Vector values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    double compensation = 0.0;
    for (Index i = 0; i < values.size(); ++i) {
        const double v = values[i];
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    return sum + compensation;
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t state = master ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    return splitmix64(state);
}

} // namespace mortcast
