#include <mortcast/uncertainty.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <mortcast/csv.hpp>
#include <mortcast/stats.hpp>

namespace mortcast {

NoiseSpreading noise_spreading_from_string(const std::string& name) {
    if (name == "random_walk") return NoiseSpreading::random_walk;
    if (name == "constant") return NoiseSpreading::constant;
    throw std::invalid_argument("unknown noise spreading: '" + name + "'");
}

std::string to_string(NoiseSpreading spreading) {
    return spreading == NoiseSpreading::random_walk ? "random_walk" : "constant";
}

NoiseModel NoiseModel::from_residuals(const Vector& residuals, NoiseSpreading spreading) {
    if (residuals.size() < 2) throw std::invalid_argument("NoiseModel: need at least 2 residuals");
    NoiseModel noise;
    noise.residuals = residuals;
    noise.sigma2_gamma = sample_variance(residuals);
    noise.spreading = spreading;
    return noise;
}

void PredictionInterval::validate() const {
    const Index s = point.size();
    if (lower.size() != s || upper.size() != s || static_cast<Index>(years.size()) != s)
        throw std::invalid_argument("PredictionInterval: length mismatch");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("PredictionInterval: alpha must lie in (0,1)");
    for (Index h = 0; h < s; ++h)
        if (!(lower[h] <= point[h] && point[h] <= upper[h]))
            throw std::invalid_argument("PredictionInterval: bounds out of order at step " + std::to_string(h));
}

Vector total_variance(const BaggedEstimate& bagged, const NoiseModel& noise) {
    Vector total(bagged.variance.size());
    for (Index h = 0; h < total.size(); ++h) {
        const double spread = noise.spreading == NoiseSpreading::random_walk
                                  ? static_cast<double>(h + 1) * noise.sigma2_gamma
                                  : noise.sigma2_gamma;
        total[h] = bagged.variance[h] + spread;
    }
    return total;
}

PredictionInterval kappa_pi(const std::vector<int>& years, const Vector& point, const Vector& total_var,
                            double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("kappa_pi: alpha must lie in (0,1)");
    if (point.size() != total_var.size() || static_cast<Index>(years.size()) != point.size())
        throw std::invalid_argument("kappa_pi: length mismatch");
    const double z = normal_quantile(1.0 - alpha / 2.0);
    PredictionInterval interval;
    interval.years = years;
    interval.point = point;
    interval.alpha = alpha;
    interval.lower.resize(point.size());
    interval.upper.resize(point.size());
    for (Index h = 0; h < point.size(); ++h) {
        if (!(total_var[h] >= 0.0)) throw std::invalid_argument("kappa_pi: negative variance");
        const double half_width = z * std::sqrt(total_var[h]);
        interval.lower[h] = point[h] - half_width;
        interval.upper[h] = point[h] + half_width;
    }
    return interval;
}

PredictionInterval rate_pi(const LCParameters& params, const PredictionInterval& kappa_interval, int age) {
    kappa_interval.validate();
    const Index x = params.age_index(age); // throws for out-of-range ages
    const double a = params.alpha[x];
    const double b = params.beta[x];
    PredictionInterval interval;
    interval.years = kappa_interval.years;
    interval.alpha = kappa_interval.alpha;
    interval.point = (a + b * kappa_interval.point.array()).matrix();
    const Vector mapped_lower = (a + b * kappa_interval.lower.array()).matrix();
    const Vector mapped_upper = (a + b * kappa_interval.upper.array()).matrix();
    interval.lower = mapped_lower.cwiseMin(mapped_upper);
    interval.upper = mapped_lower.cwiseMax(mapped_upper);
    return interval;
}

GateRecord noise_diagnostics_gate(const NoiseModel& noise, const std::vector<TestReport>& reports) {
    (void)noise;
    GateRecord record;
    bool adf_seen = false;
    bool adf_rejects = false;
    bool normality_rejects = false;
    for (const auto& report : reports) {
        GateEntry entry;
        entry.test = report.test_name;
        entry.p_value = report.p_value;
        if (report.test_name == "adf") {
            adf_seen = true;
            entry.rejected = report.p_value < 0.05;
            adf_rejects = entry.rejected;
        } else {
            entry.rejected = report.p_value < 0.01;
            normality_rejects = normality_rejects || entry.rejected;
        }
        record.entries.push_back(entry);
    }
    if (!adf_seen) throw std::invalid_argument("noise_diagnostics_gate: ADF report required");
    if (!adf_rejects && !normality_rejects) {
        record.spreading = NoiseSpreading::random_walk;
        record.warning = false;
    } else {
        record.spreading = NoiseSpreading::constant;
        record.warning = true;
    }
    return record;
}

void write_interval_csv(const PredictionInterval& interval, std::ostream& out) {
    out << "year,point,lower,upper,alpha\n";
    for (Index h = 0; h < interval.point.size(); ++h)
        out << interval.years[h] << ',' << format_double(interval.point[h]) << ','
            << format_double(interval.lower[h]) << ',' << format_double(interval.upper[h]) << ','
            << format_double(interval.alpha) << '\n';
}

PredictionInterval read_interval_csv(std::istream& in) {
    const auto rows = read_csv(in, "year,point,lower,upper,alpha");
    PredictionInterval interval;
    interval.point.resize(static_cast<Index>(rows.size()));
    interval.lower.resize(static_cast<Index>(rows.size()));
    interval.upper.resize(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        interval.years.push_back(static_cast<int>(parse_long(rows[i][0])));
        interval.point[static_cast<Index>(i)] = parse_double(rows[i][1]);
        interval.lower[static_cast<Index>(i)] = parse_double(rows[i][2]);
        interval.upper[static_cast<Index>(i)] = parse_double(rows[i][3]);
        interval.alpha = parse_double(rows[i][4]);
    }
    interval.validate();
    return interval;
}

} // namespace mortcast
