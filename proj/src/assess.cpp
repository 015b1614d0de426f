#include "qarlab/assess.hpp"

#include <algorithm>
#include <cmath>

namespace qarlab {

TauGrid TauGrid::standard() {
    TauGrid g;
    g.values.reserve(99);
    for (int i = 1; i <= 99; ++i) g.values.push_back(i / 100.0);
    return g;
}

TauGrid TauGrid::make(std::vector<double> values) {
    if (values.empty()) throw DomainError("quantile grid must be nonempty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0 && values[i] < 1.0))
            throw DomainError("quantile grid values must lie strictly inside (0,1)");
        if (i > 0 && !(values[i] > values[i - 1]))
            throw DomainError("quantile grid must be strictly increasing");
    }
    return TauGrid{std::move(values)};
}

double check_loss(double u, double tau) {
    return u * (tau - (u < 0.0 ? 1.0 : 0.0));
}

double empirical_quantile(std::span<const double> y, double tau) {
    if (y.empty()) throw DomainError("empirical quantile of an empty series");
    if (!(tau >= 0.0 && tau <= 1.0))
        throw DomainError("quantile level must lie in [0,1]");
    std::vector<double> s(y.begin(), y.end());
    std::sort(s.begin(), s.end());
    const double h = (s.size() - 1) * tau;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= s.size()) return s.back();
    return s[lo] + (h - lo) * (s[lo + 1] - s[lo]);
}

double p_tilde(std::span<const double> p_profile, int T, const TauGrid& grid,
               double v) {
    if (static_cast<int>(p_profile.size()) != grid.size())
        throw DomainError("profile length must match the quantile grid");
    if (T < 2) throw DomainError("need T >= 2");
    if (!(v >= 1.0)) throw DomainError("exponent v must be at least 1");
    double acc = 0.0;
    for (int g = 0; g < grid.size(); ++g) {
        const double tau = grid.values[g];
        const double sd = std::sqrt(tau * (1.0 - tau) / (T - 1));
        acc += std::pow(std::abs((p_profile[g] - tau) / sd), v);
    }
    return std::pow(acc / grid.size(), 1.0 / v);
}

R1Result r1_bar(const Eigen::MatrixXd& mean_quantiles,
                std::span<const double> y, const TauGrid& grid) {
    const int T = static_cast<int>(y.size());
    const int G = grid.size();
    if (mean_quantiles.rows() != T - 1 || mean_quantiles.cols() != G)
        throw DomainError("mean-quantile matrix must be (T-1) x |grid|");

    R1Result out;
    out.delta_profile.resize(G);
    out.omega.resize(G);
    double acc = 0.0;
    for (int g = 0; g < G; ++g) {
        const double tau = grid.values[g];
        const double q_emp = empirical_quantile(y, tau);
        double delta = 0.0, denom = 0.0;
        for (int t = 1; t < T; ++t) {
            delta += check_loss(y[t] - mean_quantiles(t - 1, g), tau);
            denom += check_loss(y[t] - q_emp, tau);
        }
        delta /= (T - 1);
        denom /= (T - 1);
        if (!(denom > 0.0))
            throw NumericError("empirical check loss vanished; the weight "
                               "function is undefined for constant data");
        out.delta_profile[g] = delta;
        out.omega[g] = 1.0 / denom;
        acc += out.omega[g] * delta;
    }
    out.delta_tilde = acc / G;
    out.r1_bar = 1.0 - out.delta_tilde;
    return out;
}

MetricsReport compute_metrics(
    const std::function<Eigen::MatrixXd(int)>& theta_at, int n_draws,
    std::span<const double> y, const TauGrid& grid,
    std::span<const double> v_list) {
    const int T = static_cast<int>(y.size());
    const int G = grid.size();
    if (T < 2) throw DomainError("need T >= 2");
    if (n_draws < 1) throw DomainError("need at least one posterior draw");

    Eigen::MatrixXd indicator_sum, quantile_sum;
    int p = -1, rows = 0;

    for (int b = 0; b < n_draws; ++b) {
        const Eigen::MatrixXd theta = theta_at(b);
        if (theta.cols() != G || theta.rows() < 2)
            throw DomainError("theta grid must be (p+1) x |grid|");
        if (p < 0) {
            p = static_cast<int>(theta.rows()) - 1;
            if (T < p + 2) throw DomainError("series too short for the model order");
            rows = T - p; // scored times t = p+1 .. T
            indicator_sum = Eigen::MatrixXd::Zero(rows, G);
            quantile_sum = Eigen::MatrixXd::Zero(rows, G);
        } else if (theta.rows() != p + 1) {
            throw DomainError("inconsistent model order across draws");
        }
        for (int r = 0; r < rows; ++r) {
            const int t = p + r;
            for (int g = 0; g < G; ++g) {
                double q = theta(0, g);
                for (int j = 1; j <= p; ++j) q += theta(j, g) * y[t - j];
                quantile_sum(r, g) += q;
                if (y[t] < q) indicator_sum(r, g) += 1.0;
            }
        }
    }

    MetricsReport report;
    report.draws_used = n_draws;
    report.p_profile.resize(G);
    for (int g = 0; g < G; ++g) {
        double acc = 0.0;
        for (int r = 0; r < rows; ++r) acc += indicator_sum(r, g);
        report.p_profile[g] = acc / (static_cast<double>(n_draws) * rows);
    }

    for (double v : v_list)
        report.p_tilde[v] = p_tilde(report.p_profile, rows + 1, grid, v);

    // Check-loss metrics over the same scored window.
    const std::vector<double> window(y.begin() + (p - 1), y.end());
    const Eigen::MatrixXd mean_q = quantile_sum / static_cast<double>(n_draws);
    const R1Result r1 = r1_bar(mean_q, window, grid);
    report.delta_profile = r1.delta_profile;
    report.omega = r1.omega;
    report.delta_tilde = r1.delta_tilde;
    report.r1_bar = r1.r1_bar;
    return report;
}

} // namespace qarlab
