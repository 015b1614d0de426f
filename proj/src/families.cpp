#include "qarlab/families.hpp"

#include <cmath>
#include <memory>

namespace qarlab {

namespace {

double qar_sigma_ab(int p, int K, const QarPriorConfig& priors) {
    if (priors.sigma_ab > 0.0) return priors.sigma_ab;
    return (p == 1 && K == 1) ? 3.0 : 1.5;
}

// Curve blocks for eta_j, named with the given prefix.
void append_curve_blocks(std::vector<ParamBlock>& blocks,
                         const std::string& prefix, int K, double sigma_ab,
                         double lambda_hi) {
    if (K < 1 || K > 2)
        throw DomainError("fitted curves support K = 1 or 2 components");
    for (int k = 1; k <= K; ++k) {
        const std::string suffix = K == 1 ? "" : std::to_string(k);
        blocks.push_back({prefix + ".a" + suffix, Transform::Log,
                          PriorKind::Normal, 0, 1, 0.0, sigma_ab});
        blocks.push_back({prefix + ".b" + suffix, Transform::Log,
                          PriorKind::Normal, 0, 1, 0.0, sigma_ab});
    }
    if (K == 2)
        blocks.push_back({prefix + ".lambda1", Transform::Logit,
                          PriorKind::Uniform, 0.0, lambda_hi});
}

MonotoneCurve curve_from(const Eigen::VectorXd& c, int& ci, int K) {
    if (K == 1) {
        const KumaraswamyParams kp(c[ci], c[ci + 1]);
        ci += 2;
        return MonotoneCurve(kp);
    }
    const KumaraswamyParams k1(c[ci], c[ci + 1]);
    const KumaraswamyParams k2(c[ci + 2], c[ci + 3]);
    const double lambda1 = c[ci + 4];
    ci += 5;
    return MonotoneCurve({k1, k2}, {lambda1, 1.0 - lambda1});
}

ParamSpec qar_spec(int p, int K, const QarPriorConfig& priors) {
    if (p < 1) throw DomainError("model order must be at least 1");
    ParamSpec spec;
    const double sd = qar_sigma_ab(p, K, priors);
    for (int j = 1; j <= p + 1; ++j)
        append_curve_blocks(spec.blocks, "eta" + std::to_string(j), K, sd,
                            priors.lambda_hi);
    if (p >= 2) {
        ParamBlock pi;
        pi.name = "pi";
        pi.transform = Transform::Simplex;
        pi.zdim = p - 1;
        spec.blocks.push_back(pi);
    }
    return spec;
}

} // namespace

QarModel qar_model_from_row(int p, int K, const Eigen::VectorXd& c) {
    int ci = 0;
    std::vector<MonotoneCurve> curves;
    curves.reserve(p + 1);
    for (int j = 0; j <= p; ++j) curves.push_back(curve_from(c, ci, K));
    std::vector<double> pi;
    if (p >= 2) {
        pi.assign(p, 0.0);
        double sum = 0.0;
        for (int j = 0; j < p; ++j) sum += (pi[j] = c[ci + j]);
        // guard against drift in serialized draws
        for (double& w : pi) w /= sum;
    }
    return QarModel(std::move(curves), std::move(pi));
}

Target make_qar_target(int p, int K, std::vector<double> unit_data,
                       const QarPriorConfig& priors) {
    Target t;
    t.spec = qar_spec(p, K, priors);
    auto data = std::make_shared<std::vector<double>>(std::move(unit_data));
    t.log_lik = [p, K, data](const Eigen::VectorXd& c) {
        return log_likelihood(qar_model_from_row(p, K, c), *data);
    };
    return t;
}

Kx2006Model kx_model_from_row(const Eigen::VectorXd& c) {
    return Kx2006Model(c[0], c[1], c[2], c[3]);
}

Target make_kx2006_target(std::vector<double> raw_data,
                          const KxPriorConfig& priors) {
    Target t;
    t.spec.blocks = {
        {"mu", Transform::Identity, PriorKind::Normal, 0, 1, 0.0, priors.mu_sd},
        {"sigma", Transform::Log, PriorKind::Normal, 0, 1, 0.0,
         priors.log_sigma_sd},
        {"gamma0", Transform::Logit, PriorKind::Uniform, 0.0, 1.0},
        {"gamma1", Transform::Log, PriorKind::Normal, 0, 1, 0.0,
         priors.log_gamma1_sd},
    };
    // Zero-initialization sits at zero likelihood for data away from the
    // origin, so start from data-scale values instead.
    std::vector<double> sorted = raw_data;
    const double med = empirical_quantile(sorted, 0.5);
    double sq = 0.0, mean = 0.0;
    for (double v : raw_data) mean += v;
    mean /= static_cast<double>(raw_data.size());
    for (double v : raw_data) sq += (v - mean) * (v - mean);
    const double sd =
        std::max(std::sqrt(sq / std::max<std::size_t>(1, raw_data.size() - 1)),
                 1e-3 * (1.0 + std::abs(med)));
    Eigen::VectorXd c0(4);
    c0 << med, sd, 0.05, 0.1;
    t.init = t.spec.to_unconstrained(c0);

    auto data = std::make_shared<std::vector<double>>(std::move(raw_data));
    t.log_lik = [data](const Eigen::VectorXd& c) {
        return kx2006_log_likelihood(kx_model_from_row(c), *data);
    };
    return t;
}

BivariateQarModel mqar_model_from_row(int K, const Eigen::VectorXd& c) {
    int ci = 0;
    MonotoneCurve m1 = curve_from(c, ci, K);
    MonotoneCurve m2 = curve_from(c, ci, K);
    MonotoneCurve n1 = curve_from(c, ci, K);
    MonotoneCurve n2 = curve_from(c, ci, K);
    const double rho = c[ci];
    return BivariateQarModel(QarModel({m1, m2}), QarModel({n1, n2}), rho);
}

Target make_mqar_target(int K, std::vector<double> unit_max,
                        std::vector<double> unit_min,
                        const QarPriorConfig& priors) {
    Target t;
    const double sd = priors.sigma_ab > 0.0 ? priors.sigma_ab
                                            : (K == 1 ? 3.0 : 1.5);
    for (const char* series : {"s1", "s2"})
        for (int j = 1; j <= 2; ++j)
            append_curve_blocks(t.spec.blocks,
                                std::string(series) + ".eta" + std::to_string(j),
                                K, sd, priors.lambda_hi);
    t.spec.blocks.push_back(
        {"rho", Transform::Logit, PriorKind::Uniform, -1.0, 1.0});

    auto dmax = std::make_shared<std::vector<double>>(std::move(unit_max));
    auto dmin = std::make_shared<std::vector<double>>(std::move(unit_min));
    t.log_lik = [K, dmax, dmin](const Eigen::VectorXd& c) {
        return mqar_log_likelihood(mqar_model_from_row(K, c), *dmax, *dmin);
    };
    return t;
}

SpatialQarModel spatial_model_from_row(int n_sites, double field_phi,
                                       double copula_phi,
                                       const Eigen::VectorXd& c) {
    SpatialQarModel m;
    m.log_fields.resize(4, n_sites);
    for (int f = 0; f < 4; ++f)
        for (int i = 0; i < n_sites; ++i) m.log_fields(f, i) = c[f * n_sites + i];
    const int h0 = 4 * n_sites;
    for (int f = 0; f < 4; ++f)
        m.hypers[f] = GpHyper{c[h0 + 2 * f], c[h0 + 2 * f + 1], field_phi};
    m.gamma = c[h0 + 8];
    m.copula_phi = copula_phi;
    return m;
}

Target make_spatial_target(Eigen::MatrixXd unit_data, StationSet stations,
                           double field_phi, double copula_phi,
                           const SpatialPriorConfig& priors,
                           bool grouped_blocks) {
    const int n = stations.size();
    if (unit_data.cols() != n)
        throw DomainError("data columns must match the station set");

    Target t;
    static const char* field_names[4] = {"loga1", "logb1", "loga2", "logb2"};
    static const char* hyper_names[4] = {"a1", "b1", "a2", "b2"};
    for (int f = 0; f < 4; ++f)
        for (int i = 0; i < n; ++i)
            t.spec.blocks.push_back({std::string(field_names[f]) + "." +
                                         stations.ids[i],
                                     Transform::Identity, PriorKind::None});
    for (int f = 0; f < 4; ++f) {
        t.spec.blocks.push_back({std::string(hyper_names[f]) + ".mean",
                                 Transform::Identity, PriorKind::Normal, 0, 1,
                                 0.0, priors.hyper_sd});
        t.spec.blocks.push_back({std::string(hyper_names[f]) + ".var",
                                 Transform::Log, PriorKind::Normal, 0, 1, 0.0,
                                 priors.hyper_sd});
    }
    t.spec.blocks.push_back(
        {"gamma", Transform::Logit, PriorKind::Uniform, 0.0, 1.0});

    if (grouped_blocks) {
        for (int f = 0; f < 4; ++f) {
            std::vector<int> blk(n);
            for (int i = 0; i < n; ++i) blk[i] = f * n + i;
            t.sample_blocks.push_back(std::move(blk));
        }
        std::vector<int> tail(9);
        for (int i = 0; i < 9; ++i) tail[i] = 4 * n + i;
        t.sample_blocks.push_back(std::move(tail));
    }

    auto data = std::make_shared<Eigen::MatrixXd>(std::move(unit_data));
    auto st = std::make_shared<StationSet>(std::move(stations));
    auto field_llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>();
    {
        Eigen::MatrixXd R = exp_corr_matrix(*st, field_phi);
        field_llt->compute(R.selfadjointView<Eigen::Lower>());
        if (field_llt->info() != Eigen::Success)
            throw NumericError("field correlation matrix is not positive definite");
    }

    t.log_lik = [n, field_phi, copula_phi, data, st](const Eigen::VectorXd& c) {
        return spatial_log_likelihood(
            spatial_model_from_row(n, field_phi, copula_phi, c), *data, *st);
    };
    t.extra_log_prior = [n, field_phi, copula_phi,
                         field_llt](const Eigen::VectorXd& c) {
        const SpatialQarModel m =
            spatial_model_from_row(n, field_phi, copula_phi, c);
        double lp = 0.0;
        for (int f = 0; f < 4; ++f)
            lp += gp_field_logprior(m.log_fields.row(f).transpose(), m.hypers[f],
                                    *field_llt);
        return lp;
    };
    return t;
}

} // namespace qarlab
