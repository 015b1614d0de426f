#include "qarlab/spatial.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace qarlab {

StationSet StationSet::create(std::vector<std::string> ids,
                              std::vector<Coord> coords,
                              std::vector<double> elevation) {
    if (ids.empty() || ids.size() != coords.size())
        throw DomainError("station ids and coordinates must match and be nonempty");
    if (!elevation.empty() && elevation.size() != ids.size())
        throw DomainError("elevation column length mismatch");
    StationSet s;
    s.ids = std::move(ids);
    s.coords = std::move(coords);
    s.elevation = std::move(elevation);
    const int n = s.size();
    s.dist.resize(n, n);
    for (int i = 0; i < n; ++i) {
        s.dist(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double dx = s.coords[i].x - s.coords[j].x;
            const double dy = s.coords[i].y - s.coords[j].y;
            const double d = std::hypot(dx, dy);
            if (d == 0.0)
                throw DomainError("stations " + s.ids[i] + " and " + s.ids[j] +
                                  " share coordinates");
            s.dist(i, j) = s.dist(j, i) = d;
        }
    }
    return s;
}

QarModel SpatialQarModel::site_model(int i) const {
    const KumaraswamyParams eta1(std::exp(log_fields(0, i)),
                                 std::exp(log_fields(1, i)));
    const KumaraswamyParams eta2(std::exp(log_fields(2, i)),
                                 std::exp(log_fields(3, i)));
    return QarModel({MonotoneCurve(eta1), MonotoneCurve(eta2)});
}

Eigen::MatrixXd exp_corr_matrix(const StationSet& stations, double phi) {
    if (!(phi > 0.0)) throw DomainError("decay parameter must be positive");
    const int n = stations.size();
    Eigen::MatrixXd R(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            R(i, j) = std::exp(-phi * stations.dist(i, j));
    return R;
}

double phi_from_dmax(const StationSet& stations) {
    if (stations.size() < 2)
        throw DomainError("decay selection needs at least two stations");
    return 3.0 / stations.dist.maxCoeff();
}

double gp_field_logprior(const Eigen::VectorXd& field, const GpHyper& h,
                         const Eigen::LLT<Eigen::MatrixXd>& R_llt) {
    const Eigen::Index n = field.size();
    if (R_llt.matrixLLT().rows() != n)
        throw DomainError("field / correlation dimension mismatch");
    if (!(h.var > 0.0)) throw DomainError("GP variance must be positive");
    double log_det_R = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        log_det_R += 2.0 * std::log(R_llt.matrixLLT()(i, i));
    const Eigen::VectorXd resid =
        field - Eigen::VectorXd::Constant(n, h.mean);
    const Eigen::VectorXd w = R_llt.matrixL().solve(resid);
    return -0.5 * n * std::log(2.0 * std::numbers::pi) -
           0.5 * n * std::log(h.var) - 0.5 * log_det_R -
           0.5 * w.squaredNorm() / h.var;
}

double gp_field_logprior(const Eigen::VectorXd& field, const GpHyper& h,
                         const Eigen::MatrixXd& R) {
    Eigen::LLT<Eigen::MatrixXd> llt(R.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success)
        throw NumericError("GP correlation matrix is not positive definite");
    return gp_field_logprior(field, h, llt);
}

double spatial_log_likelihood(const SpatialQarModel& m,
                              const Eigen::MatrixXd& data,
                              const StationSet& stations,
                              const RootConfig& cfg) {
    const int n = stations.size();
    const int T = static_cast<int>(data.rows());
    if (data.cols() != n) throw DomainError("data columns must match stations");
    if (T < 2) throw DomainError("series too short");
    if (!(m.gamma > 0.0 && m.gamma < 1.0))
        throw DomainError("gamma must lie strictly inside (0,1)");

    // Copula correlation factorized once per evaluation.
    Eigen::MatrixXd Rc = m.gamma * exp_corr_matrix(stations, m.copula_phi);
    Rc.diagonal().array() += 1.0 - m.gamma;
    const CopulaCorrelation cop(Rc);

    std::vector<QarModel> site_models;
    site_models.reserve(n);
    for (int i = 0; i < n; ++i) site_models.push_back(m.site_model(i));

    Eigen::VectorXd q(n);
    double ll = 0.0;
    for (int t = 1; t < T; ++t) {
        for (int i = 0; i < n; ++i) {
            const double lag[] = {data(t - 1, i)};
            try {
                const double u = inverse_tau(site_models[i], data(t, i), lag, cfg);
                const double d = conditional_density(site_models[i], data(t, i),
                                                     lag, cfg);
                ll += std::log(d);
                q[i] = normal_quantile(u);
            } catch (const std::exception& e) {
                throw NumericError("site " + stations.ids[i] + ", t=" +
                                   std::to_string(t + 1) + ": " + e.what());
            }
        }
        ll += cop.logdensity_q(q);
    }
    return ll;
}

KrigeResult krige_field(const Eigen::VectorXd& field, const GpHyper& h,
                        const StationSet& observed,
                        std::span<const Coord> new_sites, Rng& rng) {
    const int n = observed.size();
    const int p = static_cast<int>(new_sites.size());
    if (field.size() != n) throw DomainError("field / station dimension mismatch");
    if (p == 0) throw DomainError("no prediction sites supplied");
    if (!(h.var > 0.0) || !(h.decay > 0.0))
        throw DomainError("invalid GP hyperparameters");

    const Eigen::MatrixXd R = exp_corr_matrix(observed, h.decay);
    Eigen::LLT<Eigen::MatrixXd> llt(R.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success)
        throw NumericError("observed-site correlation is not positive definite");

    Eigen::MatrixXd Rstar(n, p);   // observed x new
    Eigen::MatrixXd Rnew(p, p);    // new x new
    for (int j = 0; j < p; ++j) {
        for (int i = 0; i < n; ++i) {
            const double d = std::hypot(observed.coords[i].x - new_sites[j].x,
                                        observed.coords[i].y - new_sites[j].y);
            Rstar(i, j) = std::exp(-h.decay * d);
        }
        Rnew(j, j) = 1.0;
        for (int k = j + 1; k < p; ++k) {
            const double d = std::hypot(new_sites[j].x - new_sites[k].x,
                                        new_sites[j].y - new_sites[k].y);
            Rnew(j, k) = Rnew(k, j) = std::exp(-h.decay * d);
        }
    }

    const Eigen::VectorXd resid = field - Eigen::VectorXd::Constant(n, h.mean);
    const Eigen::MatrixXd RinvRstar = llt.solve(Rstar);

    KrigeResult out;
    out.mean = Eigen::VectorXd::Constant(p, h.mean) +
               RinvRstar.transpose() * resid;
    out.cov = h.var * (Rnew - Rstar.transpose() * RinvRstar);

    // The conditional covariance is only positive semidefinite (it is
    // exactly singular at observed sites), so sample through an
    // eigendecomposition with small negatives clamped to zero.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        out.cov.selfadjointView<Eigen::Lower>());
    if (eig.info() != Eigen::Success)
        throw NumericError("kriging covariance eigendecomposition failed");
    Eigen::VectorXd z(p);
    for (int j = 0; j < p; ++j) z[j] = rng.normal();
    Eigen::VectorXd scale = eig.eigenvalues();
    for (int j = 0; j < p; ++j) scale[j] = scale[j] > 0.0 ? std::sqrt(scale[j]) : 0.0;
    out.sample = out.mean + eig.eigenvectors() * scale.asDiagonal() * z;
    return out;
}

SurfaceResult predict_quantile_surface(
    const std::function<SpatialQarModel(int)>& model_at, int n_draws,
    const StationSet& observed, const SurfaceRequest& req, std::uint64_t seed) {
    if (n_draws < 1) throw DomainError("no posterior draws supplied");
    if (req.sites.empty() || req.tau_list.empty())
        throw DomainError("prediction request needs sites and quantile levels");
    if (!(req.cond_y >= 0.0 && req.cond_y <= 1.0))
        throw DomainError("conditioning value must lie in [0,1]");

    const int p = static_cast<int>(req.sites.size());
    const int G = static_cast<int>(req.tau_list.size());
    SurfaceResult out;
    out.q_mean = Eigen::MatrixXd::Zero(p, G);

    Rng rng(seed);
    const double lag[] = {req.cond_y};
    for (int b = 0; b < n_draws; ++b) {
        try {
            const SpatialQarModel m = model_at(b);
            // Krige the four fields independently, then evaluate per site.
            std::array<Eigen::VectorXd, 4> fields;
            for (int f = 0; f < 4; ++f)
                fields[f] = krige_field(m.log_fields.row(f).transpose(),
                                        m.hypers[f], observed, req.sites, rng)
                                .sample;
            for (int j = 0; j < p; ++j) {
                const QarModel site(
                    {MonotoneCurve(KumaraswamyParams(std::exp(fields[0][j]),
                                                     std::exp(fields[1][j]))),
                     MonotoneCurve(KumaraswamyParams(std::exp(fields[2][j]),
                                                     std::exp(fields[3][j])))});
                for (int g = 0; g < G; ++g)
                    out.q_mean(j, g) +=
                        conditional_quantile(site, req.tau_list[g], lag);
            }
            ++out.draws_used;
        } catch (const NumericError&) {
            ++out.draws_skipped;
        }
    }
    if (out.draws_used == 0)
        throw NumericError("all posterior draws failed during prediction");
    out.q_mean /= static_cast<double>(out.draws_used);
    return out;
}

} // namespace qarlab
