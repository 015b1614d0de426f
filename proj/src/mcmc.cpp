#include "qarlab/mcmc.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qarlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double normal_logpdf(double x, double mean, double sd) {
    const double r = (x - mean) / sd;
    return -0.5 * r * r - std::log(sd) -
           0.5 * std::log(2.0 * std::numbers::pi);
}

int block_zdim(const ParamBlock& b) {
    return b.transform == Transform::Simplex ? b.zdim : 1;
}

int block_cdim(const ParamBlock& b) {
    return b.transform == Transform::Simplex ? b.zdim + 1 : 1;
}

} // namespace

int ParamSpec::unconstrained_dim() const {
    int d = 0;
    for (const auto& b : blocks) d += block_zdim(b);
    return d;
}

int ParamSpec::constrained_dim() const {
    int d = 0;
    for (const auto& b : blocks) d += block_cdim(b);
    return d;
}

std::vector<std::string> ParamSpec::names() const {
    std::vector<std::string> out;
    for (const auto& b : blocks) {
        if (b.transform == Transform::Simplex) {
            for (int i = 0; i < b.zdim + 1; ++i)
                out.push_back(b.name + std::to_string(i + 1));
        } else {
            out.push_back(b.name);
        }
    }
    return out;
}

Eigen::VectorXd ParamSpec::to_constrained(const Eigen::VectorXd& z) const {
    if (z.size() != unconstrained_dim())
        throw DomainError("unconstrained vector has wrong dimension");
    Eigen::VectorXd c(constrained_dim());
    int zi = 0, ci = 0;
    for (const auto& b : blocks) {
        switch (b.transform) {
            case Transform::Identity:
                c[ci++] = z[zi++];
                break;
            case Transform::Log:
                c[ci++] = std::exp(z[zi++]);
                break;
            case Transform::Logit:
                c[ci++] = b.lo + (b.hi - b.lo) * sigmoid(z[zi++]);
                break;
            case Transform::Simplex: {
                double denom = 1.0;
                for (int i = 0; i < b.zdim; ++i) denom += std::exp(z[zi + i]);
                for (int i = 0; i < b.zdim; ++i)
                    c[ci + i] = std::exp(z[zi + i]) / denom;
                c[ci + b.zdim] = 1.0 / denom;
                zi += b.zdim;
                ci += b.zdim + 1;
                break;
            }
        }
    }
    return c;
}

Eigen::VectorXd ParamSpec::to_unconstrained(const Eigen::VectorXd& c) const {
    if (c.size() != constrained_dim())
        throw DomainError("constrained vector has wrong dimension");
    Eigen::VectorXd z(unconstrained_dim());
    int zi = 0, ci = 0;
    for (const auto& b : blocks) {
        switch (b.transform) {
            case Transform::Identity:
                z[zi++] = c[ci++];
                break;
            case Transform::Log:
                if (!(c[ci] > 0.0)) throw DomainError(b.name + " must be positive");
                z[zi++] = std::log(c[ci++]);
                break;
            case Transform::Logit: {
                const double v = c[ci++];
                if (!(v > b.lo && v < b.hi))
                    throw DomainError(b.name + " outside its open interval");
                z[zi++] = std::log((v - b.lo) / (b.hi - v));
                break;
            }
            case Transform::Simplex: {
                const double ref = c[ci + b.zdim];
                if (!(ref > 0.0)) throw DomainError(b.name + " weights must be positive");
                for (int i = 0; i < b.zdim; ++i) {
                    if (!(c[ci + i] > 0.0))
                        throw DomainError(b.name + " weights must be positive");
                    z[zi + i] = std::log(c[ci + i] / ref);
                }
                zi += b.zdim;
                ci += b.zdim + 1;
                break;
            }
        }
    }
    return z;
}

double ParamSpec::log_prior(const Eigen::VectorXd& z) const {
    double lp = 0.0;
    int zi = 0;
    for (const auto& b : blocks) {
        switch (b.transform) {
            case Transform::Identity:
            case Transform::Log:
                if (b.prior == PriorKind::Normal)
                    lp += normal_logpdf(z[zi], b.prior_mean, b.prior_sd);
                ++zi;
                break;
            case Transform::Logit: {
                const double s = sigmoid(z[zi]);
                if (b.prior == PriorKind::Normal)
                    lp += normal_logpdf(z[zi], b.prior_mean, b.prior_sd);
                else if (b.prior == PriorKind::Uniform)
                    // flat density on (lo,hi) times the transform Jacobian
                    lp += std::log(s) + std::log1p(-s);
                ++zi;
                break;
            }
            case Transform::Simplex: {
                // flat Dirichlet plus the log-ratio Jacobian
                double denom = 1.0;
                for (int i = 0; i < b.zdim; ++i) denom += std::exp(z[zi + i]);
                double sum_log = -std::log(denom); // reference weight
                for (int i = 0; i < b.zdim; ++i)
                    sum_log += z[zi + i] - std::log(denom);
                lp += std::lgamma(b.zdim + 1.0) + sum_log;
                zi += b.zdim;
                break;
            }
        }
    }
    return lp;
}

double log_posterior(const Target& target, const Eigen::VectorXd& z) {
    if (!z.allFinite()) return kNegInf;
    double lp = target.spec.log_prior(z);
    if (!std::isfinite(lp)) return kNegInf;
    Eigen::VectorXd c;
    try {
        c = target.spec.to_constrained(z);
        if (target.extra_log_prior) lp += target.extra_log_prior(c);
        lp += target.log_lik(c);
    } catch (const NumericError&) {
        return kNegInf;
    } catch (const DomainError&) {
        return kNegInf;
    }
    return std::isfinite(lp) ? lp : kNegInf;
}

namespace {

// Running mean/covariance of the chain history for one block.
struct CovTracker {
    long n = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd m2;

    explicit CovTracker(int d)
        : mean(Eigen::VectorXd::Zero(d)), m2(Eigen::MatrixXd::Zero(d, d)) {}

    void update(const Eigen::VectorXd& x) {
        ++n;
        const Eigen::VectorXd delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean).transpose();
    }

    Eigen::MatrixXd cov() const {
        if (n < 2) return Eigen::MatrixXd::Zero(mean.size(), mean.size());
        return m2 / static_cast<double>(n - 1);
    }
};

} // namespace

PosteriorDraws run_chain(const Target& target, const ChainConfig& cfg) {
    if (cfg.iterations < 1 || cfg.burn_in < 0 || cfg.burn_in >= cfg.iterations)
        throw DomainError("chain config requires 0 <= burn_in < iterations");
    if (cfg.thin < 1) throw DomainError("thin must be >= 1");
    if (cfg.adapt_start < 1 || !(cfg.adapt_eps > 0.0) || !(cfg.init_step > 0.0))
        throw DomainError("invalid adaptation settings");

    const int d = target.spec.unconstrained_dim();
    std::vector<std::vector<int>> blocks = target.sample_blocks;
    if (blocks.empty()) {
        blocks.emplace_back(d);
        for (int i = 0; i < d; ++i) blocks[0][i] = i;
    }

    Eigen::VectorXd z = target.init.size() == d
                            ? target.init
                            : Eigen::VectorXd::Zero(d);
    double lp = log_posterior(target, z);

    PosteriorDraws out;
    out.names = target.spec.names();
    out.iterations = cfg.iterations;
    out.burn_in = cfg.burn_in;
    out.thin = cfg.thin;
    out.seed = cfg.seed;
    const int B = (cfg.iterations - cfg.burn_in) / cfg.thin;
    out.samples.resize(B, target.spec.constrained_dim());
    out.log_post.resize(B);
    if (!std::isfinite(lp))
        out.warnings.push_back("initial state has zero posterior density");

    Rng rng(cfg.seed);
    std::vector<CovTracker> trackers;
    std::vector<Eigen::MatrixXd> prop_chol(blocks.size());
    trackers.reserve(blocks.size());
    for (const auto& blk : blocks)
        trackers.emplace_back(static_cast<int>(blk.size()));

    long accepted = 0, proposed = 0;
    long adapted_accepted = 0, adapted_proposed = 0;
    long window_accepted = 0, window_proposed = 0;
    int row = 0;

    Eigen::VectorXd zprop(d);
    for (int it = 0; it < cfg.iterations; ++it) {
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const auto& blk = blocks[k];
            const int db = static_cast<int>(blk.size());
            const double scale = 2.38 * 2.38 / db;

            bool fixed_step = it < cfg.adapt_start || trackers[k].n < 2;
            if (!fixed_step) {
                Eigen::MatrixXd C = scale * trackers[k].cov();
                C.diagonal().array() += scale * cfg.adapt_eps;
                Eigen::LLT<Eigen::MatrixXd> llt(C);
                if (llt.info() == Eigen::Success)
                    prop_chol[k] = llt.matrixL();
                else
                    fixed_step = true;
            }

            zprop = z;
            if (fixed_step) {
                const double step = cfg.init_step / std::sqrt(db);
                for (int i = 0; i < db; ++i)
                    zprop[blk[i]] += step * rng.normal();
            } else {
                Eigen::VectorXd xi(db);
                for (int i = 0; i < db; ++i) xi[i] = rng.normal();
                const Eigen::VectorXd step = prop_chol[k] * xi;
                for (int i = 0; i < db; ++i) zprop[blk[i]] += step[i];
            }

            const double lp_prop = log_posterior(target, zprop);
            const double log_u = std::log(rng.uniform());
            ++proposed;
            ++window_proposed;
            const bool adapted = it >= cfg.adapt_start;
            if (adapted) ++adapted_proposed;
            // NaN difference (both states impossible) rejects.
            if (lp_prop - lp > log_u) {
                z = zprop;
                lp = lp_prop;
                ++accepted;
                ++window_accepted;
                if (adapted) ++adapted_accepted;
            }
        }

        for (std::size_t k = 0; k < blocks.size(); ++k) {
            const auto& blk = blocks[k];
            Eigen::VectorXd zb(blk.size());
            for (std::size_t i = 0; i < blk.size(); ++i) zb[i] = z[blk[i]];
            trackers[k].update(zb);
        }

        if ((it + 1) % 1000 == 0) {
            if (window_proposed > 0 &&
                window_accepted < 0.01 * window_proposed)
                out.warnings.push_back(
                    "acceptance below 1% in iterations " +
                    std::to_string(it - 999) + ".." + std::to_string(it));
            window_accepted = window_proposed = 0;
        }

        if (it >= cfg.burn_in && (it - cfg.burn_in + 1) % cfg.thin == 0 &&
            row < B) {
            out.samples.row(row) = target.spec.to_constrained(z).transpose();
            out.log_post[row] = lp;
            ++row;
        }
    }

    out.acceptance_rate =
        proposed > 0 ? static_cast<double>(accepted) / proposed : 0.0;
    out.adapted_acceptance_rate =
        adapted_proposed > 0
            ? static_cast<double>(adapted_accepted) / adapted_proposed
            : 0.0;
    out.proposal_cov.resize(blocks.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const int db = static_cast<int>(blocks[k].size());
        const double scale = 2.38 * 2.38 / db;
        Eigen::MatrixXd C = scale * trackers[k].cov();
        C.diagonal().array() += scale * cfg.adapt_eps;
        out.proposal_cov[k] = C;
    }
    return out;
}

std::vector<ParamSummary> summarize(const PosteriorDraws& draws,
                                    std::span<const double> levels) {
    if (draws.draw_count() < 2)
        throw DomainError("need at least two retained draws to summarize");
    std::vector<ParamSummary> out;
    out.reserve(draws.names.size());
    std::vector<double> col(draws.draw_count());
    for (std::size_t j = 0; j < draws.names.size(); ++j) {
        for (int i = 0; i < draws.draw_count(); ++i)
            col[i] = draws.samples(i, static_cast<Eigen::Index>(j));
        ParamSummary s;
        s.name = draws.names[j];
        s.mean = draws.samples.col(static_cast<Eigen::Index>(j)).mean();
        for (double level : levels) {
            const double alpha = (1.0 - level) / 2.0;
            s.intervals[level] = {empirical_quantile(col, alpha),
                                  empirical_quantile(col, 1.0 - alpha)};
        }
        out.push_back(std::move(s));
    }
    return out;
}

FunctionalSummary posterior_functionals(
    const std::function<QarModel(int)>& model_at, int n_draws,
    const FunctionalRequest& req) {
    if (n_draws < 1) throw DomainError("no draws supplied");
    if (req.tau_grid.empty()) throw DomainError("empty quantile grid");

    const int G = static_cast<int>(req.tau_grid.size());
    const int Y = static_cast<int>(req.y_grid.size());
    FunctionalSummary out;
    out.tau = req.tau_grid;
    out.y = req.y_grid;

    std::vector<Eigen::MatrixXd> theta_draws; // per j, draws x G
    Eigen::MatrixXd q_draws(n_draws, G);
    Eigen::MatrixXd f_draws(n_draws, Y);
    int used = 0;
    int p = -1;

    for (int b = 0; b < n_draws; ++b) {
        try {
            const QarModel m = model_at(b);
            if (p < 0) {
                p = m.order();
                theta_draws.assign(p + 1, Eigen::MatrixXd(n_draws, G));
            } else if (m.order() != p) {
                throw DomainError("inconsistent model order across draws");
            }
            const ThetaGrids tg = theta_curves(m, req.tau_grid);
            for (int j = 0; j <= p; ++j)
                for (int g = 0; g < G; ++g) theta_draws[j](used, g) = tg.theta[j][g];
            for (int g = 0; g < G; ++g)
                q_draws(used, g) =
                    conditional_quantile(m, req.tau_grid[g], req.lags);
            for (int i = 0; i < Y; ++i)
                f_draws(used, i) = conditional_density(m, req.y_grid[i], req.lags);
            ++used;
        } catch (const NumericError&) {
            ++out.draws_skipped;
        }
    }
    if (used == 0) throw NumericError("all draws failed in functional summary");
    out.draws_used = used;

    const double alpha = (1.0 - req.level) / 2.0;
    auto column_summary = [&](const Eigen::MatrixXd& mat, int cols) {
        CurveSummary cs;
        cs.mean.resize(cols);
        cs.lo.resize(cols);
        cs.hi.resize(cols);
        std::vector<double> col(used);
        for (int g = 0; g < cols; ++g) {
            for (int i = 0; i < used; ++i) col[i] = mat(i, g);
            cs.mean[g] = mat.col(g).head(used).mean();
            cs.lo[g] = empirical_quantile(col, alpha);
            cs.hi[g] = empirical_quantile(col, 1.0 - alpha);
        }
        return cs;
    };

    out.theta.reserve(p + 1);
    for (int j = 0; j <= p; ++j)
        out.theta.push_back(column_summary(theta_draws[j], G));
    out.quantile = column_summary(q_draws, G);
    if (Y > 0) out.density = column_summary(f_draws, Y);
    return out;
}

} // namespace qarlab
