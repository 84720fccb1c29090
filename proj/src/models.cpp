#include "pathsplit/models.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace pathsplit {

CommutativityReport commutativity_check(const SdeModel& model,
                                        const std::vector<Eigen::VectorXd>& sample_points,
                                        double tol) {
    CommutativityReport rep;
    rep.tolerance = tol;
    const int d = model.dim_noise;
    for (const Eigen::VectorXd& y : sample_points) {
        if (model.in_domain && !model.in_domain(y))
            throw std::domain_error("commutativity_check: point outside model domain");
        for (int i = 0; i < d; ++i) {
            for (int j = i + 1; j < d; ++j) {
                const Eigen::VectorXd gi = model.diffusion_col(y, i);
                const Eigen::VectorXd gj = model.diffusion_col(y, j);
                const double eps = 1e-6 * (1.0 + y.norm());
                // Central-difference Jacobian-vector products g_i'(y) g_j(y).
                const Eigen::VectorXd gi_dgj =
                    (model.diffusion_col(y + eps * gj, i) - model.diffusion_col(y - eps * gj, i))
                    / (2.0 * eps);
                const Eigen::VectorXd gj_dgi =
                    (model.diffusion_col(y + eps * gi, j) - model.diffusion_col(y - eps * gi, j))
                    / (2.0 * eps);
                rep.max_violation = std::max(rep.max_violation, (gi_dgj - gj_dgi).norm());
            }
        }
    }
    rep.passed = rep.max_violation <= tol;
    return rep;
}

SdeModel cir_model(const CirParams& p) {
    p.validate();
    SdeModel m;
    m.name = "cir";
    m.dim_state = 1;
    m.dim_noise = 1;
    m.commutative = true; // scalar noise
    m.additive = false;
    m.drift = [p](const Eigen::VectorXd& y) {
        return Eigen::VectorXd::Constant(1, p.a * (p.b_tilde() - y[0]));
    };
    m.ito_drift = [p](const Eigen::VectorXd& y) {
        return Eigen::VectorXd::Constant(1, p.a * (p.b - y[0]));
    };
    m.diffusion_col = [p](const Eigen::VectorXd& y, int) {
        return Eigen::VectorXd::Constant(1, p.sigma * std::sqrt(std::max(y[0], 0.0)));
    };
    m.exact_drift_flow = [p](const Eigen::VectorXd& y, double t) {
        return Eigen::VectorXd::Constant(1, cir_drift_flow(p, y[0], t));
    };
    m.exact_diffusion_flow = [p](const Eigen::VectorXd& y, int, double amount) {
        return Eigen::VectorXd::Constant(1, cir_diffusion_flow(p, y[0], amount));
    };
    // (g g')(y) = sigma^2 / 2, the Milstein correction field for sqrt noise.
    m.milstein_correction = [p](const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(1, 0.5 * p.sigma * p.sigma);
    };
    m.in_domain = [](const Eigen::VectorXd& y) { return y[0] >= 0.0; };
    return m;
}

Eigen::Matrix2d fhn_linear_exponential(const FhnParams& p, double t) {
    Eigen::Matrix2d m;
    m << 0.0, -1.0 / p.epsilon, p.gamma, -1.0;
    const double alpha = 0.5 * m.trace();
    const Eigen::Matrix2d b = m - alpha * Eigen::Matrix2d::Identity();
    // b is trace-free, so b^2 = -det(b) I; det(b) = -disc/4 of the eigenvalue
    // problem. disc > 0 gives the hyperbolic branch, disc < 0 the rotational
    // one, and near zero the defective limit (I + t b) e^{alpha t}.
    const double det_b = b.determinant();
    const double scale = std::max({alpha * alpha, std::abs(m.determinant()), 1e-300});
    const double ea = std::exp(alpha * t);
    if (std::abs(det_b) <= 1e-12 * scale) {
        return ea * (Eigen::Matrix2d::Identity() + t * b);
    }
    if (det_b < 0.0) {
        const double theta = std::sqrt(-det_b);
        return ea * (std::cosh(theta * t) * Eigen::Matrix2d::Identity()
                     + std::sinh(theta * t) / theta * b);
    }
    const double omega = std::sqrt(det_b);
    return ea * (std::cos(omega * t) * Eigen::Matrix2d::Identity()
                 + std::sin(omega * t) / omega * b);
}

Eigen::Vector2d fhn_phi_strang_half(const FhnParams& p, const Eigen::Vector2d& vu, double h) {
    const double quarter = 0.25 * h;
    Eigen::Vector2d z(fhn_cubic_flow(vu[0], quarter, p.epsilon), vu[1] + 0.25 * p.beta * h);
    z = (fhn_linear_exponential(p, 0.5 * h) * z).eval();
    return Eigen::Vector2d(fhn_cubic_flow(z[0], quarter, p.epsilon), z[1] + 0.25 * p.beta * h);
}

SdeModel fhn_model(const FhnParams& p) {
    p.validate();
    SdeModel m;
    m.name = "fhn";
    m.dim_state = 2;
    m.dim_noise = 2;
    m.commutative = true;
    m.additive = true;
    m.drift = [p](const Eigen::VectorXd& y) {
        Eigen::VectorXd out(2);
        out[0] = (y[0] - y[0] * y[0] * y[0] - y[1]) / p.epsilon;
        out[1] = p.gamma * y[0] - y[1] + p.beta;
        return out;
    };
    m.ito_drift = m.drift;
    m.diffusion_col = [p](const Eigen::VectorXd&, int i) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(2);
        out[i] = i == 0 ? p.sigma1 : p.sigma2;
        return out;
    };
    m.exact_diffusion_flow = [p](const Eigen::VectorXd& y, int i, double amount) {
        Eigen::VectorXd out = y;
        out[i] += (i == 0 ? p.sigma1 : p.sigma2) * amount;
        return out;
    };
    return m;
}

SdeModel uld_model(const UldParams& p, int d) {
    p.validate();
    SdeModel m;
    m.name = "uld";
    m.dim_state = 2 * d;
    m.dim_noise = d;
    m.commutative = true;
    m.additive = true;
    const double noise_scale = std::sqrt(2.0 * p.gamma_friction * p.u);
    m.drift = [p, d](const Eigen::VectorXd& y) {
        Eigen::VectorXd out(2 * d);
        const Eigen::VectorXd x = y.head(d);
        const Eigen::VectorXd v = y.tail(d);
        out.head(d) = v;
        out.tail(d) = -p.gamma_friction * v - p.u * p.potential_grad(x);
        return out;
    };
    m.ito_drift = m.drift;
    m.diffusion_col = [noise_scale, d](const Eigen::VectorXd&, int i) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * d);
        out[d + i] = noise_scale;
        return out;
    };
    m.exact_diffusion_flow = [noise_scale, d](const Eigen::VectorXd& y, int i, double amount) {
        Eigen::VectorXd out = y;
        out[d + i] += noise_scale * amount;
        return out;
    };
    return m;
}

UldParams uld_quadratic_params(double u, double gamma_friction) {
    UldParams p;
    p.u = u;
    p.gamma_friction = gamma_friction;
    p.potential_grad = [](const Eigen::VectorXd& x) { return x; };
    return p;
}

double logistic_value(const LogisticPotential& pot, const Eigen::VectorXd& theta) {
    double f = pot.delta * theta.squaredNorm();
    const Eigen::VectorXd margins = pot.features * theta;
    for (Eigen::Index i = 0; i < pot.labels.size(); ++i) {
        const double z = -pot.labels[i] * margins[i];
        // log(1 + e^z) without overflow.
        f += z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    }
    return f;
}

Eigen::VectorXd logistic_grad(const LogisticPotential& pot, const Eigen::VectorXd& theta) {
    Eigen::VectorXd g = 2.0 * pot.delta * theta;
    const Eigen::VectorXd margins = pot.features * theta;
    for (Eigen::Index i = 0; i < pot.labels.size(); ++i) {
        const double z = pot.labels[i] * margins[i];
        // sigmoid(-z) = 1 / (1 + e^z), evaluated without overflow.
        const double s = z > 0.0 ? std::exp(-z) / (1.0 + std::exp(-z))
                                 : 1.0 / (1.0 + std::exp(z));
        g -= pot.labels[i] * s * pot.features.row(i).transpose();
    }
    return g;
}

LogisticPotential load_dataset(const std::string& csv_path, double delta) {
    std::ifstream in(csv_path);
    if (!in) throw ParseError("load_dataset: cannot open " + csv_path, 0);
    std::vector<double> labels;
    std::vector<std::vector<double>> rows;
    std::string line;
    long row_index = 0;
    while (std::getline(in, line)) {
        ++row_index;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(cell, &pos);
                if (pos != cell.find_last_not_of(" \t\r") + 1 && pos < cell.size())
                    throw std::invalid_argument(cell);
                values.push_back(v);
            } catch (const std::exception&) {
                throw ParseError("load_dataset: non-numeric cell '" + cell + "' in row "
                                     + std::to_string(row_index),
                                 row_index);
            }
        }
        if (values.size() < 2)
            throw ParseError("load_dataset: row " + std::to_string(row_index)
                                 + " needs a label and at least one feature",
                             row_index);
        if (values[0] != 1.0 && values[0] != -1.0)
            throw ParseError("load_dataset: label outside {-1,+1} in row "
                                 + std::to_string(row_index),
                             row_index);
        if (!rows.empty() && values.size() != rows.front().size() + 1)
            throw ParseError("load_dataset: ragged row " + std::to_string(row_index), row_index);
        labels.push_back(values[0]);
        rows.emplace_back(values.begin() + 1, values.end());
    }
    LogisticPotential pot;
    pot.delta = delta;
    const int m = static_cast<int>(rows.size());
    const int d = m > 0 ? static_cast<int>(rows.front().size()) : 0;
    pot.features.resize(m, d);
    pot.labels.resize(m);
    for (int i = 0; i < m; ++i) {
        pot.labels[i] = labels[i];
        for (int j = 0; j < d; ++j) pot.features(i, j) = rows[i][j];
    }
    return pot;
}

SdeModel make_additive_model(std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift,
                             Eigen::MatrixXd sigma, std::string name) {
    SdeModel m;
    m.name = std::move(name);
    m.dim_state = static_cast<int>(sigma.rows());
    m.dim_noise = static_cast<int>(sigma.cols());
    m.commutative = true;
    m.additive = true;
    m.drift = std::move(drift);
    m.ito_drift = m.drift;
    auto sig = std::make_shared<Eigen::MatrixXd>(std::move(sigma));
    m.diffusion_col = [sig](const Eigen::VectorXd&, int i) {
        return Eigen::VectorXd(sig->col(i));
    };
    m.exact_diffusion_flow = [sig](const Eigen::VectorXd& y, int i, double amount) {
        return Eigen::VectorXd(y + amount * sig->col(i));
    };
    return m;
}

SdeModel make_oscillator_model() {
    return make_additive_model(
        [](const Eigen::VectorXd& y) {
            return Eigen::VectorXd::Constant(1, std::sin(y[0]));
        },
        Eigen::MatrixXd::Identity(1, 1), "oscillator");
}

} // namespace pathsplit
