#include "cavcool/dynamics.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cavcool/io.hpp"

namespace cavcool {

Eigen::MatrixXd generator_from_rates(const Eigen::MatrixXd& r) {
    if (r.rows() != r.cols()) throw NonGenerator("rate matrix must be square");
    const Eigen::Index n = r.rows();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double out = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            if (r(i, j) < 0.0) throw NonGenerator("negative rate");
            m(j, i) = r(i, j);
            out += r(i, j);
        }
        m(i, i) = -out;
    }
    return m;
}

Eigen::MatrixXd generator(const RateTable& t) {
    const auto n = static_cast<Eigen::Index>(t.n);
    Eigen::MatrixXd r(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            r(i, j) = t.total(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    return generator_from_rates(r);
}

void check_generator(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw NonGenerator("generator must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
        for (Eigen::Index j = 0; j < m.rows(); ++j)
            if (i != j && m(j, i) < 0.0) throw NonGenerator("negative off-diagonal rate");
        if (std::abs(m.col(i).sum()) > 1e-9 * scale)
            throw NonGenerator("generator column " + std::to_string(i) + " does not sum to zero");
    }
}

void sanitize(std::vector<double>& p) {
    double sum = 0.0;
    for (double& x : p) {
        if (x < -1e-12) throw NegativePopulation("population " + format_double(x) + " below -1e-12");
        if (x < 0.0) x = 0.0;
        sum += x;
    }
    if (!(sum > 0.0)) throw NegativePopulation("population vector vanished");
    for (double& x : p) x /= sum;
}

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(const std::vector<double>& p) {
    return {p.data(), static_cast<Eigen::Index>(p.size())};
}

}  // namespace

PopulationVector propagate_step(const PopulationVector& p, const Eigen::MatrixXd& m, double dt) {
    if (!(dt > 0.0)) throw Error("propagation step must have dt > 0");
    if (static_cast<std::size_t>(m.rows()) != p.p.size()) throw Error("generator and population sizes differ");
    check_generator(m);
    Propagator prop(m, dt);
    PopulationVector out = p;
    prop.apply(out);
    return out;
}

PopulationVector propagate_step(const PopulationVector& p, const RateTable& rates, double dt) {
    return propagate_step(p, generator(rates), dt);
}

Propagator::Propagator(const Eigen::MatrixXd& m, double dt) : dt_(dt) {
    if (!(dt > 0.0)) throw Error("propagation step must have dt > 0");
    exp_ = (m * dt).exp();
}

void Propagator::apply(std::vector<double>& p) const {
    Eigen::VectorXd next = exp_ * as_vector(p);
    std::copy(next.data(), next.data() + next.size(), p.begin());
    sanitize(p);
}

void Propagator::apply(PopulationVector& p) const {
    apply(p.p);
    p.time += dt_;
}

namespace {

// Closed communicating classes of the directed graph i -> j (M(j, i) > 0).
std::vector<std::vector<std::size_t>> closed_classes(const Eigen::MatrixXd& m) {
    const auto n = static_cast<std::size_t>(m.rows());
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        reach[i][i] = true;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            const std::size_t a = stack.back();
            stack.pop_back();
            for (std::size_t b = 0; b < n; ++b)
                if (!reach[i][b] && a != b && m(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) > 0.0) {
                    reach[i][b] = true;
                    stack.push_back(b);
                }
        }
    }
    std::vector<bool> assigned(n, false);
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t i = 0; i < n; ++i) {
        if (assigned[i]) continue;
        std::vector<std::size_t> cls;
        for (std::size_t j = 0; j < n; ++j)
            if (reach[i][j] && reach[j][i]) cls.push_back(j);
        for (std::size_t j : cls) assigned[j] = true;
        bool closed = true;
        for (std::size_t j : cls)
            for (std::size_t k = 0; k < n; ++k)
                if (reach[j][k] && !reach[k][j]) closed = false;
        if (closed) classes.push_back(cls);
    }
    return classes;
}

}  // namespace

std::vector<StationaryBlock> stationary_blocks(const Eigen::MatrixXd& m, const std::vector<std::string>& labels) {
    check_generator(m);
    const Eigen::Index n = m.rows();
    std::vector<StationaryBlock> blocks;
    for (const auto& cls : closed_classes(m)) {
        const auto k = static_cast<Eigen::Index>(cls.size());
        Eigen::MatrixXd a(k, k);
        for (Eigen::Index r = 0; r < k; ++r)
            for (Eigen::Index c = 0; c < k; ++c)
                a(r, c) = m(static_cast<Eigen::Index>(cls[static_cast<std::size_t>(r)]),
                            static_cast<Eigen::Index>(cls[static_cast<std::size_t>(c)]));
        // Replace the last balance equation by the normalisation.
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
        a.row(k - 1).setOnes();
        rhs(k - 1) = 1.0;
        const Eigen::VectorXd x = a.fullPivLu().solve(rhs);

        StationaryBlock b;
        b.states = cls;
        b.distribution = Eigen::VectorXd::Zero(n);
        for (Eigen::Index r = 0; r < k; ++r)
            b.distribution(static_cast<Eigen::Index>(cls[static_cast<std::size_t>(r)])) = std::max(0.0, x(r));
        b.distribution /= b.distribution.sum();
        for (std::size_t s : cls) {
            if (!b.label.empty()) b.label += ",";
            b.label += s < labels.size() ? labels[s] : std::to_string(s);
        }
        blocks.push_back(std::move(b));
    }
    return blocks;
}

Eigen::VectorXd stationary(const Eigen::MatrixXd& m) {
    auto blocks = stationary_blocks(m);
    if (blocks.size() != 1) {
        const std::size_t count = blocks.size();
        throw ReducibleGenerator("generator has " + std::to_string(count) + " closed classes", std::move(blocks));
    }
    return blocks.front().distribution;
}

PopulationVector stationary(const RateTable& rates) {
    const auto m = generator(rates);
    std::vector<std::string> labels;
    for (const auto& s : rates.basis->states) labels.push_back(s.label());
    auto blocks = stationary_blocks(m, labels);
    if (blocks.size() != 1) {
        const std::size_t count = blocks.size();
        throw ReducibleGenerator("rate table has " + std::to_string(count) + " closed classes", std::move(blocks));
    }
    PopulationVector p;
    p.basis = rates.basis;
    p.p.assign(blocks.front().distribution.data(), blocks.front().distribution.data() + m.rows());
    return p;
}

Eigen::VectorXd stationary_from(const Eigen::MatrixXd& m, const Eigen::VectorXd& p0) {
    const auto blocks = stationary_blocks(m);
    const auto n = static_cast<std::size_t>(m.rows());
    std::vector<int> owner(n, -1);
    for (std::size_t b = 0; b < blocks.size(); ++b)
        for (std::size_t s : blocks[b].states) owner[s] = static_cast<int>(b);
    std::vector<Eigen::Index> transient;
    for (std::size_t s = 0; s < n; ++s)
        if (owner[s] < 0) transient.push_back(static_cast<Eigen::Index>(s));

    std::vector<double> weight(blocks.size(), 0.0);
    for (std::size_t s = 0; s < n; ++s)
        if (owner[s] >= 0) weight[static_cast<std::size_t>(owner[s])] += p0(static_cast<Eigen::Index>(s));
    if (!transient.empty()) {
        // Time-integrated transient occupation x solves M_TT x = -P0_T.
        const auto t = static_cast<Eigen::Index>(transient.size());
        Eigen::MatrixXd mtt(t, t);
        Eigen::VectorXd rhs(t);
        for (Eigen::Index a = 0; a < t; ++a) {
            rhs(a) = -p0(transient[static_cast<std::size_t>(a)]);
            for (Eigen::Index b = 0; b < t; ++b)
                mtt(a, b) = m(transient[static_cast<std::size_t>(a)], transient[static_cast<std::size_t>(b)]);
        }
        const Eigen::VectorXd x = mtt.fullPivLu().solve(rhs);
        for (std::size_t s = 0; s < n; ++s) {
            if (owner[s] < 0) continue;
            for (Eigen::Index a = 0; a < t; ++a)
                weight[static_cast<std::size_t>(owner[s])] +=
                    m(static_cast<Eigen::Index>(s), transient[static_cast<std::size_t>(a)]) * x(a);
        }
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t b = 0; b < blocks.size(); ++b) out += weight[b] * blocks[b].distribution;
    return out;
}

void PopulationTrajectory::append(const PopulationVector& p, const std::string& step_label, double ekin) {
    if (!basis) basis = p.basis;
    if (!times.empty() && !(p.time > times.back())) throw Error("trajectory times must increase strictly");
    times.push_back(p.time);
    populations.push_back(p.p);
    step_labels.push_back(step_label);
    if (ekin >= 0.0) kinetic_energy.push_back(ekin);
}

PopulationVector PopulationTrajectory::at(std::size_t k) const {
    PopulationVector p;
    p.basis = basis;
    p.p = populations.at(k);
    p.time = times.at(k);
    return p;
}

double PopulationTrajectory::mean_J(std::size_t k) const { return at(k).mean_J(); }
double PopulationTrajectory::mean_v(std::size_t k) const { return at(k).mean_v(); }
double PopulationTrajectory::ground_fraction(std::size_t k) const { return at(k).ground_fraction(); }

std::string export_trajectory(const PopulationTrajectory& t, const std::vector<std::string>& header_lines) {
    std::ostringstream os;
    for (const auto& h : header_lines) os << "# " << h << "\n";
    os << "t_s";
    for (const auto& s : t.basis->states) os << "\t" << s.label();
    os << "\tmeanJ\tmeanV\tEkin_J\n";
    const bool with_ekin = t.kinetic_energy.size() == t.times.size();
    for (std::size_t k = 0; k < t.size(); ++k) {
        os << format_double(t.times[k]);
        for (double x : t.populations[k]) os << "\t" << format_double(x);
        os << "\t" << format_double(t.mean_J(k)) << "\t" << format_double(t.mean_v(k)) << "\t"
           << (with_ekin ? format_double(t.kinetic_energy[k]) : std::string("nan")) << "\n";
    }
    return os.str();
}

}  // namespace cavcool
