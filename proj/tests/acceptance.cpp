// One line per criterion: PASS/FAIL, name, measured values, runtime.
#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cavcool/config.hpp"
#include "cavcool/dynamics.hpp"
#include "cavcool/export.hpp"
#include "cavcool/momentum.hpp"
#include "cavcool/polarizability.hpp"
#include "cavcool/spectrum.hpp"
#include "cavcool/vibrational.hpp"

using namespace cavcool;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(const std::string& name, double max_seconds, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (max_seconds > 0.0 && dt >= max_seconds) {
        o.pass = false;
        o.detail << " [runtime over " << max_seconds << " s]";
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ":" << o.detail.str() << " (" << dt << " s)" << std::endl;
}

RunConfig config(const std::string& name, const std::vector<std::string>& o = {}) {
    return load_config(resolve_config_path(name), o);
}

cpp_int factorial(int n) {
    cpp_int f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

cpp_rational cg0_squared(int j1, int j2, int J) {
    if (J < std::abs(j1 - j2) || J > j1 + j2 || (j1 + j2 + J) % 2) return 0;
    const cpp_rational pre = cpp_rational(cpp_int(2 * J + 1) * factorial(J + j1 - j2) * factorial(J - j1 + j2) *
                                          factorial(j1 + j2 - J),
                                          factorial(j1 + j2 + J + 1)) *
                             cpp_rational(factorial(J) * factorial(J) * factorial(j1) * factorial(j1) * factorial(j2) *
                                          factorial(j2));
    cpp_rational s = 0;
    for (int k = 0; k <= j1 + j2; ++k) {
        const int a = j1 + j2 - J - k, b = j1 - k, c = j2 - k, d = J - j2 + k, e = J - j1 + k;
        if (a < 0 || b < 0 || c < 0 || d < 0 || e < 0) continue;
        const cpp_rational term(1, factorial(k) * factorial(a) * factorial(b) * factorial(c) * factorial(d) * factorial(e));
        s += (k % 2 ? -term : term);
    }
    return pre * s * s;
}

int levels_above(const fs::path& mol, double threshold, double* mean_J) {
    const auto m = read_molecule_file(mol);
    const auto b = std::make_shared<const RoVibBasis>(build_basis(m, 0, 80));
    const auto p = boltzmann_populations(b, 300.0);
    if (mean_J) *mean_J = p.mean_J();
    int n = 0;
    for (double x : p.p) n += x > threshold;
    return n;
}

Eigen::MatrixXd two_level(double a, double b) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(2, 2);
    r(0, 1) = a;
    r(1, 0) = b;
    return generator_from_rates(r);
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    while (b - a > tol) {
        if (f(c) < f(d)) b = d;
        else a = c;
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    return 0.5 * (a + b);
}

double morse_level(double we, double wexe, int v) {
    const double x = v + 0.5;
    return we * x - wexe * x * x;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

int main() {
    std::cout.precision(6);

    criterion("Placzek-Teller factors", 1.0, [](Outcome& o) {
        double worst = 0.0, worst_sum = 0.0;
        for (int J = 0; J <= 50; ++J) {
            double s = 0.0;
            for (int Jp = 0; Jp <= J + 4; ++Jp) {
                const double v = placzek_teller(J, Jp);
                worst = std::max(worst, std::abs(v - static_cast<double>(cg0_squared(J, 2, Jp))));
                s += v;
            }
            worst_sum = std::max(worst_sum, std::abs(s - 1.0));
        }
        o.detail << " max |S - exact| = " << worst << ", max |sum - 1| = " << worst_sum
                 << ", S(0->0) = " << placzek_teller(0, 0);
        o.require(worst <= 1e-12, "exact values");
        o.require(worst_sum <= 1e-12, "sum rule");
        o.require(placzek_teller(0, 0) == 0.0, "S(0->0) = 0");
    });

    criterion("thermal initialization", 1.0, [](Outcome& o) {
        double jbar = 0.0;
        const int n_oh = levels_above(data_directory() / "oh.mol", 1e-3, &jbar);
        const int n_no = levels_above(data_directory() / "no.mol", 1e-3, nullptr);
        o.detail << " OH levels = " << n_oh << ", OH <J> = " << jbar << ", NO levels = " << n_no;
        o.require(n_oh == 9, "OH 9 levels");
        o.require(std::abs(jbar - 2.44) <= 0.02, "OH <J>");
        o.require(std::abs(n_no - 25) <= 2, "NO 25 +- 2 levels");
    });

    criterion("Doppler limit", 1.0, [](Outcome& o) {
        const double kappa = hz_to_rad_s(75e3);
        const auto d = doppler_limit(kappa, -kappa);
        const double x = golden_min([&](double delta) { return doppler_limit(kappa, delta).energy; }, -5.0 * kappa,
                                    -0.1 * kappa, 1e-9 * kappa);
        o.detail << " E(-kappa) / (hbar kappa / 2) = " << d.energy / (constants::hbar * kappa / 2.0)
                 << ", argmin / kappa = " << x / kappa << ", T = " << d.temperature * 1e6 << " uK";
        o.require(d.energy == constants::hbar * kappa / 2.0, "E = hbar kappa / 2");
        o.require(std::abs(x + kappa) < 1e-6 * kappa, "minimum at -kappa");
        o.require(d.temperature >= 1.5e-6 && d.temperature <= 2.5e-6, "few microkelvin");
    });

    criterion("rate-equation core", 30.0, [](Outcome& o) {
        const double a = 7.0, b = 2.0, pinf = b / (a + b);
        const auto m = two_level(a, b);
        double worst = 0.0;
        const auto basis =
            std::make_shared<const RoVibBasis>(build_basis(read_molecule_file(data_directory() / "oh.mol"), 0, 1));
        for (double t : {1e-4, 0.01, 0.1, 0.37, 1.0, 5.0}) {
            const auto q = propagate_step(PopulationVector{basis, {1.0, 0.0}, 0.0}, m, t);
            worst = std::max(worst, std::abs(q.p[0] - (pinf + (1.0 - pinf) * std::exp(-(a + b) * t))));
        }
        const auto s = stationary(m);
        const double stat = std::max(std::abs(s(0) - 2.0 / 9.0), std::abs(s(1) - 7.0 / 9.0));

        // the physical OH generator while driving J3 -> 1
        const auto cfg = config("defaults-oh");
        const auto model = build_model(cfg);
        const auto& bs = *model.basis();
        const auto g = generator(
            model.rates(detuning_for(bs, bs.index_of(0, 3), bs.index_of(0, 1), model.cavity(), model.laser())));
        const double t1 = 0.013, t2 = 0.041;
        const Propagator pa(g, t1), pb(g, t2), pab(g, t1 + t2);
        const double semi = (pb.matrix() * pa.matrix() - pab.matrix()).cwiseAbs().maxCoeff();

        // conservation without renormalisation: 1e6 steps
        const Propagator step(g, 1e-4);
        Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(initial_populations(cfg, model).p.data(),
                                                              static_cast<Eigen::Index>(bs.size()));
        const double start = x.sum();
        for (int k = 0; k < 1000000; ++k) x = step.matrix() * x;
        const double drift = std::abs(x.sum() - start);

        o.detail << " two-level error = " << worst << ", stationary error = " << stat << ", semigroup = " << semi
                 << ", 1e6-step drift = " << drift;
        o.require(worst <= 1e-9, "two-level decay");
        o.require(stat <= 1e-9, "stationary");
        o.require(semi <= 1e-10, "semigroup");
        o.require(drift < 1e-9, "conservation");
    });

    criterion("vibrational solver", 10.0, [](Outcome& o) {
        struct Case {
            const char* name;
            double we, wexe, mu, re;
            RadialGrid grid;
        };
        const Case cases[] = {{"OH", 3735.21, 82.81, 0.948087, 0.96966, {0.45, 3.8, 1024}},
                              {"NO", 1904.2, 14.075, 7.46643, 1.15077, {0.85, 1.75, 1024}}};
        double rel = 0.0, ortho = 0.0, conv = 0.0;
        for (const auto& c : cases) {
            const auto curve = PotentialCurve::morse(MorseParams::from_spectroscopic(c.we, c.wexe, c.mu, c.re));
            const auto lv = solve_levels(curve, c.mu, c.grid, 9);
            for (int v = 0; v <= 8; ++v)
                rel = std::max(rel, std::abs(lv[v].energy / morse_level(c.we, c.wexe, v) - 1.0));
            for (int i = 0; i <= 8; ++i)
                for (int j = 0; j <= 8; ++j) ortho = std::max(ortho, std::abs(overlap(lv[i], lv[j]) - (i == j)));
            RadialGrid coarse = c.grid, fine = c.grid;
            coarse.n_points = 512;
            fine.n_points = 1023;
            const auto a = solve_levels(curve, c.mu, coarse, 9), b = solve_levels(curve, c.mu, fine, 9);
            for (int v = 0; v <= 8; ++v) conv = std::max(conv, std::abs(b[v].energy - a[v].energy) / b[v].energy);
        }
        o.detail << " max relative level error = " << rel << ", max orthonormality error = " << ortho
                 << ", grid-doubling change = " << conv;
        o.require(rel <= 1e-6, "analytic levels");
        o.require(ortho <= 1e-8, "orthonormality");
        o.require(conv < 1e-8, "grid doubling");
    });

    criterion("Raman spectrum and dual-line FSR", 5.0, [](Outcome& o) {
        const auto model = build_model(config("defaults-oh"));
        const auto& b = *model.basis();
        const auto sp = fold(b, model.cavity(), model.laser());
        const auto n = sp.of_kind(LineKind::anti_stokes).size();
        const double tol = 1e-3 * model.cavity().kappa;
        const auto s = tune_fsr_for_pair(b, b.index_of(0, 3), b.index_of(0, 1), b.index_of(0, 2), b.index_of(0, 0),
                                         model.cavity(), model.laser(), tol);
        const double dev = s.fsr / model.cavity().fsr - 1.0;
        o.detail << " anti-Stokes lines = " << n << ", FSR = " << format_double(rad_s_to_hz(s.fsr))
                 << " Hz, deviation = " << dev * 100.0 << " %";
        o.require(n == 7, "seven anti-Stokes lines");
        o.require(std::abs(dev) <= 0.005, "FSR within 0.5 %");
    });

    criterion("cooling (a) top-down OH, one cycle", 60.0, [](Outcome& o) {
        const auto cfg = config("defaults-oh", {"schedule=topdown", "repeat=1"});
        const auto model = build_model(cfg);
        const auto p0 = initial_populations(cfg, model);
        const auto t = run(make_schedule(cfg, model, p0), model, p0);
        const double f = t.back().ground_fraction();
        o.detail << " J in {0,1} fraction = " << f;
        o.require(f >= 0.85, ">= 0.85");
    });

    criterion("cooling (b) optimized OH", 60.0, [](Outcome& o) {
        const auto cfg = config("defaults-oh", {"schedule=oh-optimized"});
        const auto model = build_model(cfg);
        const auto p0 = initial_populations(cfg, model);
        const auto t = run(make_schedule(cfg, model, p0), model, p0);
        const double f = t.back().ground_fraction();
        o.detail << " J in {0,1} fraction = " << f;
        o.require(f >= 0.97, ">= 0.97");
    });

    criterion("cooling (c) greedy NO vs greedy OH", 60.0, [](Outcome& o) {
        auto fom = [](const RunConfig& cfg) {
            const auto model = build_model(cfg);
            const auto p0 = initial_populations(cfg, model);
            return figure_of_merit(run(make_schedule(cfg, model, p0), model, p0));
        };
        const double oh = fom(config("defaults-oh", {"schedule=greedy"}));
        const double no = fom(config("defaults-no", {"schedule=greedy", "J_max=8", "initial_reference_molecule=oh.mol"}));
        o.detail << " figure of merit OH = " << oh << " Hz, NO = " << no << " Hz, ratio = " << no / oh;
        o.require(no / oh > 5.0, "ratio > 5");
    });

    criterion("cooling (d) cavity off heats monotonically", 60.0, [](Outcome& o) {
        const auto cfg = config("defaults-oh");
        const auto model = build_model(cfg);
        const auto p0 = initial_populations(cfg, model);
        RunOptions ro;
        ro.rates.cavity = false;
        ro.sub_samples = 10;
        auto s = make_schedule(cfg, model, p0);
        s.repeat_count = 3;
        const auto t = run(s, model, p0, ro);
        double worst = 0.0;
        for (std::size_t k = 1; k < t.size(); ++k) worst = std::min(worst, t.mean_J(k) - t.mean_J(k - 1));
        o.detail << " <J> " << t.mean_J(0) << " -> " << t.mean_J(t.size() - 1) << ", largest decrease = " << 0.0 - worst
                 << " over " << t.size() << " samples";
        o.require(worst >= 0.0, "non-decreasing <J>");
        o.require(t.mean_J(t.size() - 1) > t.mean_J(0), "net heating");
    });

    criterion("cooling (e) ro-vibrational", 60.0, [](Outcome& o) {
        const auto cfg = config("defaults-oh", {"v_max=1", "initial_vibrational=1", "schedule=ohrovib"});
        const auto model = build_model(cfg);
        const auto p0 = initial_populations(cfg, model);
        const auto t = run(make_schedule(cfg, model, p0), model, p0);
        const auto& end = t.back();
        o.detail << " <v> = " << end.mean_v() << ", <J> = " << end.mean_J() << ", parity floor = " << end.odd_fraction();
        o.require(p0.mean_v() == 1.0, "starts in v = 1");
        o.require(end.mean_v() < 0.01, "<v> -> 0");
        o.require(std::abs(end.mean_J() - 0.5) < 0.05, "<J> -> 0.5");
        o.require(std::abs(end.mean_J() - end.odd_fraction()) < 0.05, "<J> at the parity floor");
    });

    criterion("regime checks", 5.0, [](Outcome& o) {
        const auto cfg = config("defaults-oh");
        const auto model = build_model(cfg);
        const auto p0 = initial_populations(cfg, model);
        const auto rep = schedule_regime(model, make_schedule(cfg, model, p0), cfg.regime_threshold);
        double lo = 1e300;
        for (const auto& d : rep.driven) lo = std::min(lo, d.ratio);
        const auto text = rep.text();
        bool quoted = text.find(format_double(rep.coupling_ratio)) != std::string::npos;
        for (const auto& d : rep.driven) quoted = quoted && text.find(format_double(d.ratio)) != std::string::npos;
        o.detail << " kappa / |g Omega / Delta| = " << rep.coupling_ratio << ", min Gamma_kappa / Gamma_gamma = " << lo
                 << " over " << rep.driven.size() << " driven lines";
        o.require(!rep.driven.empty(), "driven lines found");
        o.require(rep.cooling_ok, "Gamma_kappa / Gamma_gamma > 10");
        o.require(rep.coupling_ok, "kappa / |g Omega / Delta| > 10");
        o.require(quoted, "report quotes the ratios");
    });

    criterion("determinism", 0.0, [](Outcome& o) {
        const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
            {"defaults-oh", {"schedule=topdown"}},
            {"defaults-oh", {"schedule=greedy", "horizon_steps=10"}},
            {"defaults-oh", {"schedule=evolutionary", "horizon_steps=8", "generations=4", "population_size=8", "seed=9"}},
            {"defaults-no", {"schedule=no-optimized"}},
            {"defaults-oh", {"schedule=topdown", "momentum_model=true", "motional_temperature_K=1e-4"}},
        };
        int n = 0;
        for (const auto& [name, ov] : runs) {
            std::vector<std::string> text[2];
            for (int rep = 0; rep < 2; ++rep) {
                const auto dir = fs::temp_directory_path() / ("cavcool-acceptance-" + std::to_string(rep));
                fs::remove_all(dir);
                const auto cfg = config(name, ov);
                const auto model = build_model(cfg);
                const auto p0 = initial_populations(cfg, model);
                const auto r = simulate(cfg, model, p0, make_schedule(cfg, model, p0));
                write_outputs(dir, cfg, "run", &r);
                for (const char* f : {"manifest.cfg", "trajectory.tsv", "regime.txt", "spectrum.tsv", "schedule.sched"})
                    text[rep].push_back(slurp(dir / f));
                fs::remove_all(dir);
            }
            const bool same = text[0] == text[1];
            o.require(same, name + " " + ov[0]);
            n += same;
        }
        o.detail << " " << n << "/" << runs.size() << " configurations byte-identical";
    });

    std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " failing criteria" << std::endl;
    return failures ? 1 : 0;
}
