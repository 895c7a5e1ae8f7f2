#include <CLI11.hpp>

#include <iostream>

#include "cavcool/export.hpp"
#include "cavcool/service.hpp"
#include "server.hpp"

using namespace cavcool;

namespace {

constexpr int kConfigError = 2;
constexpr int kRegimeFail = 3;

struct Globals {
    std::string config = "defaults-oh";
    std::string out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> set;
    bool quiet = false;
};

RunConfig load(const Globals& g, std::vector<std::string> extra) {
    auto kv = KeyValueFile::load(resolve_config_path(g.config));
    if (g.seed) extra.push_back("seed=" + std::to_string(*g.seed));
    apply_overrides(kv, g.set);
    apply_overrides(kv, extra);
    auto cfg = parse_config(kv);
    if (!g.out.empty()) cfg.output_dir = g.out;
    return cfg;
}

void report_run(const RunResult& r, bool quiet) {
    if (quiet) return;
    const auto& t = r.trajectory;
    std::cout << "schedule: " << (r.schedule.label.empty() ? "unnamed" : r.schedule.label) << " ("
              << r.schedule.steps.size() << " steps x " << r.schedule.repeat_count << ")\n";
    std::cout << "final fraction in v=0, J in {0,1}: " << format_double(t.ground_fraction(t.size() - 1)) << "\n";
    std::cout << "final <J> = " << format_double(t.mean_J(t.size() - 1))
              << ", <v> = " << format_double(t.mean_v(t.size() - 1)) << "\n";
    std::cout << "<J> decrease rate: " << format_double(r.figure_of_merit) << " Hz\n";
    std::cout << "regime: " << (r.regime.ok() ? "pass" : "fail")
              << " (kappa / |g Omega / Delta| = " << format_double(r.regime.coupling_ratio) << ")\n";
    for (const auto& w : r.warnings) std::cout << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cavity-enhanced Raman cooling of diatomic molecules"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("-c,--config", g.config, "config file or bundled name (defaults-oh, defaults-no)");
    app.add_option("-o,--out", g.out, "output directory");
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--set", g.set, "override a config key, key=value")->take_all();
    app.add_flag("-q,--quiet", g.quiet, "suppress the summary on stdout");

    auto* run_cmd = app.add_subcommand("run", "run a cooling schedule and export the trajectory");
    std::string schedule;
    bool dry_run = false, allow_regime_fail = false;
    run_cmd->add_option("--schedule", schedule, "topdown, greedy, evolutionary, a bundled name or a file");
    run_cmd->add_flag("--dry-run", dry_run, "write the manifest only");
    run_cmd->add_flag("--allow-regime-fail", allow_regime_fail, "do not exit 3 when the regime check fails");

    auto* spec_cmd = app.add_subcommand("spectrum", "print the folded Raman spectrum");

    auto* opt_cmd = app.add_subcommand("optimize", "optimise a schedule and export it with its trajectory");
    std::string method;
    std::optional<int> horizon, generations;
    opt_cmd->add_option("--method", method, "greedy or evolutionary")->check(CLI::IsMember({"greedy", "evolutionary"}));
    opt_cmd->add_option("--horizon", horizon, "number of steps");
    opt_cmd->add_option("--generations", generations, "evolutionary generations");

    auto* rates_cmd = app.add_subcommand("rates", "dump the rate table at one laser setting");
    std::string transition;
    std::optional<double> offset_hz;
    double momentum = 0.0;
    rates_cmd->add_option("--transition", transition, "tune the laser onto this line, e.g. v0-0:J3-1");
    rates_cmd->add_option("--offset-hz", offset_hz, "explicit laser offset in Hz");
    rates_cmd->add_option("--momentum", momentum, "molecular momentum along the cavity axis, kg m/s");

    auto* serve_cmd = app.add_subcommand("serve", "run the HTTP/JSON control service");
    std::string host = "127.0.0.1", static_dir;
    int port = 8080;
    serve_cmd->add_option("--host", host);
    serve_cmd->add_option("--port", port);
    serve_cmd->add_option("--static", static_dir, "directory of UI assets served at /");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    // Only the subcommand goes into the manifest so exports do not depend on --out.
    const std::string cmdline = app.get_subcommands().front()->get_name();
    try {
        if (*serve_cmd) {
            ServiceOptions so;
            so.default_config = g.config;
            ControlService svc(so);
            return serve_http(svc, host, port, static_dir, g.quiet);
        }

        std::vector<std::string> extra;
        if (*run_cmd && !schedule.empty()) extra.push_back("schedule=" + schedule);
        if (*opt_cmd) {
            if (horizon) extra.push_back("horizon_steps=" + std::to_string(*horizon));
            if (generations) extra.push_back("generations=" + std::to_string(*generations));
        }
        const RunConfig cfg = load(g, extra);

        if (*run_cmd) {
            if (dry_run) {
                write_outputs(cfg.output_dir, cfg, cmdline, nullptr);
                if (!g.quiet) std::cout << "manifest written to " << (cfg.output_dir / "manifest.cfg").string() << "\n";
                return 0;
            }
            const auto model = build_model(cfg);
            const auto p0 = initial_populations(cfg, model);
            const auto s = make_schedule(cfg, model, p0);
            const auto r = simulate(cfg, model, p0, s);
            write_outputs(cfg.output_dir, cfg, cmdline, &r);
            report_run(r, g.quiet);
            if (!r.regime.ok() && cfg.regime_hard_fail && !allow_regime_fail) {
                std::cerr << "cavcool: regime check failed\n" << r.regime.text();
                return kRegimeFail;
            }
            return 0;
        }

        if (*spec_cmd) {
            const auto model = build_model(cfg);
            const auto sp = fold(*model.basis(), model.cavity(), model.laser());
            const auto text = export_spectrum(sp, cfg.cavity.kappa);
            std::filesystem::create_directories(cfg.output_dir);
            write_text(cfg.output_dir / "spectrum.tsv", text);
            if (!g.quiet) {
                std::cout << text;
                std::cout << "# anti-Stokes lines: " << sp.of_kind(LineKind::anti_stokes).size() << "\n";
                for (const auto* l : stokes_collisions(sp, cfg.cavity.kappa))
                    std::cout << "# warning: Stokes line " << l->label << " within 5 kappa of a mode\n";
            }
            return 0;
        }

        if (*opt_cmd) {
            RunConfig c = cfg;
            if (method.empty())
                method = cfg.schedule_source == ScheduleSource::evolutionary ? "evolutionary" : "greedy";
            c.schedule_source = method == "evolutionary" ? ScheduleSource::evolutionary : ScheduleSource::greedy;
            c.validate();
            const auto model = build_model(c);
            const auto p0 = initial_populations(c, model);
            const auto s = make_schedule(c, model, p0);
            const auto r = simulate(c, model, p0, s);
            write_outputs(c.output_dir, c, cmdline, &r);
            if (!g.quiet) {
                std::cout << "method: " << method << "\n";
                std::cout << "objective <J> + w<v>: " << format_double(cooling_objective(r.trajectory.back(), c.greedy.weight))
                          << "\n";
            }
            report_run(r, g.quiet);
            return 0;
        }

        if (*rates_cmd) {
            const auto model = build_model(cfg);
            double offset = cfg.laser.detuning_offset;
            std::optional<double> fsr;
            if (!transition.empty()) {
                ScheduleStep st;
                st.target = TransitionTarget::parse(transition);
                if (!st.target) throw ConfigError("--transition: expected a label like v0-0:J3-1");
                st.duration = 1.0;
                offset = resolve_step(st, model).laser_offset;
            } else if (offset_hz) {
                offset = hz_to_rad_s(*offset_hz);
            }
            RateOptions ro;
            ro.fsr_override = fsr;
            const auto t = model.rates(offset, momentum, ro);
            const auto text = export_rates(t);
            std::filesystem::create_directories(cfg.output_dir);
            write_text(cfg.output_dir / "rates.tsv", text);
            if (!g.quiet) std::cout << text;
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "cavcool: config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const EmptyBasis& e) {
        std::cerr << "cavcool: config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ScheduleError& e) {
        std::cerr << "cavcool: config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ForbiddenTransition& e) {
        std::cerr << "cavcool: config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "cavcool: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
